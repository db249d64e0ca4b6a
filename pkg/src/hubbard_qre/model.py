"""Fermi-Hubbard problem instances, observables and their Jordan-Wigner encoding.

Mode ordering (Jordan-Wigner strings depend on it)::

    mode = spin * (n_sites * orbitals) + site * orbitals + orbital
    site = y * nx + x

Spin is the slowest index (all spin-up modes first), the orbital the fastest.
Qubit ``q`` carries mode ``q``; occupation 1 is the computational state ``|1>``.
"""

from __future__ import annotations

import itertools
import json
import math
import re
from dataclasses import asdict, dataclass, field
from pathlib import Path
from typing import Iterable, Iterator, Mapping, Sequence

import numpy as np

from hubbard_qre.errors import SpecificationError

UP, DOWN = 0, 1
SPIN_SIGN = {UP: 1, DOWN: -1}

# Coefficients below this magnitude are dropped when like terms are merged.
MERGE_TOL = 1e-12

SPEC_KEYS = ("nx", "ny", "orbitals", "V_nn", "U", "U_prime", "J", "J_prime", "mu", "boundary")
_OPTIONAL_KEYS = ("schema_version", "orbital_hopping")


@dataclass(frozen=True)
class HubbardSpec:
    """Lattice, orbital and coupling parameters of a Fermi-Hubbard instance.

    ``orbital_hopping`` holds extra nearest-neighbour hops between orbitals as
    ``(l, l_prime, amplitude)`` triples; the amplitude multiplies
    ``c^dag_{i l s} c_{j l' s}`` and its Hermitian conjugate is added.
    """

    nx: int
    ny: int = 1
    orbitals: int = 1
    V_nn: float = 1.0
    U: float = 2.0
    U_prime: float = 0.0
    J: float = 0.0
    J_prime: float = 0.0
    mu: float = 1.0
    boundary: str = "open"
    orbital_hopping: tuple[tuple[int, int, float], ...] = field(default=())

    def __post_init__(self):
        for name in ("nx", "ny", "orbitals"):
            value = getattr(self, name)
            if not isinstance(value, (int, np.integer)) or isinstance(value, bool) or value < 1:
                raise SpecificationError(f"{name} must be a positive integer, got {value!r}")
        if self.boundary not in ("open", "periodic"):
            raise SpecificationError(f"boundary must be 'open' or 'periodic', got {self.boundary!r}")
        if self.orbitals == 1 and (self.U_prime or self.J or self.J_prime or self.orbital_hopping):
            raise SpecificationError("U_prime, J, J_prime and orbital_hopping require orbitals > 1")
        hops = tuple((int(a), int(b), float(v)) for a, b, v in self.orbital_hopping)
        for a, b, _ in hops:
            if not (0 <= a < self.orbitals and 0 <= b < self.orbitals):
                raise SpecificationError(f"orbital_hopping index out of range: ({a}, {b})")
        object.__setattr__(self, "orbital_hopping", hops)

    @property
    def n_sites(self) -> int:
        return self.nx * self.ny

    @property
    def n_modes(self) -> int:
        return 2 * self.n_sites * self.orbitals

    def site(self, x: int, y: int = 0) -> int:
        return y * self.nx + x

    def coords(self, site: int) -> tuple[int, int]:
        return site % self.nx, site // self.nx

    def mode(self, site: int, spin: int, orbital: int = 0) -> int:
        return spin * self.n_sites * self.orbitals + site * self.orbitals + orbital

    def edges(self) -> list[tuple[int, int]]:
        """Unique nearest-neighbour bonds ``(i, j)`` with ``i < j``.

        With periodic boundaries an extent of 2 would produce the same bond twice;
        it is counted once. An extent of 1 has no bonds along that axis.
        """
        bonds = set()
        periodic = self.boundary == "periodic"
        for y in range(self.ny):
            for x in range(self.nx):
                i = self.site(x, y)
                for dx, dy, extent in ((1, 0, self.nx), (0, 1, self.ny)):
                    coord = x if dx else y
                    if coord + 1 < extent:
                        nxt = coord + 1
                    elif periodic and extent > 2:
                        nxt = 0
                    else:
                        continue
                    j = self.site(nxt, y) if dx else self.site(x, nxt)
                    bonds.add((min(i, j), max(i, j)))
        return sorted(bonds)

    def to_dict(self) -> dict:
        data = asdict(self)
        if not self.orbital_hopping:
            del data["orbital_hopping"]
        else:
            data["orbital_hopping"] = [list(h) for h in self.orbital_hopping]
        return data

    @classmethod
    def from_dict(cls, data: Mapping) -> "HubbardSpec":
        for key in data:
            if key not in SPEC_KEYS and key not in _OPTIONAL_KEYS:
                raise SpecificationError(f"unknown key {key!r} in problem spec")
        if "nx" not in data:
            raise SpecificationError("missing required key 'nx' in problem spec")
        kwargs = {k: data[k] for k in SPEC_KEYS if k in data}
        if "orbital_hopping" in data:
            kwargs["orbital_hopping"] = tuple(tuple(h) for h in data["orbital_hopping"])
        return cls(**kwargs)


def load_spec(source: str | Path | Mapping) -> HubbardSpec:
    """Read a problem spec from a JSON file, JSON text or an already-parsed mapping.

    Errors name the offending key and, when read from text, its line number.
    """
    if isinstance(source, Mapping):
        return HubbardSpec.from_dict(source)
    path = Path(source)
    text = path.read_text() if path.exists() else str(source)
    try:
        data = json.loads(text)
    except json.JSONDecodeError as exc:
        raise SpecificationError(f"invalid JSON at line {exc.lineno}, column {exc.colno}: {exc.msg}") from exc
    if not isinstance(data, dict):
        raise SpecificationError("problem spec must be a JSON object")
    try:
        return HubbardSpec.from_dict(data)
    except (SpecificationError, TypeError) as exc:
        match = re.search(r"'([^']+)'", str(exc))
        if match:
            for lineno, line in enumerate(text.splitlines(), start=1):
                if f'"{match.group(1)}"' in line:
                    raise SpecificationError(f"line {lineno}: {exc}") from exc
        raise SpecificationError(str(exc)) from exc


# ---------------------------------------------------------------------------
# Fermionic terms


@dataclass(frozen=True)
class FermionTerm:
    """A product of ladder operators, left to right, times a coefficient.

    ``ops`` is a tuple of ``(mode, is_creation)`` pairs.
    """

    ops: tuple[tuple[int, bool], ...]
    coeff: complex = 1.0

    def adjoint(self) -> "FermionTerm":
        return FermionTerm(tuple((m, not d) for m, d in reversed(self.ops)), complex(self.coeff).conjugate())

    def max_mode(self) -> int:
        return max((m for m, _ in self.ops), default=-1)


def hop(i: int, j: int, coeff: complex) -> FermionTerm:
    return FermionTerm(((i, True), (j, False)), coeff)


def number(i: int, coeff: complex = 1.0) -> FermionTerm:
    return FermionTerm(((i, True), (i, False)), coeff)


def number_pair(i: int, j: int, coeff: complex = 1.0) -> FermionTerm:
    return FermionTerm(((i, True), (i, False), (j, True), (j, False)), coeff)


def normal_order(terms: Iterable[FermionTerm]) -> dict[tuple[tuple[int, bool], ...], complex]:
    """Canonical normal-ordered form of a sum of fermion terms.

    Creators precede annihilators, each group sorted by descending mode; products
    that repeat a mode within a group vanish. Returns ``{ops: coefficient}`` with
    near-zero coefficients removed, so equal operators map to equal dicts.
    """
    out: dict[tuple[tuple[int, bool], ...], complex] = {}
    stack = [(t.ops, complex(t.coeff)) for t in terms]
    while stack:
        ops, coeff = stack.pop()
        ops = list(ops)
        done = True
        for k in range(len(ops) - 1):
            (m1, d1), (m2, d2) = ops[k], ops[k + 1]
            # desired order: creators before annihilators; within a group, descending mode
            if (not d1 and d2) or (d1 == d2 and m1 < m2):
                swapped = ops[:k] + [ops[k + 1], ops[k]] + ops[k + 2 :]
                stack.append((tuple(swapped), -coeff))
                if m1 == m2 and d1 != d2:
                    stack.append((tuple(ops[:k] + ops[k + 2 :]), coeff))
                done = False
                break
            if d1 == d2 and m1 == m2:
                done = False
                break
        if done:
            key = tuple(ops)
            out[key] = out.get(key, 0.0) + coeff
    return {k: v for k, v in out.items() if abs(v) >= MERGE_TOL}


def build_hamiltonian(spec: HubbardSpec) -> list[FermionTerm]:
    """Enumerate all terms of the (multi-orbital) Fermi-Hubbard Hamiltonian.

    Hopping is emitted in both directions explicitly. The order of the returned
    list is deterministic: hopping, on-site U, chemical potential, then the
    multi-orbital U', J and J' terms when ``orbitals > 1``.
    """
    terms: list[FermionTerm] = []
    orbs = range(spec.orbitals)
    for i, j in spec.edges():
        for spin in (UP, DOWN):
            for orb in orbs:
                a, b = spec.mode(i, spin, orb), spec.mode(j, spin, orb)
                terms.append(hop(a, b, -spec.V_nn))
                terms.append(hop(b, a, -spec.V_nn))
            for l1, l2, amp in spec.orbital_hopping:
                for s, t in ((i, j), (j, i)):
                    a, b = spec.mode(s, spin, l1), spec.mode(t, spin, l2)
                    terms.append(hop(a, b, amp))
                    terms.append(hop(b, a, np.conj(amp)))
    if spec.U:
        for site in range(spec.n_sites):
            for orb in orbs:
                terms.append(number_pair(spec.mode(site, UP, orb), spec.mode(site, DOWN, orb), spec.U))
    if spec.mu:
        for spin in (UP, DOWN):
            for site in range(spec.n_sites):
                for orb in orbs:
                    terms.append(number(spec.mode(site, spin, orb), -spec.mu))
    if spec.orbitals == 1:
        return terms
    for site in range(spec.n_sites):
        m = lambda orb, s: spec.mode(site, s, orb)  # noqa: E731
        for l1, l2 in itertools.combinations(orbs, 2):
            # pairs with l' < l
            lo, hi = l1, l2
            if spec.U_prime:
                for s1, s2 in itertools.product((UP, DOWN), repeat=2):
                    terms.append(number_pair(m(hi, s1), m(lo, s2), spec.U_prime))
            if spec.J:
                for s1, s2 in itertools.product((UP, DOWN), repeat=2):
                    ops = ((m(hi, s1), True), (m(lo, s2), True), (m(hi, s2), False), (m(lo, s1), False))
                    terms.append(FermionTerm(ops, spec.J))
        if spec.J_prime:
            for l1, l2 in itertools.permutations(orbs, 2):
                ops = ((m(l1, UP), True), (m(l1, DOWN), True), (m(l2, DOWN), False), (m(l2, UP), False))
                terms.append(FermionTerm(ops, spec.J_prime))
    return terms


# ---------------------------------------------------------------------------
# Pauli algebra

# (a, b) -> (phase, c) with a*b = phase*c
_PAULI_PRODUCT = {
    ("I", "I"): (1, "I"), ("I", "X"): (1, "X"), ("I", "Y"): (1, "Y"), ("I", "Z"): (1, "Z"),
    ("X", "I"): (1, "X"), ("X", "X"): (1, "I"), ("X", "Y"): (1j, "Z"), ("X", "Z"): (-1j, "Y"),
    ("Y", "I"): (1, "Y"), ("Y", "X"): (-1j, "Z"), ("Y", "Y"): (1, "I"), ("Y", "Z"): (1j, "X"),
    ("Z", "I"): (1, "Z"), ("Z", "X"): (1j, "Y"), ("Z", "Y"): (-1j, "X"), ("Z", "Z"): (1, "I"),
}  # fmt: skip


def _multiply_strings(p: str, q: str) -> tuple[complex, str]:
    phase = 1 + 0j
    letters = []
    for a, b in zip(p, q):
        ph, c = _PAULI_PRODUCT[a, b]
        phase *= ph
        letters.append(c)
    return phase, "".join(letters)


@dataclass(frozen=True)
class PauliString:
    letters: str
    coeff: complex

    @property
    def is_identity(self) -> bool:
        return set(self.letters) <= {"I"}

    def support(self) -> dict[int, str]:
        return {q: c for q, c in enumerate(self.letters) if c != "I"}


class PauliOperatorSum:
    """Weighted sum of Pauli strings on ``n_qubits`` qubits with like terms merged.

    ``alpha`` is the 1-norm of the non-identity coefficients (the block-encoding
    subnormalization); ``term_count`` is the number of non-identity strings.
    """

    def __init__(self, n_qubits: int, terms: Mapping[str, complex] | Iterable[tuple[str, complex]] = ()):
        self.n_qubits = n_qubits
        items = terms.items() if isinstance(terms, Mapping) else terms
        merged: dict[str, complex] = {}
        for letters, coeff in items:
            if len(letters) != n_qubits:
                raise SpecificationError(f"Pauli string {letters!r} does not have length {n_qubits}")
            merged[letters] = merged.get(letters, 0) + complex(coeff)
        self.terms = {k: v for k, v in sorted(merged.items()) if abs(v) >= MERGE_TOL}

    @classmethod
    def identity(cls, n_qubits: int, coeff: complex = 1.0) -> "PauliOperatorSum":
        return cls(n_qubits, {"I" * n_qubits: coeff})

    @classmethod
    def from_support(cls, n_qubits: int, support: Mapping[int, str], coeff: complex = 1.0) -> "PauliOperatorSum":
        letters = ["I"] * n_qubits
        for q, c in support.items():
            letters[q] = c
        return cls(n_qubits, {"".join(letters): coeff})

    def __len__(self) -> int:
        return len(self.terms)

    def __iter__(self) -> Iterator[PauliString]:
        return (PauliString(k, v) for k, v in self.terms.items())

    def __repr__(self) -> str:
        return f"PauliOperatorSum(n_qubits={self.n_qubits}, strings={len(self)}, alpha={self.alpha:.6g})"

    @property
    def strings(self) -> list[PauliString]:
        return list(self)

    @property
    def identity_coefficient(self) -> complex:
        return self.terms.get("I" * self.n_qubits, 0j)

    @property
    def alpha(self) -> float:
        ident = "I" * self.n_qubits
        return math.fsum(abs(v) for k, v in self.terms.items() if k != ident)

    @property
    def term_count(self) -> int:
        ident = "I" * self.n_qubits
        return sum(1 for k in self.terms if k != ident)

    def _check(self, other: "PauliOperatorSum"):
        if other.n_qubits != self.n_qubits:
            raise SpecificationError(f"qubit count mismatch: {self.n_qubits} vs {other.n_qubits}")

    def __add__(self, other):
        if isinstance(other, (int, float, complex)):
            other = PauliOperatorSum.identity(self.n_qubits, other)
        self._check(other)
        return PauliOperatorSum(self.n_qubits, itertools.chain(self.terms.items(), other.terms.items()))

    __radd__ = __add__

    def __neg__(self):
        return self * -1

    def __sub__(self, other):
        return self + (-other)

    def __mul__(self, other):
        if isinstance(other, (int, float, complex, np.number)):
            return PauliOperatorSum(self.n_qubits, {k: v * other for k, v in self.terms.items()})
        self._check(other)
        out: dict[str, complex] = {}
        for p, a in self.terms.items():
            for q, b in other.terms.items():
                phase, r = _multiply_strings(p, q)
                out[r] = out.get(r, 0) + phase * a * b
        return PauliOperatorSum(self.n_qubits, out)

    def __rmul__(self, other):
        return self * other

    def adjoint(self) -> "PauliOperatorSum":
        return PauliOperatorSum(self.n_qubits, {k: v.conjugate() for k, v in self.terms.items()})

    def is_hermitian(self, tol: float = MERGE_TOL) -> bool:
        return all(abs(v.imag) <= tol for v in self.terms.values())

    def equals(self, other: "PauliOperatorSum", tol: float = MERGE_TOL) -> bool:
        self._check(other)
        return all(abs(v) <= tol for v in (self - other).terms.values())

    def to_records(self) -> list[dict]:
        return [{"pauli": k, "re": v.real, "im": v.imag} for k, v in self.terms.items()]


def _ladder(mode: int, creation: bool, n_qubits: int) -> PauliOperatorSum:
    prefix = "Z" * mode
    suffix = "I" * (n_qubits - mode - 1)
    y_coeff = -0.5j if creation else 0.5j
    return PauliOperatorSum(n_qubits, {prefix + "X" + suffix: 0.5, prefix + "Y" + suffix: y_coeff})


def jordan_wigner(terms: Sequence[FermionTerm], n_modes: int | None = None) -> PauliOperatorSum:
    """Map fermion terms to qubits: ``c_j -> Z_0 ... Z_{j-1} (X_j + i Y_j) / 2``."""
    if n_modes is None:
        n_modes = max((t.max_mode() for t in terms), default=-1) + 1
    out: dict[str, complex] = {}
    cache: dict[tuple[int, bool], PauliOperatorSum] = {}
    for term in terms:
        if term.max_mode() >= n_modes:
            raise SpecificationError(f"mode {term.max_mode()} out of range for {n_modes} modes")
        op = PauliOperatorSum.identity(n_modes, term.coeff)
        for mode, creation in term.ops:
            key = (mode, creation)
            if key not in cache:
                cache[key] = _ladder(mode, creation, n_modes)
            op = op * cache[key]
        for k, v in op.terms.items():
            out[k] = out.get(k, 0) + v
    return PauliOperatorSum(n_modes, out)


def encode_hamiltonian(spec: HubbardSpec) -> PauliOperatorSum:
    return jordan_wigner(build_hamiltonian(spec), spec.n_modes)


def number_operator(spec: HubbardSpec) -> PauliOperatorSum:
    return jordan_wigner([number(m) for m in range(spec.n_modes)], spec.n_modes)


# ---------------------------------------------------------------------------
# Observables

OBSERVABLE_KINDS = (
    "density",
    "magnetization",
    "staggered_magnetization",
    "pair_gap",
    "density_corr",
    "magnetization_corr",
    "lesser_green",
    "annihilation",
    "creation",
)


@dataclass(frozen=True)
class ObservableSpec:
    """Which observable to encode.

    ``sites`` holds one site for local observables and two for correlators;
    ``momentum`` is an integer index ``(mx, my)`` on the ``nx x ny`` Brillouin-zone
    grid, ``k = 2 pi (mx / nx, my / ny)``.
    """

    kind: str
    sites: tuple[int, ...] = ()
    spin: int = UP
    momentum: tuple[int, int] = (0, 0)
    form_factor: str = "s"
    orbital: int = 0

    def __post_init__(self):
        if self.kind not in OBSERVABLE_KINDS:
            raise SpecificationError(f"unknown observable kind {self.kind!r}")
        if self.form_factor not in ("s", "d"):
            raise SpecificationError(f"form factor must be 's' or 'd', got {self.form_factor!r}")
        if self.spin not in (UP, DOWN):
            raise SpecificationError(f"spin must be {UP} (up) or {DOWN} (down)")
        object.__setattr__(self, "sites", tuple(int(s) for s in self.sites))
        object.__setattr__(self, "momentum", tuple(int(k) for k in self.momentum))


def _check_sites(obs: ObservableSpec, spec: HubbardSpec, count: int):
    if len(obs.sites) != count:
        raise SpecificationError(f"{obs.kind} needs {count} site index(es), got {obs.sites}")
    for s in obs.sites:
        if not 0 <= s < spec.n_sites:
            raise SpecificationError(f"site {s} outside lattice of {spec.n_sites} sites")
    if not 0 <= obs.orbital < spec.orbitals:
        raise SpecificationError(f"orbital {obs.orbital} out of range")


def _n(spec: HubbardSpec, site: int, spin: int, orbital: int) -> PauliOperatorSum:
    return jordan_wigner([number(spec.mode(site, spin, orbital))], spec.n_modes)


def _site_density(spec: HubbardSpec, site: int, signed: bool) -> PauliOperatorSum:
    op = PauliOperatorSum(spec.n_modes)
    for orb in range(spec.orbitals):
        for spin in (UP, DOWN):
            op = op + _n(spec, site, spin, orb) * (SPIN_SIGN[spin] if signed else 1)
    return op


def momentum_ladder(spec: HubbardSpec, momentum: tuple[int, int], spin: int, creation: bool, orbital: int = 0):
    """``c_{k s} = N^{-1/2} sum_j exp(-i k . r_j) c_{j s}`` (or its adjoint)."""
    mx, my = momentum
    if not (0 <= mx < spec.nx and 0 <= my < spec.ny):
        raise SpecificationError(f"momentum index {momentum} outside the {spec.nx}x{spec.ny} Brillouin-zone grid")
    kx, ky = 2 * math.pi * mx / spec.nx, 2 * math.pi * my / spec.ny
    norm = 1 / math.sqrt(spec.n_sites)
    terms = []
    for site in range(spec.n_sites):
        x, y = spec.coords(site)
        phase = np.exp(-1j * (kx * x + ky * y)) * norm
        if creation:
            phase = np.conj(phase)
        terms.append(FermionTerm(((spec.mode(site, spin, orbital), creation),), phase))
    return jordan_wigner(terms, spec.n_modes)


def form_factor(kind: str, kx: float, ky: float) -> float:
    if kind == "s":
        return 1.0
    return math.cos(kx) - math.cos(ky)


def projector_pieces(obs: ObservableSpec, spec: HubbardSpec) -> list[tuple[float, PauliOperatorSum]]:
    """Split ``n_i n_j`` or ``m_i m_j`` into weighted projectors ``W = n_{i s} n_{j s'}``.

    One orbital gives four pieces; the observable is ``sum(w * W)``.
    """
    if obs.kind not in ("density_corr", "magnetization_corr"):
        raise SpecificationError(f"{obs.kind} is not a density or magnetization correlator")
    _check_sites(obs, spec, 2)
    i, j = obs.sites
    pieces = []
    for o1, o2 in itertools.product(range(spec.orbitals), repeat=2):
        for s1, s2 in itertools.product((UP, DOWN), repeat=2):
            w = 1.0 if obs.kind == "density_corr" else float(SPIN_SIGN[s1] * SPIN_SIGN[s2])
            term = number_pair(spec.mode(i, s1, o1), spec.mode(j, s2, o2))
            pieces.append((w, jordan_wigner([term], spec.n_modes)))
    return pieces


def encode_observable(obs: ObservableSpec, spec: HubbardSpec) -> PauliOperatorSum:
    """Encode an observable as a Pauli sum under the package mode ordering.

    ``lesser_green`` encodes the annihilation operator ``c_{k s}``; use
    :func:`lesser_green_pair` for the ``(c^dag_k, c_k)`` pair of the correlator.
    Staggered magnetization is the lattice-global sum with sign ``(-1)^(x+y)``.
    """
    kind = obs.kind
    n = spec.n_modes
    if kind in ("density", "magnetization"):
        _check_sites(obs, spec, 1)
        return _site_density(spec, obs.sites[0], signed=kind == "magnetization")
    if kind == "staggered_magnetization":
        op = PauliOperatorSum(n)
        for site in range(spec.n_sites):
            x, y = spec.coords(site)
            op = op + _site_density(spec, site, signed=True) * (-1) ** (x + y)
        return op
    if kind in ("density_corr", "magnetization_corr"):
        op = PauliOperatorSum(n)
        for w, piece in projector_pieces(obs, spec):
            op = op + piece * w
        return op
    if kind in ("annihilation", "creation"):
        _check_sites(obs, spec, 1)
        mode = spec.mode(obs.sites[0], obs.spin, obs.orbital)
        return _ladder(mode, kind == "creation", n)
    if kind == "lesser_green":
        return momentum_ladder(spec, obs.momentum, obs.spin, creation=False, orbital=obs.orbital)
    # pair_gap: c+_{k up} c+_{-k dn} c_{-k dn} c_{k up} = n_{k up} n_{-k dn}
    op = PauliOperatorSum(n)
    for mx in range(spec.nx):
        for my in range(spec.ny):
            kx, ky = 2 * math.pi * mx / spec.nx, 2 * math.pi * my / spec.ny
            phi = form_factor(obs.form_factor, kx, ky)
            if abs(phi) < MERGE_TOL:
                continue
            neg = ((-mx) % spec.nx, (-my) % spec.ny)
            n_up = momentum_ladder(spec, (mx, my), UP, True, obs.orbital) * momentum_ladder(
                spec, (mx, my), UP, False, obs.orbital
            )
            n_dn = momentum_ladder(spec, neg, DOWN, True, obs.orbital) * momentum_ladder(
                spec, neg, DOWN, False, obs.orbital
            )
            op = op + (n_up * n_dn) * phi
    return op


def lesser_green_pair(obs: ObservableSpec, spec: HubbardSpec) -> tuple[PauliOperatorSum, PauliOperatorSum]:
    """``(A, B) = (c^dag_{k s}, c_{k s})`` so that ``G^<_k(t) = i <A(t) B>``."""
    if obs.kind != "lesser_green":
        raise SpecificationError("lesser_green_pair needs a lesser_green observable")
    c = encode_observable(obs, spec)
    return c.adjoint(), c


def encoding_summary(spec: HubbardSpec, op: PauliOperatorSum | None = None) -> dict:
    """Counts reported by the ``encode`` command."""
    terms = build_hamiltonian(spec)
    if op is None:
        op = jordan_wigner(terms, spec.n_modes)
    kinds = {"hopping": 0, "onsite_U": 0, "chemical_potential": 0, "multi_orbital": 0}
    spin_offset = spec.n_sites * spec.orbitals
    for t in terms:
        modes = [m for m, _ in t.ops]
        if len(modes) == 2:
            kinds["hopping" if modes[0] != modes[1] else "chemical_potential"] += 1
        elif modes[0] == modes[1] and modes[2] == modes[3] and modes[2] - modes[0] == spin_offset:
            kinds["onsite_U"] += 1
        else:
            kinds["multi_orbital"] += 1
    return {
        "spec": spec.to_dict(),
        "qubits": spec.n_modes,
        "sites": spec.n_sites,
        "edges": len(spec.edges()),
        "fermion_terms": kinds,
        "L": op.term_count,
        "alpha": op.alpha,
        "identity_offset": op.identity_coefficient.real,
        "hermitian": op.is_hermitian(),
    }
