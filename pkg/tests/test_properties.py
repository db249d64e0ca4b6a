from __future__ import annotations

import json

import numpy as np
from hypothesis import given, settings
from hypothesis import strategies as st

from hubbard_qre.model import FermionTerm, HubbardSpec, build_hamiltonian, encode_hamiltonian, jordan_wigner
from hubbard_qre.oracle import occupation_numbers, realize_dense

couplings = st.floats(min_value=-3.0, max_value=3.0, allow_nan=False).map(lambda v: round(v, 3))


@st.composite
def small_specs(draw):
    """Instances with at most 8 modes, single- or two-orbital."""
    orbitals = draw(st.sampled_from([1, 2]))
    max_sites = 4 // orbitals
    nx = draw(st.integers(1, max_sites))
    ny = draw(st.integers(1, max_sites // nx))
    kwargs = {"U": draw(couplings), "mu": draw(couplings), "V_nn": draw(couplings)}
    if orbitals == 2:
        kwargs |= {"U_prime": draw(couplings), "J": draw(couplings), "J_prime": draw(couplings)}
        if draw(st.booleans()):
            kwargs["orbital_hopping"] = ((0, 1, draw(couplings)),)
    boundary = draw(st.sampled_from(["open", "periodic"]))
    return HubbardSpec(nx=nx, ny=ny, orbitals=orbitals, boundary=boundary, **kwargs)


@settings(max_examples=40, deadline=None)
@given(small_specs())
def test_encoded_hamiltonian_is_hermitian(spec):
    op = encode_hamiltonian(spec)
    assert op.is_hermitian()
    m = realize_dense(op).matrix
    assert np.max(np.abs(m - m.conj().T), initial=0.0) < 1e-12


@settings(max_examples=40, deadline=None)
@given(small_specs())
def test_hamiltonian_conserves_particle_number(spec):
    h = realize_dense(encode_hamiltonian(spec)).matrix
    n = np.diag(occupation_numbers(spec.n_modes)).astype(float)
    assert np.max(np.abs(h @ n - n @ h), initial=0.0) < 1e-12


@settings(max_examples=40, deadline=None)
@given(small_specs(), st.randoms(use_true_random=False))
def test_alpha_invariant_under_mode_relabeling(spec, rnd):
    perm = list(range(spec.n_modes))
    rnd.shuffle(perm)
    terms = build_hamiltonian(spec)
    relabeled = [FermionTerm(tuple((perm[m], d) for m, d in t.ops), t.coeff) for t in terms]
    a = jordan_wigner(terms, spec.n_modes)
    b = jordan_wigner(relabeled, spec.n_modes)
    assert abs(a.alpha - b.alpha) <= 1e-9 * max(1.0, a.alpha)
    # spectra agree too: relabeling is a unitary change of basis
    ea = np.linalg.eigvalsh(realize_dense(a).matrix)
    eb = np.linalg.eigvalsh(realize_dense(b).matrix)
    np.testing.assert_allclose(ea, eb, atol=1e-9)


@settings(max_examples=20, deadline=None)
@given(small_specs())
def test_encoding_rerun_byte_identical(spec):
    first = json.dumps(encode_hamiltonian(spec).to_records())
    second = json.dumps(encode_hamiltonian(spec).to_records())
    assert first == second


@settings(max_examples=30, deadline=None)
@given(small_specs())
def test_alpha_bounds_spectral_norm(spec):
    op = encode_hamiltonian(spec)
    m = realize_dense(op).matrix - op.identity_coefficient.real * np.eye(2**spec.n_modes)
    assert np.linalg.norm(m, 2) <= op.alpha + 1e-9
