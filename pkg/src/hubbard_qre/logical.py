"""Closed-form logical costs: amplitude estimation, ground-state preparation, QSP and T counts."""

from __future__ import annotations

import math
from dataclasses import asdict, dataclass, field
from typing import Callable

from hubbard_qre.errors import ContractViolation, SpecificationError
from hubbard_qre.model import PauliOperatorSum

# Reference per-circuit shot count for the dynamic-correlation estimates (eps=0.01,
# delta=0.001). It does not follow from the iterate formula; kept as a reference input.
REFERENCE_SHOTS = 671
U_T_PER_GROVER_ITERATE = 4


def _ceil(x: float) -> int:
    """Ceiling that ignores floating-point noise just above an integer."""
    r = round(x)
    if abs(x - r) <= 1e-12 * max(1.0, abs(x)):
        return int(r)
    return math.ceil(x)


def _positive(**values):
    for name, v in values.items():
        if not v > 0:
            raise SpecificationError(f"{name} must be positive, got {v!r}")


@dataclass(frozen=True)
class AccuracyBudget:
    """Even split of an overall failure tolerance.

    Statistical and circuit failure get half each; the circuit half is shared
    equally by ground-state preparation, rotation synthesis, distillation and
    data errors.
    """

    delta_bar: float
    delta_S: float
    delta_C: float
    delta_gs: float
    delta_syn: float
    delta_dist: float
    delta_data: float
    epsilon: float | None = None


def split_budget(delta_bar: float, epsilon: float | None = None) -> AccuracyBudget:
    if not 0 < delta_bar < 1:
        raise SpecificationError(f"overall failure tolerance must lie in (0, 1), got {delta_bar!r}")
    half = delta_bar / 2
    eighth = delta_bar / 8
    return AccuracyBudget(delta_bar, half, half, eighth, eighth, eighth, eighth, epsilon)


@dataclass(frozen=True)
class AmplitudeEstimationCost:
    iterates_per_circuit: int
    total_iterates: int
    shots: int
    per_circuit_failure: float
    total_iterates_formula: float
    outer_log: str


def total_grover_iterates(epsilon: float, delta_S: float, outer_log: str = "e") -> float:
    """``(50 / eps) * log((2 / delta_S) * log2(pi / (4 eps)))``.

    ``outer_log`` selects the base of the outer logarithm: ``"e"`` or ``"2"``.
    """
    inner = (2 / delta_S) * math.log2(math.pi / (4 * epsilon))
    if outer_log == "e":
        return 50 / epsilon * math.log(inner)
    if outer_log == "2":
        return 50 / epsilon * math.log2(inner)
    raise SpecificationError(f"outer_log must be 'e' or '2', got {outer_log!r}")


def grover_iterates_per_circuit(epsilon: float) -> int:
    return math.floor(math.pi / (8 * epsilon))


def amplitude_estimation_cost(
    epsilon: float, delta_S: float, outer_log: str = "e", circuit_budget: float | None = None
) -> AmplitudeEstimationCost:
    """Iterative amplitude estimation counts.

    ``per_circuit_failure`` spreads ``circuit_budget`` (default ``delta_S``) over the shots.
    """
    if not 0 < epsilon < 0.5:
        raise SpecificationError(f"epsilon must lie in (0, 1/2), got {epsilon!r}")
    if not 0 < delta_S < 1:
        raise SpecificationError(f"delta_S must lie in (0, 1), got {delta_S!r}")
    raw = total_grover_iterates(epsilon, delta_S, outer_log)
    per_circuit = grover_iterates_per_circuit(epsilon)
    total = _ceil(raw)
    shots = math.ceil(total / per_circuit)
    budget = delta_S if circuit_budget is None else circuit_budget
    return AmplitudeEstimationCost(per_circuit, total, shots, budget / shots, raw, outer_log)


def per_circuit_failure(shots: int, delta: float) -> float:
    if shots < 1:
        raise SpecificationError("shots must be at least 1")
    return delta / shots


def round_sig(x: float, digits: int) -> float:
    if x == 0:
        return 0.0
    return round(x, digits - 1 - math.floor(math.log10(abs(x))))


@dataclass(frozen=True)
class QSPChain:
    p_qsp: float
    epsilon_qsp: float


def qsp_success_chain(per_circuit_failure: float, U_t_per_circuit: int) -> QSPChain:
    """Smallest per-invocation success ``p`` with ``p**n >= 1 - f`` and ``eps_qsp = (1 - p) / 2``."""
    if per_circuit_failure < 0 or U_t_per_circuit < 1:
        raise SpecificationError("need per_circuit_failure >= 0 and U_t_per_circuit >= 1")
    log_p = math.log1p(-per_circuit_failure) / U_t_per_circuit
    return QSPChain(math.exp(log_p), -math.expm1(log_p) / 2)


@dataclass(frozen=True)
class DynamicCircuitParams:
    shots: int
    U_t_per_circuit: int
    grover_iterates_per_circuit: int
    per_circuit_failure: float
    per_circuit_failure_exact: float
    p_qsp: float
    epsilon_qsp: float
    formula_shots: int
    shots_source: str


def dynamic_circuit_params(
    epsilon: float = 0.01,
    delta: float = 0.001,
    shots: int | None = REFERENCE_SHOTS,
    failure_sig_figs: int | None = 2,
    outer_log: str = "e",
) -> DynamicCircuitParams:
    """Circuit parameters for estimating one ``Re g(t)`` or ``Im g(t)``.

    ``shots=None`` uses the iterate formula with ``delta_S = delta / 2``; an integer
    (default: the reference value 671) is taken as given, and the formula value is still
    reported. The per-circuit failure ``delta / shots`` is rounded to
    ``failure_sig_figs`` significant figures before it feeds the QSP chain, as in
    the reference parameter set; ``None`` keeps the exact ratio.
    """
    budget = split_budget(delta, epsilon)
    ae = amplitude_estimation_cost(epsilon, budget.delta_S, outer_log)
    n_shots = ae.shots if shots is None else int(shots)
    exact = per_circuit_failure(n_shots, delta)
    used = exact if failure_sig_figs is None else round_sig(exact, failure_sig_figs)
    n_u = U_T_PER_GROVER_ITERATE * ae.iterates_per_circuit
    chain = qsp_success_chain(used, n_u)
    return DynamicCircuitParams(
        n_shots,
        n_u,
        ae.iterates_per_circuit,
        used,
        exact,
        chain.p_qsp,
        chain.epsilon_qsp,
        ae.shots,
        "formula" if shots is None else "given",
    )


@dataclass(frozen=True)
class GSPCost:
    alpha: float
    gamma: float
    Delta: float
    C: float
    delta_gs: float
    queries_to_UH: int
    queries_raw: float
    queries_per_circuit: int | None = None


def gsp_queries(
    alpha: float, gamma: float, Delta: float, delta_gs: float, C: float = 1.0, epsilon: float | None = None
) -> GSPCost:
    """Block-encoding queries for ground-state preparation, ``C a / (g D) ln(1 / (g d_gs))``.

    With ``epsilon`` given, also the per-circuit maximum, which multiplies by ``pi / (4 eps)``.
    """
    _positive(alpha=alpha, gamma=gamma, Delta=Delta, delta_gs=delta_gs, C=C)
    if gamma > 1:
        raise ContractViolation(f"overlap bound gamma must not exceed 1, got {gamma!r}")
    raw = C * alpha / (gamma * Delta) * math.log(1 / (gamma * delta_gs))
    per_circuit = None
    if epsilon is not None:
        _positive(epsilon=epsilon)
        per_circuit = _ceil(math.pi / (4 * epsilon) * raw)
    return GSPCost(alpha, gamma, Delta, C, delta_gs, _ceil(raw), raw, per_circuit)


@dataclass(frozen=True)
class TCountReport:
    T_H: int
    T_0: int
    per_circuit_T: int
    total_T: int
    qsp_degree: int | None = None
    rotation_T: int | None = None
    per_U_t: int | None = None

    def to_dict(self) -> dict:
        return asdict(self)


def static_t_count(
    alpha: float,
    gamma: float,
    Delta: float,
    epsilon: float,
    delta_bar: float,
    T_H: float | Callable[[float], float],
    T_0: float,
    C: float = 1.0,
) -> TCountReport:
    """T counts for one static-correlation amplitude-estimation task.

    ``T_H`` is either a number (already evaluated at ``delta_bar / 8``) or a
    callable of the synthesis tolerance.
    """
    _positive(alpha=alpha, gamma=gamma, Delta=Delta, epsilon=epsilon)
    budget = split_budget(delta_bar, epsilon)
    t_h = T_H(budget.delta_syn) if callable(T_H) else T_H
    per_query = 2 * t_h + T_0
    scale = C * alpha / (gamma * Delta * epsilon)
    per_circuit = math.pi * scale / 8 * math.log(1 / (gamma * budget.delta_gs)) * per_query
    total = (
        50
        * scale
        * math.log((4 / delta_bar) * math.log2(math.pi / (4 * epsilon)))
        * math.log(8 / (gamma * delta_bar))
        * per_query
    )
    return TCountReport(_ceil(t_h), _ceil(T_0), _ceil(per_circuit), _ceil(total))


def amplitude_estimation_tasks(n_sites: int) -> int:
    """Four spin combinations for each of the ``N(N-1)/2`` site pairs."""
    return 2 * n_sites * (n_sites - 1)


def qsp_degree(alpha: float, t: float, epsilon_qsp: float, max_degree: int = 10**7) -> int:
    """Polynomial degree for ``exp(-iHt)`` to precision ``epsilon_qsp``.

    Smallest ``d`` with ``(e * a|t| / (2 d))**d <= eps``. For ``a|t| < 1`` the
    result is additionally capped at ``ceil(ln(1 / eps))``.
    """
    if not 0 < epsilon_qsp < 1:
        raise ContractViolation(f"epsilon_qsp must lie in (0, 1), got {epsilon_qsp!r}")
    x = abs(alpha * t)
    if x == 0:
        return 0
    log_eps = math.log(epsilon_qsp)
    d = max(1, math.floor(math.e * x / 2))
    # the bound is not monotone below d = e x / 2; start the upward scan there
    while d * math.log(math.e * x / (2 * d)) > log_eps:
        d += 1
        if d > max_degree:
            raise ContractViolation("QSP degree search exceeded max_degree")
    if x < 1:
        d = min(d, math.ceil(-log_eps))
    return d


@dataclass
class BlockEncodingModel:
    """T-gate model of a select/prepare block encoding of an ``L``-term Pauli sum.

    Select costs ``select_t_per_term * L``; prepare uses ``prepare_rotation_factor *
    ceil(log2 L)`` rotations, each synthesized with
    ``ceil(synthesis_slope * log2(1 / delta)) + synthesis_offset`` T gates.
    """

    select_t_per_term: int = 4
    prepare_rotation_factor: int = 2
    synthesis_slope: float = 1.15
    synthesis_offset: int = 9
    reflection_t_per_qubit: int = 4

    def rotation_t(self, delta_syn: float) -> int:
        _positive(delta_syn=delta_syn)
        return math.ceil(self.synthesis_slope * math.log2(1 / delta_syn)) + self.synthesis_offset

    def t_h(self, n_terms: int, delta_syn: float) -> int:
        if n_terms == 0:
            return 0
        rotations = self.prepare_rotation_factor * math.ceil(math.log2(n_terms))
        return self.select_t_per_term * n_terms + rotations * self.rotation_t(delta_syn)

    def t_0(self, n_qubits: int) -> int:
        """Reflection about the all-zeros state on ``n_qubits`` qubits."""
        return self.reflection_t_per_qubit * max(n_qubits - 1, 0)


def logical_qubits(model: PauliOperatorSum) -> int:
    """System qubits plus prepare register, select control, QSP and estimation ancillas."""
    L = model.term_count
    return model.n_qubits + (math.ceil(math.log2(L)) if L > 1 else 0) + 3


def dynamic_t_count(
    model: PauliOperatorSum,
    t: float,
    params: DynamicCircuitParams,
    delta_syn: float,
    be_model: BlockEncodingModel | None = None,
) -> TCountReport:
    """T counts for the time-evolution part of one dynamic-correlation estimate.

    Each ``U(t)`` is a degree-``d`` QSP sequence: ``d`` block-encoding queries and
    ``d`` synthesized phase rotations. State preparation and controlled Paulis
    are not counted; ``T_0`` is reported for reference only.
    """
    be_model = be_model or BlockEncodingModel()
    d = qsp_degree(model.alpha, t, params.epsilon_qsp)
    t_h = be_model.t_h(model.term_count, delta_syn)
    rot = be_model.rotation_t(delta_syn) if d else 0
    per_u = d * (t_h + rot)
    per_circuit = params.U_t_per_circuit * per_u
    return TCountReport(
        t_h,
        be_model.t_0(logical_qubits(model)),
        per_circuit,
        params.shots * per_circuit,
        qsp_degree=d,
        rotation_T=rot,
        per_U_t=per_u,
    )


def dynamic_cost_report(
    model: PauliOperatorSum,
    t: float,
    epsilon: float = 0.01,
    delta: float = 0.001,
    shots: int | None = REFERENCE_SHOTS,
    failure_sig_figs: int | None = 2,
    be_model: BlockEncodingModel | None = None,
) -> dict:
    """All intermediates of the dynamic-correlation logical cost, JSON-ready."""
    budget = split_budget(delta, epsilon)
    params = dynamic_circuit_params(epsilon, delta, shots, failure_sig_figs)
    ae = {log: amplitude_estimation_cost(epsilon, budget.delta_S, log) for log in ("e", "2")}
    tc = dynamic_t_count(model, t, params, budget.delta_syn, be_model)
    return {
        "inputs": {"epsilon": epsilon, "delta": delta, "t": t, "shots": shots, "failure_sig_figs": failure_sig_figs},
        "budget": asdict(budget),
        "amplitude_estimation": {log: asdict(v) for log, v in ae.items()},
        "circuit": asdict(params),
        "model": {"qubits": model.n_qubits, "L": model.term_count, "alpha": model.alpha},
        "logical_qubits": logical_qubits(model),
        "t_count": tc.to_dict(),
    }
