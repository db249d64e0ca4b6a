"""Analytic physical-layer model of a two-fridge measurement-based machine.

Every constant here is a configurable default, not a measured value. The model
turns a logical T count into a surface-code distance, a qubit allocation
(factories versus everything else, the "bus") and a runtime split between T
supply, intermodule Bell-pair traffic and intramodule graph-state work.
"""

from __future__ import annotations

import csv
import math
from dataclasses import asdict, dataclass, field, replace
from pathlib import Path
from typing import Iterable, Sequence

from hubbard_qre.errors import InfeasibleLayoutError, SpecificationError
from hubbard_qre.logical import (
    REFERENCE_SHOTS,
    BlockEncodingModel,
    dynamic_circuit_params,
    dynamic_t_count,
    logical_qubits,
    split_budget,
)
from hubbard_qre.model import HubbardSpec, encode_hamiltonian

MIN_DISTANCE = 3
SWEEP_COLUMNS = (
    "lattice",
    "bus_qubits",
    "runtime_s",
    "share_T",
    "share_inter",
    "share_intra",
    "factory_qubits",
    "logical_qubits",
    "T_count",
)


@dataclass(frozen=True)
class FactoryRecipe:
    """Two-level 15-to-1 distillation block."""

    states_per_round: int = 1
    round_cycles: int = 110
    footprint_qubits: int = 20_000
    output_error: float = 1e-15


@dataclass(frozen=True)
class ArchitectureConfig:
    physical_error_rate: float = 1e-3
    threshold: float = 1e-2
    prefactor: float = 0.1
    cycle_time: float = 1e-6
    qubits_per_fridge: int = 1_000_000
    fridges: int = 2
    factory: FactoryRecipe = field(default_factory=FactoryRecipe)
    bell_pair_rate: float = 1e6
    bell_pair_fidelity: float = 0.99
    routing_factor: float = 1.0
    injection_cycles: int = 1

    def __post_init__(self):
        if not 0 < self.physical_error_rate:
            raise SpecificationError("physical error rate must be positive")
        for name in ("threshold", "prefactor", "cycle_time", "bell_pair_rate", "routing_factor"):
            if not getattr(self, name) > 0:
                raise SpecificationError(f"{name} must be positive")
        if self.qubits_per_fridge < 1 or self.fridges < 1:
            raise SpecificationError("need at least one fridge with at least one qubit")
        if not 0 < self.bell_pair_fidelity <= 1:
            raise SpecificationError("Bell-pair fidelity must lie in (0, 1]")
        f = self.factory
        if f.states_per_round < 1 or f.round_cycles < 1 or f.footprint_qubits < 1:
            raise SpecificationError("factory recipe needs positive output, latency and footprint")

    @property
    def capacity(self) -> int:
        return self.qubits_per_fridge * self.fridges

    @property
    def factory_rate(self) -> float:
        """T states per second from one factory."""
        f = self.factory
        return f.states_per_round / (f.round_cycles * self.cycle_time)

    @classmethod
    def from_dict(cls, data: dict) -> "ArchitectureConfig":
        data = dict(data)
        if "factory" in data:
            data["factory"] = FactoryRecipe(**data["factory"])
        unknown = set(data) - set(cls.__dataclass_fields__)
        if unknown:
            raise SpecificationError(f"unknown architecture keys: {sorted(unknown)}")
        return cls(**data)

    def to_dict(self) -> dict:
        return asdict(self)


def code_distance(budget: float, config: ArchitectureConfig) -> int:
    """Smallest odd ``d >= 3`` with ``A (p / p_th)^((d + 1) / 2) <= budget``."""
    if not 0 < budget < 1:
        raise SpecificationError(f"per-operation error budget must lie in (0, 1), got {budget!r}")
    ratio = config.physical_error_rate / config.threshold
    if ratio >= 1:
        raise SpecificationError("physical error rate at or above threshold: no distance suffices")
    if config.prefactor <= budget:
        return MIN_DISTANCE
    k = math.log(budget / config.prefactor) / math.log(ratio)
    k = round(k) if abs(k - round(k)) < 1e-9 else math.ceil(k)
    return max(MIN_DISTANCE, 2 * k - 1)


@dataclass(frozen=True)
class PhysicalLayout:
    distance: int
    logical_qubits: int
    bus_qubits: int
    factory_qubits: int
    factory_count: int
    capacity: int

    @property
    def spare_qubits(self) -> int:
        return self.capacity - self.bus_qubits - self.factory_qubits


def bus_qubits(n_logical: int, distance: int, config: ArchitectureConfig) -> int:
    """Data patches plus routing ancillas: ``2 (d + 1)^2`` per logical qubit, times the routing factor."""
    return math.ceil(n_logical * 2 * (distance + 1) ** 2 * config.routing_factor)


def provision_layout(
    n_logical: int, t_demand: float, config: ArchitectureConfig, distance: int
) -> PhysicalLayout:
    """Size factories for a steady T demand (states per second); everything else is bus.

    Raises ``InfeasibleLayoutError`` carrying the qubit shortfall when the
    allocation does not fit in the machine.
    """
    if n_logical < 0 or distance < MIN_DISTANCE or distance % 2 == 0:
        raise SpecificationError("need non-negative logical qubits and an odd distance >= 3")
    if not math.isfinite(t_demand) or t_demand < 0:
        raise SpecificationError(f"T demand must be finite and non-negative, got {t_demand!r}")
    ratio = t_demand / config.factory_rate
    count = round(ratio) if abs(ratio - round(ratio)) < 1e-9 else math.ceil(ratio)
    if t_demand > 0:
        count = max(count, 1)
    factory = count * config.factory.footprint_qubits
    bus = bus_qubits(n_logical, distance, config)
    need = bus + factory
    if need > config.capacity:
        raise InfeasibleLayoutError(
            f"layout needs {need} physical qubits, capacity is {config.capacity}", need - config.capacity
        )
    return PhysicalLayout(distance, n_logical, bus, factory, count, config.capacity)


@dataclass(frozen=True)
class WidgetStream:
    """How the logical circuit is cut into graph-state widgets.

    ``t_per_widget`` T gates are consumed per widget, ``t_width`` of them in
    parallel per logical time step (``d`` code cycles).
    """

    t_per_widget: int = 1000
    t_width: int = 4

    def __post_init__(self):
        if self.t_per_widget < 1 or self.t_width < 1:
            raise SpecificationError("widget stream parameters must be positive")


@dataclass(frozen=True)
class RuntimeBreakdown:
    total_seconds: float
    shares: dict
    widget_seconds: float
    widgets_per_circuit: int
    components: dict

    def to_dict(self) -> dict:
        return asdict(self)


def t_demand(stream: WidgetStream, distance: int, config: ArchitectureConfig) -> float:
    """Steady T states per second needed to keep ``t_width`` injections per logical step."""
    return stream.t_width / (distance * config.cycle_time)


def runtime_breakdown(
    per_circuit_T: int, shots: int, layout: PhysicalLayout, stream: WidgetStream, config: ArchitectureConfig
) -> RuntimeBreakdown:
    """Per-widget time is the slowest of three supplies; the total covers every shot.

    * intramodule: graph-state preparation and measurement, overlapped when two
      fridges alternate, sequential with one;
    * T supply: distillation throughput plus an injection floor;
    * intermodule: Bell pairs (``d`` per logical qubit) handed between fridges.
    """
    d = layout.distance
    step = d * config.cycle_time
    widgets = math.ceil(per_circuit_T / stream.t_per_widget) if per_circuit_T else 0
    layers = math.ceil(stream.t_per_widget / stream.t_width)
    prep = consume = layers * step
    intra = max(prep, consume) if config.fridges > 1 else prep + consume
    injection = layers * config.injection_cycles * config.cycle_time
    if layout.factory_count:
        distill = stream.t_per_widget / (layout.factory_count * config.factory_rate)
    else:
        distill = 0.0 if per_circuit_T == 0 else math.inf
    t_supply = distill + injection
    if config.fridges > 1:
        pairs = layout.logical_qubits * d / config.bell_pair_fidelity
        inter = pairs / config.bell_pair_rate
    else:
        inter = 0.0
    parts = {"t_distillation_injection": t_supply, "intermodule": inter, "intramodule": intra}
    widget = max(parts.values())
    norm = sum(parts.values())
    shares = {k: v / norm for k, v in parts.items()}
    return RuntimeBreakdown(shots * widgets * widget, shares, widget, widgets, parts)


def per_operation_budget(delta_data: float, shots: int, n_logical: int, per_circuit_T: int) -> float:
    """Uniform split of the data-error budget over every logical qubit-step of every shot."""
    volume = shots * n_logical * max(per_circuit_T, 1)
    return delta_data / volume


@dataclass(frozen=True)
class PhysicalEstimate:
    lattice: str
    logical_qubits: int
    T_count: int
    per_circuit_T: int
    layout: PhysicalLayout
    runtime: RuntimeBreakdown

    def row(self) -> dict:
        s = self.runtime.shares
        return {
            "lattice": self.lattice,
            "bus_qubits": self.layout.bus_qubits,
            "runtime_s": self.runtime.total_seconds,
            "share_T": s["t_distillation_injection"],
            "share_inter": s["intermodule"],
            "share_intra": s["intramodule"],
            "factory_qubits": self.layout.factory_qubits,
            "logical_qubits": self.logical_qubits,
            "T_count": self.T_count,
        }


def estimate_lattice(
    spec: HubbardSpec,
    t: float = 1.0,
    epsilon: float = 0.01,
    delta: float = 0.001,
    shots: int | None = REFERENCE_SHOTS,
    config: ArchitectureConfig | None = None,
    stream: WidgetStream | None = None,
    be_model: BlockEncodingModel | None = None,
) -> PhysicalEstimate:
    """Physical estimate for the time-evolution part of one dynamic-correlation value."""
    config = config or ArchitectureConfig()
    stream = stream or WidgetStream()
    model = encode_hamiltonian(spec)
    budget = split_budget(delta, epsilon)
    params = dynamic_circuit_params(epsilon, delta, shots)
    tc = dynamic_t_count(model, t, params, budget.delta_syn, be_model)
    n_log = logical_qubits(model)
    d = code_distance(per_operation_budget(budget.delta_data, params.shots, n_log, tc.per_circuit_T), config)
    layout = provision_layout(n_log, t_demand(stream, d, config), config, d)
    runtime = runtime_breakdown(tc.per_circuit_T, params.shots, layout, stream, config)
    return PhysicalEstimate(f"{spec.nx}x{spec.ny}", n_log, tc.total_T, tc.per_circuit_T, layout, runtime)


def lattice_sweep(
    sizes: Iterable[int] = range(2, 8), base: HubbardSpec | None = None, **kwargs
) -> list[PhysicalEstimate]:
    """Square lattices ``n x n`` sharing every other parameter of ``base``."""
    base = base or HubbardSpec(nx=2, ny=2)
    return [estimate_lattice(replace(base, nx=n, ny=n), **kwargs) for n in sizes]


def write_sweep_csv(estimates: Sequence[PhysicalEstimate], path: str | Path):
    with open(path, "w", newline="") as fh:
        writer = csv.DictWriter(fh, fieldnames=SWEEP_COLUMNS)
        writer.writeheader()
        for est in estimates:
            writer.writerow(est.row())
