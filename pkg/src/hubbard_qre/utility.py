"""Monte Carlo model of the economic value of a fault-tolerant Hubbard solver.

Money is in millions of dollars per year for the savings pools and in billions
of dollars of present value for the aggregated stages.
"""

from __future__ import annotations

import csv
import json
import math
from dataclasses import asdict, dataclass, field, fields, replace
from pathlib import Path

import numpy as np

from hubbard_qre.errors import SpecificationError

FAMILIES = ("beta", "lognormal", "normal", "uniform", "bernoulli", "point")
STAGES = ("s23", "s45_no_sc", "s45_with_sc")
DEFAULT_QUANTILES = (0.1, 0.5, 0.9)

# independent random streams per model term
_STREAM = {
    "hpc": 1,
    "personnel": 2,
    "guidance": 3,
    "exists": 4,
    "discovery": 5,
    "acceleration": 6,
    "transmission": 7,
}


@dataclass(frozen=True)
class DistributionSpec:
    family: str
    params: tuple[float, ...]

    def __post_init__(self):
        object.__setattr__(self, "params", tuple(float(p) for p in self.params))
        p = self.params
        arity = {"beta": 2, "lognormal": 2, "normal": 2, "uniform": 2, "bernoulli": 1, "point": 1}
        if self.family not in arity:
            raise SpecificationError(f"unknown distribution family {self.family!r}; expected one of {FAMILIES}")
        if len(p) != arity[self.family]:
            raise SpecificationError(f"{self.family} takes {arity[self.family]} parameters, got {len(p)}")
        if not all(math.isfinite(v) for v in p):
            raise SpecificationError(f"{self.family} parameters must be finite")
        bad = (
            (self.family == "beta" and min(p) <= 0)
            or (self.family in ("lognormal", "normal") and p[1] <= 0)
            or (self.family == "uniform" and p[1] < p[0])
            or (self.family == "bernoulli" and not 0 <= p[0] <= 1)
        )
        if bad:
            raise SpecificationError(f"parameters {p} outside the domain of {self.family}")

    @property
    def mean(self) -> float:
        p = self.params
        return {
            "beta": lambda: p[0] / (p[0] + p[1]),
            "lognormal": lambda: math.exp(p[0] + p[1] ** 2 / 2),
            "normal": lambda: p[0],
            "uniform": lambda: (p[0] + p[1]) / 2,
            "bernoulli": lambda: p[0],
            "point": lambda: p[0],
        }[self.family]()

    def to_dict(self) -> dict:
        return {"family": self.family, "params": list(self.params)}

    @classmethod
    def from_dict(cls, data) -> "DistributionSpec":
        if isinstance(data, DistributionSpec):
            return data
        return cls(data["family"], tuple(data["params"]))


def Beta(a, b):
    return DistributionSpec("beta", (a, b))


def LogNormal(mu, sigma):
    return DistributionSpec("lognormal", (mu, sigma))


def Normal(mu, sigma):
    return DistributionSpec("normal", (mu, sigma))


def Uniform(lo, hi):
    return DistributionSpec("uniform", (lo, hi))


def Bernoulli(p):
    return DistributionSpec("bernoulli", (p,))


def PointMass(v):
    return DistributionSpec("point", (v,))


def _rng(seed) -> np.random.Generator:
    return np.random.default_rng(seed)


def sample(dist: DistributionSpec, n: int, seed) -> np.ndarray:
    """``n`` draws of ``dist``; identical ``seed`` gives identical arrays."""
    if n < 1:
        raise SpecificationError("need at least one sample")
    rng = _rng(seed)
    p = dist.params
    if dist.family == "beta":
        return rng.beta(p[0], p[1], n)
    if dist.family == "lognormal":
        return rng.lognormal(p[0], p[1], n)
    if dist.family == "normal":
        return rng.normal(p[0], p[1], n)
    if dist.family == "uniform":
        return rng.uniform(p[0], p[1], n)
    if dist.family == "bernoulli":
        return (rng.random(n) < p[0]).astype(float)
    return np.full(n, p[0])


@dataclass(frozen=True)
class EconomicConstants:
    hpc_pool: float = 589.0
    energy_hpc: float = 2.05
    carbon_hpc: float = 1.56
    experiment_pool: float = 817.0
    knowledge_fixed: float = 1.3
    personnel: float = 20.5
    discount: float = 0.05
    science_multiplier: float = 5.0
    solver_year_offset: float = 10.0
    sc_exist_p: float = 0.8
    hpc_fraction: DistributionSpec = field(default_factory=lambda: Beta(2, 8))
    personnel_gain: DistributionSpec = field(default_factory=lambda: Beta(1, 4))
    guidance_fraction: DistributionSpec = field(default_factory=lambda: Beta(1, 99))
    discovery_year: DistributionSpec = field(default_factory=lambda: LogNormal(3.5, 1))
    acceleration: DistributionSpec = field(default_factory=lambda: Beta(2, 4))
    transmission: DistributionSpec = field(default_factory=lambda: Uniform(4000, 8000))

    def __post_init__(self):
        for f in fields(self):
            v = getattr(self, f.name)
            if isinstance(v, DistributionSpec):
                continue
            if not (math.isfinite(v) and v >= 0):
                raise SpecificationError(f"{f.name} must be finite and non-negative, got {v!r}")
        if not 0 < self.discount < 1:
            raise SpecificationError(f"discount rate must lie in (0, 1), got {self.discount!r}")
        if not 0 <= self.sc_exist_p <= 1:
            raise SpecificationError("existence probability must lie in [0, 1]")

    @property
    def personnel_base(self) -> float:
        return self.knowledge_fixed + self.personnel

    def to_dict(self) -> dict:
        return {
            f.name: (v.to_dict() if isinstance(v := getattr(self, f.name), DistributionSpec) else v)
            for f in fields(self)
        }

    @classmethod
    def from_dict(cls, data: dict) -> "EconomicConstants":
        known = {f.name: f for f in fields(cls)}
        unknown = set(data) - set(known)
        if unknown:
            raise SpecificationError(f"unknown economic constants: {sorted(unknown)}")
        kwargs = {}
        for k, v in data.items():
            default = getattr(cls(), k)
            kwargs[k] = DistributionSpec.from_dict(v) if isinstance(default, DistributionSpec) else float(v)
        return cls(**kwargs)

    @classmethod
    def from_json(cls, path: str | Path) -> "EconomicConstants":
        with open(path) as fh:
            return cls.from_dict(json.load(fh))


def _draw(c: EconomicConstants, name: str, n: int, seed: int) -> np.ndarray:
    return sample(getattr(c, _ATTR[name]), n, [seed, _STREAM[name]])


_ATTR = {
    "hpc": "hpc_fraction",
    "personnel": "personnel_gain",
    "guidance": "guidance_fraction",
    "discovery": "discovery_year",
    "acceleration": "acceleration",
    "transmission": "transmission",
}


def hpc_savings(c: EconomicConstants, seed: int, n: int) -> np.ndarray:
    return _draw(c, "hpc", n, seed) * c.hpc_pool


def personnel_savings(c: EconomicConstants, seed: int, n: int) -> np.ndarray:
    return c.personnel_base * _draw(c, "personnel", n, seed)


def guidance_savings(c: EconomicConstants, seed: int, n: int) -> np.ndarray:
    return _draw(c, "guidance", n, seed) * c.experiment_pool


def stage23_annual_savings(c: EconomicConstants, seed: int, n: int) -> np.ndarray:
    """Compute share, energy, carbon and researcher productivity, M$/yr per sample."""
    return hpc_savings(c, seed, n) + c.energy_hpc + c.carbon_hpc + personnel_savings(c, seed, n)


def stage45_annual_savings(c: EconomicConstants, seed: int, n: int) -> np.ndarray:
    """Stage 2/3 savings plus the redirected share of the experimental pool."""
    return stage23_annual_savings(c, seed, n) + guidance_savings(c, seed, n)


@dataclass
class SuperconductorDraws:
    exists: np.ndarray
    discovery_year: np.ndarray
    accelerated_year: np.ndarray
    npv_years: np.ndarray

    @property
    def reduction_years(self) -> np.ndarray:
        return self.discovery_year - self.accelerated_year


def superconductor_draws(
    c: EconomicConstants, seed: int, n: int, reading: str = "bernoulli", acceleration: str = "multiplicative"
) -> SuperconductorDraws:
    """Per-sample discovery year ``y``, accelerated year ``z`` and discounted years gained.

    ``reading="bernoulli"`` realizes the existence probability as a draw (value
    zero when absent); ``"weighted"`` multiplies every value by it instead.
    ``acceleration="multiplicative"`` keeps a Beta fraction of the time
    remaining after the solver arrives; ``"subtractive"`` removes that fraction.
    """
    if reading not in ("bernoulli", "weighted"):
        raise SpecificationError(f"reading must be 'bernoulli' or 'weighted', got {reading!r}")
    if acceleration not in ("multiplicative", "subtractive"):
        raise SpecificationError(f"acceleration must be 'multiplicative' or 'subtractive', got {acceleration!r}")
    r, y0 = c.discount, c.solver_year_offset
    y = _draw(c, "discovery", n, seed)
    frac = _draw(c, "acceleration", n, seed)
    if reading == "bernoulli":
        exists = sample(Bernoulli(c.sc_exist_p), n, [seed, _STREAM["exists"]]).astype(bool)
        weight = 1.0
    else:
        exists = np.ones(n, dtype=bool)
        weight = c.sc_exist_p
    if acceleration == "subtractive":
        frac = 1 - frac
    later = exists & (y > y0)
    z = np.where(later, y0 + (y - y0) * frac, y)
    value = np.where(later, weight * ((1 - r) ** z - (1 - r) ** y) / r, 0.0)
    return SuperconductorDraws(exists, y, z, value)


def superconductor_npv_years(c: EconomicConstants, seed: int, n: int, **flags) -> np.ndarray:
    """Present value of the earlier arrival, in years of annual savings."""
    return superconductor_draws(c, seed, n, **flags).npv_years


@dataclass
class UtilityDistribution:
    samples: np.ndarray
    label: str = ""

    def __post_init__(self):
        self.samples = np.asarray(self.samples, dtype=float)
        if self.samples.size == 0:
            raise SpecificationError("empty distribution")

    @property
    def mean(self) -> float:
        return math.fsum(self.samples) / self.samples.size

    def quantiles(self, qs=DEFAULT_QUANTILES) -> np.ndarray:
        return np.quantile(self.samples, np.asarray(qs, dtype=float))

    def zero_mass(self) -> float:
        return float(np.mean(self.samples == 0))

    def histogram(self, bins: int = 100) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
        """Bin edges, density and CDF at right edges; the last CDF value is exactly 1."""
        counts, edges = np.histogram(self.samples, bins=bins)
        width = np.diff(edges)
        total = counts.sum()
        pdf = counts / (total * np.where(width > 0, width, 1.0))
        cdf = np.cumsum(counts) / total
        cdf[-1] = 1.0
        return edges, pdf, cdf

    def to_csv(self, path: str | Path, bins: int = 100):
        edges, pdf, cdf = self.histogram(bins)
        with open(path, "w", newline="") as fh:
            writer = csv.writer(fh)
            writer.writerow(["bin_left", "bin_right", "pdf", "cdf"])
            for lo, hi, p, cu in zip(edges[:-1], edges[1:], pdf, cdf):
                writer.writerow([repr(float(lo)), repr(float(hi)), repr(float(p)), repr(float(cu))])

    def summary(self, qs=DEFAULT_QUANTILES) -> dict:
        return {
            "label": self.label,
            "n": int(self.samples.size),
            "mean": self.mean,
            "quantiles": {str(q): float(v) for q, v in zip(qs, self.quantiles(qs))},
            "zero_mass": self.zero_mass(),
        }


def discounted_perpetuity(c: EconomicConstants) -> float:
    """Multiplier turning M$/yr starting after the solver offset into $B of present value."""
    r = c.discount
    return c.science_multiplier * (1 - r) ** c.solver_year_offset / r / 1000


def transmission_spillover(c: EconomicConstants, seed: int, n: int, **flags) -> UtilityDistribution:
    """Discounted years gained times the annual transmission savings, $B."""
    years = superconductor_npv_years(c, seed, n, **flags)
    return UtilityDistribution(years * _draw(c, "transmission", n, seed) / 1000, "transmission_spillover")


def aggregate_stage(stage: str, c: EconomicConstants, seed: int, n: int, **flags) -> UtilityDistribution:
    """Present value in $B for one capability stage."""
    if stage not in STAGES:
        raise SpecificationError(f"stage must be one of {STAGES}, got {stage!r}")
    annual = stage23_annual_savings(c, seed, n) if stage == "s23" else stage45_annual_savings(c, seed, n)
    value = annual * discounted_perpetuity(c)
    if stage == "s45_with_sc":
        value = value + transmission_spillover(c, seed, n, **flags).samples
    return UtilityDistribution(value, stage)


def write_quantiles_json(dists, path: str | Path, qs=DEFAULT_QUANTILES):
    with open(path, "w") as fh:
        json.dump({d.label: d.summary(qs) for d in dists}, fh, indent=2, sort_keys=True)
