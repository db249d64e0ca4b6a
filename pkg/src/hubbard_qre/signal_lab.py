"""Frequency-resolution experiments on noisy multi-tone signals.

Signals are complex exponentials ``s(t) = sum_k a_k exp(i w_k t)`` sampled at
``t_n = n dt`` for ``n dt <= T_max``. The DFT is the unnormalized forward sum;
reported amplitudes are ``|X_j| / N`` on the grid ``w_j = 2 pi j / (N dt)``
(shifted so frequencies increase). No window is applied.
"""

from __future__ import annotations

import csv
import math
from dataclasses import dataclass, field
from pathlib import Path
from typing import Sequence

import numpy as np

from hubbard_qre.errors import SpecificationError

SIX_TONE_FREQUENCIES = (-1.5, -1.4, -0.05, 0.5, 1.5, 1.8)

# Ensemble grids of the resolution study.
SWEEP_FREQUENCY_CHOICES = tuple(np.round(np.arange(-2.0, 2.0 + 1e-9, 0.1), 10))
SWEEP_AMPLITUDE_CHOICES = tuple(np.round(np.arange(0.4, 1.0 + 1e-9, 0.05), 10))
SWEEP_T_MAX = tuple(float(t) for t in np.arange(70, 1000 + 1e-9, 25))
SWEEP_EPSILON = tuple(np.round(np.arange(0.01, 0.6 + 1e-9, 0.02), 10))
SWEEP_DT = 1.5


@dataclass(frozen=True)
class SignalSpec:
    frequencies: tuple[float, ...]
    amplitudes: tuple[float, ...]
    dt: float = SWEEP_DT
    T_max: float = 700.0

    def __post_init__(self):
        freqs = tuple(float(w) for w in self.frequencies)
        amps = tuple(float(a) for a in self.amplitudes)
        object.__setattr__(self, "frequencies", freqs)
        object.__setattr__(self, "amplitudes", amps)
        if len(freqs) != len(amps):
            raise SpecificationError("frequencies and amplitudes differ in length")
        if any(a <= 0 for a in amps):
            raise SpecificationError("amplitudes must be positive")
        if self.dt <= 0:
            raise SpecificationError("dt must be positive")
        if self.T_max < 2 * self.dt:
            raise SpecificationError("T_max must be at least 2 dt")
        nyquist = math.pi / self.dt
        for w in freqs:
            if abs(w) >= nyquist:
                raise SpecificationError(f"|{w}| violates the Nyquist bound pi/dt = {nyquist:.6g}")

    @property
    def n_samples(self) -> int:
        return int(np.floor(self.T_max / self.dt + 1e-9)) + 1

    @property
    def times(self) -> np.ndarray:
        return np.arange(self.n_samples) * self.dt

    @property
    def bin_width(self) -> float:
        return 2 * math.pi / (self.n_samples * self.dt)


@dataclass
class NoisyTrace:
    times: np.ndarray
    clean: np.ndarray
    noisy: np.ndarray
    dt: float
    epsilon: float = 0.0
    seed: int | None = None


@dataclass
class ThresholdPolicy:
    """Peak threshold: ``median_factor`` times the median magnitude unless ``absolute`` is set.

    ``roundoff_floor`` times the largest magnitude is a lower bound, so exact
    on-grid tones (median zero) do not turn rounding residue into peaks.
    """

    median_factor: float = 5.0
    absolute: float | None = None
    roundoff_floor: float = 1e-9

    def threshold(self, mags: np.ndarray) -> np.ndarray:
        """Per-row threshold for a ``(rows, bins)`` magnitude array."""
        if self.absolute is not None:
            return np.full(mags.shape[0], float(self.absolute))
        floor = self.roundoff_floor * np.max(mags, axis=-1)
        return np.maximum(self.median_factor * np.median(mags, axis=-1), floor)


@dataclass
class PeakSet:
    frequencies: np.ndarray
    amplitudes: np.ndarray
    threshold: float
    bin_width: float

    def __len__(self) -> int:
        return len(self.frequencies)


@dataclass(frozen=True)
class RecoveryScore:
    freq_error: float
    joint_error: float
    matched: int
    missed: int
    spurious: int


def synthesize(spec: SignalSpec) -> NoisyTrace:
    t = spec.times
    w = np.asarray(spec.frequencies)
    a = np.asarray(spec.amplitudes)
    clean = np.exp(1j * np.outer(t, w)) @ a if len(w) else np.zeros(t.size, complex)
    return NoisyTrace(t, clean, clean.copy(), spec.dt)


def noise_signs(seed, n: int) -> np.ndarray:
    """``(n, 2)`` array of independent +-1 signs for real and imaginary parts.

    Drawn row by row from one stream, so the first ``m`` rows do not depend on ``n``.
    """
    rng = np.random.default_rng(seed)
    return np.where(rng.random((n, 2)) < 0.5, -1.0, 1.0)


def inject_noise(trace: NoisyTrace, epsilon: float, seed=0) -> NoisyTrace:
    """Worst-case noise: each component of each sample moves by exactly ``+-epsilon``."""
    if epsilon < 0:
        raise SpecificationError("epsilon must be non-negative")
    if epsilon == 0:
        noisy = trace.clean.copy()
    else:
        s = noise_signs(seed, trace.clean.size)
        noisy = trace.clean + epsilon * (s[:, 0] + 1j * s[:, 1])
    return NoisyTrace(trace.times, trace.clean, noisy, trace.dt, epsilon, seed)


def spectrum(samples: np.ndarray, dt: float) -> tuple[np.ndarray, np.ndarray]:
    """Angular frequencies (ascending) and ``|X_j| / N`` along the last axis."""
    samples = np.asarray(samples)
    n = samples.shape[-1]
    mags = np.abs(np.fft.fftshift(np.fft.fft(samples, axis=-1), axes=-1)) / n
    freqs = 2 * math.pi * np.fft.fftshift(np.fft.fftfreq(n, dt))
    return freqs, mags


def _local_maxima(mags: np.ndarray, thresholds: np.ndarray) -> np.ndarray:
    """Boolean mask of cyclic local maxima strictly above the per-row threshold."""
    left = np.roll(mags, 1, axis=-1)
    right = np.roll(mags, -1, axis=-1)
    return (mags > left) & (mags >= right) & (mags > thresholds[:, None])


def spectrum_peaks(trace, dt: float | None = None, policy: ThresholdPolicy | None = None) -> PeakSet:
    """Peaks of the DFT magnitude of a trace (its noisy samples) or a raw sample array."""
    policy = policy or ThresholdPolicy()
    if isinstance(trace, NoisyTrace):
        samples, dt = trace.noisy, trace.dt
    else:
        samples = np.asarray(trace)
        if dt is None:
            raise SpecificationError("dt is required for raw samples")
    if samples.size == 0:
        raise SpecificationError("trace is empty")
    freqs, mags = spectrum(samples, dt)
    thr = policy.threshold(mags[None, :])
    idx = np.flatnonzero(_local_maxima(mags[None, :], thr)[0])
    return PeakSet(freqs[idx], mags[idx], float(thr[0]), 2 * math.pi / (samples.size * dt))


def _greedy_match(ref: list[float], found: list[float], radius: float) -> list[tuple[int, int, float]]:
    pairs = []
    for i, g in enumerate(ref):
        for j, r in enumerate(found):
            d = abs(g - r)
            if d <= radius * (1 + 1e-9):
                pairs.append((d, i, j))
    pairs.sort()
    used_i, used_j, out = set(), set(), []
    for d, i, j in pairs:
        if i in used_i or j in used_j:
            continue
        used_i.add(i)
        used_j.add(j)
        out.append((i, j, d))
    return out


def _score(ref_f, ref_a, found_f, found_a, bin_width, radius) -> RecoveryScore:
    matches = _greedy_match(ref_f, found_f, radius)
    n_ref = max(len(ref_f), 1)
    missed = len(ref_f) - len(matches)
    spurious = len(found_f) - len(matches)
    f_sum = math.fsum(d for _, _, d in matches)
    freq_error = (f_sum + bin_width * (missed + spurious)) / n_ref
    matched_i = {i for i, _, _ in matches}
    matched_j = {j for _, j, _ in matches}
    a_sum = math.fsum(abs(ref_a[i] - found_a[j]) for i, j, _ in matches)
    a_sum += math.fsum(a for i, a in enumerate(ref_a) if i not in matched_i)
    a_sum += math.fsum(a for j, a in enumerate(found_a) if j not in matched_j)
    return RecoveryScore(freq_error, freq_error + a_sum / n_ref, len(matches), missed, spurious)


def score_recovery(given, found: PeakSet, match_radius_bins: float = 1.0) -> RecoveryScore:
    """Score recovered peaks against a reference.

    ``given`` is a :class:`SignalSpec` (true tones) or a :class:`PeakSet` (e.g. the
    peaks of the clean signal). References and peaks are paired greedily by
    distance, accepting pairs within ``match_radius_bins`` bins. Then::

        freq_error  = (sum |w_ref - w_found| + bin * (missed + spurious)) / n_ref
        joint_error = freq_error + (sum |a_ref - a_found| + unmatched amplitudes) / n_ref
    """
    radius = match_radius_bins * found.bin_width
    return _score(
        list(map(float, given.frequencies)),
        list(map(float, given.amplitudes)),
        found.frequencies.tolist(),
        found.amplitudes.tolist(),
        found.bin_width,
        radius,
    )


def recovered_count(given: Sequence[float], found: PeakSet, tol: float) -> int:
    """Number of given frequencies paired one-to-one with a distinct peak within ``tol``."""
    return len(_greedy_match(list(map(float, given)), found.frequencies.tolist(), tol))


# ---------------------------------------------------------------------------
# Ensemble sweep


@dataclass
class SweepResult:
    T_max: np.ndarray
    epsilon: np.ndarray
    freq_error: np.ndarray
    freq_error_sem: np.ndarray
    joint_error: np.ndarray
    missed: np.ndarray
    spurious: np.ndarray
    reference: str
    samples: int

    def rows(self) -> list[dict]:
        out = []
        for i, t in enumerate(self.T_max):
            for j, e in enumerate(self.epsilon):
                out.append(
                    {
                        "T_max": float(t),
                        "epsilon": float(e),
                        "freq_error": float(self.freq_error[i, j]),
                        "joint_error": float(self.joint_error[i, j]),
                        "missed": float(self.missed[i, j]),
                        "spurious": float(self.spurious[i, j]),
                    }
                )
        return out

    def to_csv(self, path: str | Path):
        rows = self.rows()
        with open(path, "w", newline="") as fh:
            writer = csv.DictWriter(fh, fieldnames=list(rows[0]))
            writer.writeheader()
            for row in rows:
                writer.writerow({k: repr(v) for k, v in row.items()})

    def monotonicity_violations(self, sigma: float = 0.0) -> dict[str, tuple[int, int]]:
        """Adjacent-cell pairs where the mean error moves the wrong way.

        Along ``T_max`` the error should not increase, along ``epsilon`` it should
        not decrease. With ``sigma > 0`` a pair counts only if the wrong-way step
        exceeds ``sigma`` combined standard errors. Returns ``{axis: (violations, pairs)}``.
        """
        e, s = self.freq_error, self.freq_error_sem
        d_t = e[1:, :] - e[:-1, :]
        d_e = e[:, 1:] - e[:, :-1]
        tol_t = sigma * np.hypot(s[1:, :], s[:-1, :]) + 1e-12
        tol_e = sigma * np.hypot(s[:, 1:], s[:, :-1]) + 1e-12
        return {
            "T_max": (int(np.sum(d_t > tol_t)), int(d_t.size)),
            "epsilon": (int(np.sum(-d_e > tol_e)), int(d_e.size)),
        }


def draw_signal_sets(n_sets: int, seed: int, n_freqs: int = 6, freq_choices=None, amp_choices=None):
    """Random tone sets: distinct frequencies and (with replacement) amplitudes from the grids."""
    freq_choices = np.asarray(freq_choices if freq_choices is not None else SWEEP_FREQUENCY_CHOICES)
    amp_choices = np.asarray(amp_choices if amp_choices is not None else SWEEP_AMPLITUDE_CHOICES)
    rng = np.random.default_rng([seed, 0])
    sets = []
    for _ in range(n_sets):
        w = np.sort(rng.choice(freq_choices, n_freqs, replace=False))
        a = rng.choice(amp_choices, n_freqs, replace=True)
        sets.append((tuple(w), tuple(a)))
    return sets


def resolution_sweep(
    T_grid: Sequence[float] = SWEEP_T_MAX,
    eps_grid: Sequence[float] = SWEEP_EPSILON,
    n_sets: int = 30,
    n_realizations: int = 100,
    seed: int = 0,
    dt: float = SWEEP_DT,
    reference: str = "clean",
    policy: ThresholdPolicy | None = None,
    match_radius_bins: float = 1.0,
    signal_sets=None,
) -> SweepResult:
    """Average recovery scores over (tone set x noise realization) for every ``(T_max, epsilon)`` cell.

    ``reference="clean"`` scores the noisy-signal peaks against the peaks found in
    the same signal without noise; ``reference="given"`` scores against the true
    tones. Tone sets come from ``seed``; the noise signs of realization ``r`` of
    set ``s`` come from the stream ``(seed, 1, s, r)`` and are shared by every
    cell, so neighbouring cells differ only through ``T_max`` and ``epsilon``.
    """
    if reference not in ("clean", "given"):
        raise SpecificationError("reference must be 'clean' or 'given'")
    if not len(T_grid) or not len(eps_grid) or n_sets < 1 or n_realizations < 1:
        raise SpecificationError("sweep grids and ensemble sizes must be non-empty")
    policy = policy or ThresholdPolicy()
    sets = signal_sets if signal_sets is not None else draw_signal_sets(n_sets, seed)
    specs = [SignalSpec(w, a, dt, float(max(T_grid))) for w, a in sets]
    n_max = specs[0].n_samples
    signs = [
        np.stack([noise_signs([seed, 1, s, r], n_max) for r in range(n_realizations)])
        for s in range(len(sets))
    ]
    shape = (len(T_grid), len(eps_grid))
    total = len(sets) * n_realizations
    f_sum, f_sq, j_sum, miss, spur = (np.zeros(shape) for _ in range(5))
    for it, T in enumerate(T_grid):
        for s, (w, a) in enumerate(sets):
            spec = SignalSpec(w, a, dt, float(T))
            n = spec.n_samples
            bin_width = spec.bin_width
            radius = match_radius_bins * bin_width
            clean = synthesize(spec).clean
            freqs, _ = spectrum(clean, dt)
            if reference == "clean":
                ref = spectrum_peaks(clean, dt, policy)
                ref_f, ref_a = ref.frequencies.tolist(), ref.amplitudes.tolist()
            else:
                ref_f, ref_a = list(w), list(a)
            noise = signs[s][:, :n, 0] + 1j * signs[s][:, :n, 1]
            for ie, eps in enumerate(eps_grid):
                _, mags = spectrum(clean[None, :] + eps * noise, dt)
                mask = _local_maxima(mags, policy.threshold(mags))
                for r in range(n_realizations):
                    idx = np.flatnonzero(mask[r])
                    sc = _score(ref_f, ref_a, freqs[idx].tolist(), mags[r, idx].tolist(), bin_width, radius)
                    f_sum[it, ie] += sc.freq_error
                    f_sq[it, ie] += sc.freq_error**2
                    j_sum[it, ie] += sc.joint_error
                    miss[it, ie] += sc.missed
                    spur[it, ie] += sc.spurious
    mean = f_sum / total
    var = np.maximum(f_sq / total - mean**2, 0.0)
    sem = np.sqrt(var / max(total - 1, 1))
    return SweepResult(
        np.asarray(T_grid, float),
        np.asarray(eps_grid, float),
        mean,
        sem,
        j_sum / total,
        miss / total,
        spur / total,
        reference,
        total,
    )
