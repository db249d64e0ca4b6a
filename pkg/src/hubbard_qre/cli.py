"""Command-line front end: ``hubbard-qre {encode,oracle,signal,costs,utility}``.

Every run writes its data files into ``--out-dir`` and finishes with a
``manifest.json`` that lists each file with its SHA-256 digest.
"""

from __future__ import annotations

import argparse
import csv
import hashlib
import json
import math
import sys
import warnings
from dataclasses import asdict, dataclass, field
from datetime import datetime, timezone
from pathlib import Path

import numpy as np

from hubbard_qre import __version__
from hubbard_qre.errors import ContractViolation, InfeasibleLayoutError, ResourceLimitError, SpecificationError
from hubbard_qre.logical import REFERENCE_SHOTS, dynamic_cost_report
from hubbard_qre.model import (
    OBSERVABLE_KINDS,
    ObservableSpec,
    PauliOperatorSum,
    encode_hamiltonian,
    encode_observable,
    encoding_summary,
    lesser_green_pair,
    load_spec,
)
from hubbard_qre.oracle import (
    MAX_MODES,
    CorrelationTrace,
    correlation_spectrum,
    dynamic_correlation,
    ground_state,
    realize_dense,
)
from hubbard_qre.physical import ArchitectureConfig, WidgetStream, estimate_lattice, lattice_sweep, write_sweep_csv
from hubbard_qre.signal_lab import (
    SIX_TONE_FREQUENCIES,
    SWEEP_DT,
    SWEEP_EPSILON,
    SWEEP_T_MAX,
    SignalSpec,
    inject_noise,
    resolution_sweep,
    score_recovery,
    spectrum_peaks,
    synthesize,
)
from hubbard_qre.utility import STAGES, EconomicConstants, aggregate_stage, transmission_spillover, write_quantiles_json

SCHEMA_VERSION = 1
CONFIG_SECTIONS = ("architecture", "widget_stream", "utility", "signal")
EXIT_CONTRACT = 2
EXIT_RESOURCE = 3


@dataclass
class RunManifest:
    command: str
    inputs: dict
    seed: int
    version: str = __version__
    timestamp: str = ""
    outputs: dict = field(default_factory=dict)

    def write(self, out_dir: Path):
        self.timestamp = datetime.now(timezone.utc).isoformat(timespec="seconds")
        _dump_json(asdict(self), out_dir / "manifest.json")


def sha256(path: Path) -> str:
    return hashlib.sha256(path.read_bytes()).hexdigest()


def _dump_json(obj, path: Path):
    path.write_text(json.dumps(obj, indent=2, sort_keys=True, default=_json_default) + "\n")


def _json_default(obj):
    if isinstance(obj, (np.integer,)):
        return int(obj)
    if isinstance(obj, (np.floating,)):
        return float(obj)
    if isinstance(obj, complex):
        return {"re": obj.real, "im": obj.imag}
    raise TypeError(f"cannot serialize {type(obj).__name__}")


def load_config(path: str | None) -> dict:
    if path is None:
        return {}
    text = Path(path).read_text()
    try:
        data = json.loads(text)
    except json.JSONDecodeError as exc:
        raise SpecificationError(f"config {path}: invalid JSON at line {exc.lineno}: {exc.msg}") from exc
    version = data.pop("schema_version", None)
    if version != SCHEMA_VERSION:
        raise SpecificationError(f"config {path}: schema_version must be {SCHEMA_VERSION}, got {version!r}")
    unknown = set(data) - set(CONFIG_SECTIONS)
    if unknown:
        raise SpecificationError(f"config {path}: unknown sections {sorted(unknown)}")
    return data


class Run:
    """Collects outputs of one command and writes the manifest last."""

    def __init__(self, args):
        self.out_dir = Path(args.out_dir)
        self.out_dir.mkdir(parents=True, exist_ok=True)
        inputs = {}
        for name in ("spec", "config"):
            p = getattr(args, name, None)
            if p is not None and Path(p).is_file():
                inputs[name] = {"path": str(p), "sha256": sha256(Path(p))}
        self.manifest = RunManifest(args.command, inputs, args.seed)

    def path(self, name: str) -> Path:
        return self.out_dir / name

    def record(self, name: str):
        self.manifest.outputs[name] = sha256(self.path(name))

    def json(self, name: str, obj):
        _dump_json(obj, self.path(name))
        self.record(name)

    def finish(self):
        self.manifest.write(self.out_dir)


def _write_trace(trace: CorrelationTrace, path: Path):
    trace.to_csv(path)


def _write_peaks(peaks, path: Path, extra: dict | None = None):
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh)
        cols = ["frequency", "amplitude"] + list(extra or {})
        writer.writerow(cols)
        for i, (f, a) in enumerate(zip(peaks.frequencies, peaks.amplitudes)):
            row = [repr(float(f)), repr(float(a))]
            row += [repr(v[i]) if isinstance(v[i], float) else v[i] for v in (extra or {}).values()]
            writer.writerow(row)


def cmd_encode(args, config: dict) -> int:
    spec = load_spec(args.spec)
    op = encode_hamiltonian(spec)
    report = encoding_summary(spec, op)
    run = Run(args)
    run.json("encoding.json", report)
    if args.terms:
        run.json("pauli_terms.json", op.to_records())
    run.finish()
    print(json.dumps({k: report[k] for k in ("qubits", "L", "alpha")}, sort_keys=True))
    return 0


def _observable_pair(args, spec) -> tuple[PauliOperatorSum, PauliOperatorSum, complex]:
    n = spec.n_modes
    if args.observable == "identity":
        ident = PauliOperatorSum.identity(n)
        return ident, ident, 1.0
    obs = ObservableSpec(
        args.observable, sites=tuple(args.sites), spin=args.spin, momentum=tuple(args.momentum)
    )
    if obs.kind == "lesser_green":
        a, b = lesser_green_pair(obs, spec)
        return a, b, 1j
    op = encode_observable(obs, spec)
    return op.adjoint(), op, 1.0


def _alias(f: np.ndarray, dt: float) -> np.ndarray:
    period = 2 * math.pi / dt
    return (f + period / 2) % period - period / 2


def cmd_oracle(args, config: dict) -> int:
    spec = load_spec(args.spec)
    H = realize_dense(encode_hamiltonian(spec))
    gs = ground_state(H, args.sector)
    a, b, factor = _observable_pair(args, spec)
    trace = dynamic_correlation(a, b, gs, args.dt, args.T_max)
    trace = CorrelationTrace(trace.times, factor * trace.values, trace.dt)
    lines, weights = correlation_spectrum(a, b, gs)
    nyquist = math.pi / args.dt
    if lines.size and np.max(np.abs(lines)) >= nyquist:
        msg = f"dt={args.dt} aliases spectral lines up to |w|={np.max(np.abs(lines)):.4g} (Nyquist {nyquist:.4g})"
        warnings.warn(msg, stacklevel=1)
        print(f"warning: {msg}", file=sys.stderr)
    peaks = spectrum_peaks(trace.values, args.dt)
    aliased = _alias(lines, args.dt)
    nearest, within = [], []
    for f in peaks.frequencies:
        k = int(np.argmin(np.abs(aliased - f))) if aliased.size else -1
        g = float(lines[k]) if k >= 0 else math.nan
        nearest.append(g)
        within.append(bool(k >= 0 and abs(aliased[k] - f) <= peaks.bin_width))
    run = Run(args)
    _write_trace(trace, run.path("trace.csv"))
    run.record("trace.csv")
    _write_peaks(peaks, run.path("spectrum.csv"), {"nearest_line": nearest, "within_bin": within})
    run.record("spectrum.csv")
    summary = {
        "ground_energy": gs.energy,
        "gap": gs.gap,
        "degenerate": gs.degenerate,
        "particle_number": gs.particle_number(),
        "observable": args.observable,
        "lines": [{"frequency": float(f), "weight": complex(factor * w)} for f, w in zip(lines, weights)],
        "peaks": len(peaks),
        "peaks_matching_lines": int(sum(within)),
        "bin_width": peaks.bin_width,
    }
    run.json("oracle.json", summary)
    run.finish()
    if not all(within):
        print("warning: some DFT peaks do not sit within one bin of an eigenvalue difference", file=sys.stderr)
    print(json.dumps({k: summary[k] for k in ("ground_energy", "peaks", "peaks_matching_lines")}))
    return 0


def cmd_signal(args, config: dict) -> int:
    cfg = config.get("signal", {})
    run = Run(args)
    if args.mode == "tones":
        dt = cfg.get("dt", SWEEP_DT)
        amps = (1.0,) * len(SIX_TONE_FREQUENCIES)
        out = {}
        for T_max in (100.0, 700.0):
            spec = SignalSpec(SIX_TONE_FREQUENCIES, amps, dt, T_max)
            clean = synthesize(spec)
            for eps in (0.01, 0.5):
                tag = f"T{int(T_max)}_eps{eps}"
                noisy = inject_noise(clean, eps, [args.seed, int(T_max), int(eps * 100)])
                trace = CorrelationTrace(noisy.times, noisy.noisy, dt)
                trace.to_csv(run.path(f"tones_trace_{tag}.csv"))
                run.record(f"tones_trace_{tag}.csv")
                peaks = spectrum_peaks(noisy)
                _write_peaks(peaks, run.path(f"tones_peaks_{tag}.csv"))
                run.record(f"tones_peaks_{tag}.csv")
                out[tag] = asdict(score_recovery(spec, peaks)) | {"peaks": len(peaks)}
        run.json("tones_scores.json", out)
    else:
        result = resolution_sweep(
            T_grid=cfg.get("T_max", SWEEP_T_MAX),
            eps_grid=cfg.get("epsilon", SWEEP_EPSILON),
            n_sets=args.sets,
            n_realizations=args.realizations,
            seed=args.seed,
            dt=cfg.get("dt", SWEEP_DT),
            reference=args.reference,
        )
        result.to_csv(run.path("sweep.csv"))
        run.record("sweep.csv")
        run.json(
            "sweep_summary.json",
            {
                "reference": result.reference,
                "samples_per_cell": result.samples,
                "violations": result.monotonicity_violations(),
                "violations_3sigma": result.monotonicity_violations(3.0),
            },
        )
    run.finish()
    return 0


def cmd_costs(args, config: dict) -> int:
    spec = load_spec(args.spec)
    arch = ArchitectureConfig.from_dict(config.get("architecture", {}))
    stream = WidgetStream(**config.get("widget_stream", {}))
    shots = None if args.shots == "formula" else int(args.shots)
    model = encode_hamiltonian(spec)
    report = dynamic_cost_report(model, args.t, args.epsilon, args.delta, shots)
    run = Run(args)
    try:
        est = estimate_lattice(spec, args.t, args.epsilon, args.delta, shots, arch, stream)
        report["physical"] = {
            "layout": asdict(est.layout),
            "runtime": est.runtime.to_dict(),
            "architecture": arch.to_dict(),
            "widget_stream": asdict(stream),
        }
        sweep = lattice_sweep(
            range(args.sweep_from, args.sweep_to + 1),
            base=spec,
            t=args.t,
            epsilon=args.epsilon,
            delta=args.delta,
            shots=shots,
            config=arch,
            stream=stream,
        )
    except InfeasibleLayoutError as exc:
        report["physical"] = {"infeasible": str(exc), "shortfall": exc.shortfall}
        run.json("costs.json", report)
        run.finish()
        print(f"error: infeasible layout: {exc} (shortfall {exc.shortfall} qubits)", file=sys.stderr)
        return EXIT_RESOURCE
    run.json("costs.json", report)
    write_sweep_csv(sweep, run.path("physical_sweep.csv"))
    run.record("physical_sweep.csv")
    run.finish()
    c = report["circuit"]
    print(
        json.dumps(
            {
                "U_t_per_circuit": c["U_t_per_circuit"],
                "per_circuit_failure": c["per_circuit_failure"],
                "p_qsp": c["p_qsp"],
                "epsilon_qsp": c["epsilon_qsp"],
                "total_T": report["t_count"]["total_T"],
            }
        )
    )
    return 0


def cmd_utility(args, config: dict) -> int:
    constants = EconomicConstants.from_dict(config.get("utility", {}))
    flags = {"reading": args.reading, "acceleration": args.acceleration}
    run = Run(args)
    dists = [aggregate_stage(s, constants, args.seed, args.n, **flags) for s in STAGES]
    dists.append(transmission_spillover(constants, args.seed, args.n, **flags))
    for d in dists:
        d.to_csv(run.path(f"utility_{d.label}.csv"), bins=args.bins)
        run.record(f"utility_{d.label}.csv")
    write_quantiles_json(dists, run.path("utility_quantiles.json"))
    run.record("utility_quantiles.json")
    run.finish()
    print(json.dumps({d.label: round(d.mean, 4) for d in dists}, sort_keys=True))
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="hubbard-qre", description=__doc__.splitlines()[0])
    parser.add_argument("--version", action="version", version=__version__)
    parser.add_argument("--seed", type=int, default=0, help="master seed for every random stream")
    parser.add_argument("--out-dir", default="out", help="directory for data files and the manifest")
    parser.add_argument("--config", default=None, help="JSON config with schema_version and optional sections")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("encode", help="Pauli encoding summary of a problem spec")
    p.add_argument("spec")
    p.add_argument("--terms", action="store_true", help="also write every Pauli term")
    p.set_defaults(func=cmd_encode)

    p = sub.add_parser("oracle", help="exact correlation trace and spectrum")
    p.add_argument("spec")
    p.add_argument("--observable", default="lesser_green", choices=["identity", *OBSERVABLE_KINDS])
    p.add_argument("--sites", type=int, nargs="*", default=[])
    p.add_argument("--spin", type=int, default=0)
    p.add_argument("--momentum", type=int, nargs=2, default=[0, 0])
    p.add_argument("--sector", type=int, default=None, help="particle-number sector of the ground state")
    p.add_argument("--dt", type=float, default=0.5)
    p.add_argument("--T-max", dest="T_max", type=float, default=100.0)
    p.set_defaults(func=cmd_oracle)

    p = sub.add_parser("signal", help="resolution experiments on synthetic signals")
    p.add_argument("--mode", choices=["tones", "sweep"], default="tones")
    p.add_argument("--sets", type=int, default=30)
    p.add_argument("--realizations", type=int, default=100)
    p.add_argument("--reference", choices=["clean", "given"], default="clean")
    p.set_defaults(func=cmd_signal)

    p = sub.add_parser("costs", help="logical and physical cost report")
    p.add_argument("spec")
    p.add_argument("--epsilon", type=float, default=0.01)
    p.add_argument("--delta", type=float, default=0.001)
    p.add_argument("--t", type=float, default=1.0)
    p.add_argument("--shots", default=str(REFERENCE_SHOTS), help="integer, or 'formula' for the iterate-count value")
    p.add_argument("--sweep-from", type=int, default=2)
    p.add_argument("--sweep-to", type=int, default=7)
    p.set_defaults(func=cmd_costs)

    p = sub.add_parser("utility", help="Monte Carlo utility distributions")
    p.add_argument("--n", type=int, default=1_000_000)
    p.add_argument("--bins", type=int, default=200)
    p.add_argument("--reading", choices=["bernoulli", "weighted"], default="bernoulli")
    p.add_argument("--acceleration", choices=["multiplicative", "subtractive"], default="multiplicative")
    p.set_defaults(func=cmd_utility)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        config = load_config(args.config)
        return args.func(args, config)
    except (SpecificationError, ContractViolation) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_CONTRACT
    except ResourceLimitError as exc:
        print(f"error: {exc}; use at most {MAX_MODES // 2} single-orbital sites", file=sys.stderr)
        return EXIT_RESOURCE


if __name__ == "__main__":
    sys.exit(main())
