"""Command-line interface.

Exit codes: 0 ok, 2 usage error, 3 unsupported momentum (u6 != 0),
4 chart singularity (angles backend), 5 tolerance exceeded.
"""

from __future__ import annotations

import argparse
import json
import math
import sys
from dataclasses import asdict, dataclass
from pathlib import Path

import numpy as np

from . import __version__
from .controls import InitialMomentum, classify, eval_controls, first_integrals
from .errors import ChartSingularityError, UnsupportedMomentumError
from .geodesic import BACKENDS, check_invariants, integrate_geodesic
from .oracle import DEFAULT_STEPS_PER_UNIT, integrate_vertical
from .tables import render

EXIT_OK = 0
EXIT_USAGE = 2
EXIT_UNSUPPORTED = 3
EXIT_SINGULAR = 4
EXIT_TOLERANCE = 5

CONTROL_COLUMNS = ["t", "u1", "u2", "u3", "u4", "u5", "U", "H", "W"]
GEODESIC_COLUMNS = ["t", "x", "y", "z", "theta", "beta", "alpha",
                    "u1", "u2", "u3", "u4", "u5", "rho1", "rho2", "rho3"]


class UsageError(Exception):
    pass


@dataclass
class RunConfig:
    u0: tuple[float, ...]
    t1: float = 10.0
    samples: int = 1001
    backend: str = "angles"
    format: str = "csv"
    out: str | None = None

    def __post_init__(self):
        if not (math.isfinite(self.t1) and self.t1 > 0):
            raise UsageError(f"--t1 must be a positive number, got {self.t1}")
        if self.samples < 2:
            raise UsageError(f"--samples must be at least 2, got {self.samples}")
        if not all(math.isfinite(v) for v in self.u0):
            raise UsageError("momentum components must be finite")

    def momentum(self) -> InitialMomentum:
        return InitialMomentum(*self.u0)

    def times(self) -> np.ndarray:
        return np.linspace(0.0, self.t1, self.samples)


def parse_momentum(text: str) -> tuple[float, ...]:
    try:
        values = tuple(float(v) for v in text.split(","))
    except ValueError:
        raise UsageError(f"malformed momentum {text!r}: expected 5 comma-separated numbers") from None
    if len(values) == 6 and values[5] != 0.0:
        raise UnsupportedMomentumError(f"u6(0) = {values[5]!r}: only u6 = 0 is supported")
    if len(values) not in (5, 6):
        raise UsageError(f"malformed momentum {text!r}: expected 5 comma-separated numbers")
    if not all(math.isfinite(v) for v in values):
        raise UsageError("momentum components must be finite")
    return values[:5]


def _emit(text: str, out: str | None) -> None:
    if out is None:
        sys.stdout.write(text)
    else:
        Path(out).write_text(text)


def _meta(cfg: RunConfig, command: str) -> dict:
    return {"command": command, "config": asdict(cfg), "case": classify(cfg.momentum()).as_dict()}


def control_rows(cfg: RunConfig) -> np.ndarray:
    m = cfg.momentum()
    s = eval_controls(cfg.times(), classify(m), m)
    H, W = first_integrals(s)
    return np.column_stack((s.t, s.u1, s.u2, s.u3, s.u4, s.u5, s.U, H, W))


def geodesic_rows(cfg: RunConfig) -> np.ndarray:
    tr = integrate_geodesic(cfg.momentum(), cfg.t1, cfg.samples, cfg.backend)
    c = tr.controls
    return np.column_stack((tr.t, tr.coords, c.momenta().T, tr.invariant_log[:, 2:]))


def cmd_controls(cfg: RunConfig) -> int:
    _emit(render(cfg.format, CONTROL_COLUMNS, control_rows(cfg), _meta(cfg, "controls")), cfg.out)
    return EXIT_OK


def cmd_geodesic(cfg: RunConfig) -> int:
    rows = geodesic_rows(cfg)
    _emit(render(cfg.format, GEODESIC_COLUMNS, rows, _meta(cfg, "geodesic")), cfg.out)
    return EXIT_OK


def cmd_case_info(u0: tuple[float, ...]) -> int:
    report = classify(InitialMomentum(*u0)).as_dict()
    report["u0"] = list(u0)
    sys.stdout.write(json.dumps(report, indent=2) + "\n")
    return EXIT_OK


def check_report(cfg: RunConfig, steps_per_unit: int = DEFAULT_STEPS_PER_UNIT) -> dict[str, float]:
    """Max deviations: closed form vs. RK4 oracle, and first-integral drift."""
    m = cfg.momentum()
    cp = classify(m)
    intervals = cfg.samples - 1
    stride = max(1, math.ceil(steps_per_unit * cfg.t1 / intervals))
    track = integrate_vertical(m, cfg.t1, stride * intervals, stride)
    s = eval_controls(track.t, cp, m)
    diff = np.abs(s.momenta().T - track.u[:, :5])
    report = {f"u{i + 1}_vs_oracle": float(diff[:, i].max()) for i in range(5)}
    report["U_vs_oracle"] = float(np.abs(s.U - track.U).max())
    H, W = first_integrals(s)
    report["H_drift"] = float(np.abs(H - H[0]).max())
    report["W_drift"] = float(np.abs(W - W[0]).max())
    inv = check_invariants(integrate_geodesic(m, cfg.t1, cfg.samples, cfg.backend))
    for name in ("rho1", "rho2", "rho3"):
        report[f"{name}_drift"] = getattr(inv, name)
    return report


def cmd_check(cfg: RunConfig, tol: float = 1e-7, steps_per_unit: int = DEFAULT_STEPS_PER_UNIT) -> int:
    report = check_report(cfg, steps_per_unit)
    ok = all(v <= tol for v in report.values())
    width = max(map(len, report))
    for name, value in report.items():
        flag = "ok" if value <= tol else "FAIL"
        print(f"{name:<{width}}  {value:.3e}  {flag}")
    print(f"{'tolerance':<{width}}  {tol:.3e}  {'PASS' if ok else 'FAIL'}")
    return EXIT_OK if ok else EXIT_TOLERANCE


def parse_range(text: str) -> tuple[int, float, float, int]:
    parts = text.split(",")
    try:
        index, start, stop, count = int(parts[0]), float(parts[1]), float(parts[2]), int(parts[3])
    except (ValueError, IndexError):
        raise UsageError(f"malformed range {text!r}: expected index,start,stop,count") from None
    if len(parts) != 4 or not 1 <= index <= 5 or count < 1 or not (math.isfinite(start) and math.isfinite(stop)):
        raise UsageError(f"malformed range {text!r}: index in 1..5, count >= 1")
    return index, start, stop, count


def cmd_sweep(cfg: RunConfig, sweep: tuple[int, float, float, int], outdir: str) -> int:
    index, start, stop, count = sweep
    values = np.linspace(start, stop, count)
    root = Path(outdir)
    root.mkdir(parents=True, exist_ok=True)
    entries = []
    for j, v in enumerate(values):
        u0 = list(cfg.u0)
        u0[index - 1] = float(v)
        sub = RunConfig(tuple(u0), cfg.t1, cfg.samples, cfg.backend, cfg.format,
                        str(root / f"traj_{j:03d}.{cfg.format}"))
        cmd_geodesic(sub)
        cp = classify(sub.momentum())
        entries.append({"file": Path(sub.out).name, "value": float(v), "u0": u0,
                        "case": cp.case.value, "k": cp.k})
    manifest = {"component": index, "t1": cfg.t1, "samples": cfg.samples,
                "backend": cfg.backend, "entries": entries}
    (root / "manifest.json").write_text(json.dumps(manifest, indent=2) + "\n")
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="srse3", description=__doc__.splitlines()[0])
    parser.add_argument("--version", action="version", version=__version__)
    sub = parser.add_subparsers(dest="command", required=True)

    def common(p, backend="angles"):
        p.add_argument("--u0", required=True, help="u1,u2,u3,u4,u5 at t = 0")
        p.add_argument("--u6", type=float, default=0.0, help=argparse.SUPPRESS)
        p.add_argument("--t1", type=float, default=10.0)
        p.add_argument("--samples", type=int, default=1001)
        p.add_argument("--backend", choices=BACKENDS, default=backend)
        p.add_argument("--format", choices=("csv", "json"), default="csv")
        p.add_argument("--out", default=None)

    common(sub.add_parser("controls", help="closed-form controls on a time grid"))
    common(sub.add_parser("geodesic", help="integrate the geodesic from the identity"))
    p = sub.add_parser("case-info", help="case tag and derived constants")
    p.add_argument("--u0", required=True)
    p.add_argument("--u6", type=float, default=0.0, help=argparse.SUPPRESS)
    p = sub.add_parser("check", help="closed form vs. oracle and invariant drift")
    common(p, backend="matrix")
    p.add_argument("--tol", type=float, default=1e-7)
    p.add_argument("--steps-per-unit", type=int, default=DEFAULT_STEPS_PER_UNIT)
    p = sub.add_parser("sweep", help="geodesics over a range of one initial momentum")
    common(p)
    p.add_argument("--range", required=True, help="index,start,stop,count (index 1..5)")
    return parser


def _glue_values(argv: list[str]) -> list[str]:
    # "--u0 -1,2,..." would otherwise be taken for an option
    out, it = [], iter(argv)
    for a in it:
        if a in ("--u0", "--range"):
            nxt = next(it, None)
            out.append(a if nxt is None else f"{a}={nxt}")
        else:
            out.append(a)
    return out


def main(argv: list[str] | None = None) -> int:
    argv = sys.argv[1:] if argv is None else list(argv)
    parser = build_parser()
    try:
        args = parser.parse_args(_glue_values(argv))
    except SystemExit as exc:
        return int(exc.code or 0)
    try:
        if args.u6 != 0.0:
            raise UnsupportedMomentumError(f"u6(0) = {args.u6!r}: only u6 = 0 is supported")
        u0 = parse_momentum(args.u0)
        if args.command == "case-info":
            return cmd_case_info(u0)
        cfg = RunConfig(u0, args.t1, args.samples, args.backend, args.format,
                        None if args.command == "sweep" else args.out)
        if args.command == "controls":
            return cmd_controls(cfg)
        if args.command == "geodesic":
            return cmd_geodesic(cfg)
        if args.command == "check":
            if not (args.tol > 0 and args.steps_per_unit >= 1):
                raise UsageError("--tol must be positive and --steps-per-unit at least 1")
            return cmd_check(cfg, args.tol, args.steps_per_unit)
        return cmd_sweep(cfg, parse_range(args.range), args.out or "sweep")
    except UsageError as exc:
        print(f"srse3: error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except UnsupportedMomentumError as exc:
        print(f"srse3: unsupported: {exc}", file=sys.stderr)
        return EXIT_UNSUPPORTED
    except ChartSingularityError as exc:
        print(f"srse3: {exc}", file=sys.stderr)
        return EXIT_SINGULAR


if __name__ == "__main__":
    sys.exit(main())
