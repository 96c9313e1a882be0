"""Command-line interface: parameter sweeps and scalar reports as CSV/JSON.

Units are k_B = hbar = 1. Exit codes: 0 success, 2 usage error,
3 numerical failure. Errors are written to stderr as one JSON line.
"""

import argparse
import csv
import io
import json
import math
import sys
from dataclasses import asdict, dataclass, field
from datetime import datetime, timezone
from pathlib import Path

import numpy as np

from . import __version__
from .analysis import (
    PrecisionQuery,
    delta_h,
    gain_ratio,
    gain_ratio_limits,
    ho_threshold,
    limit_betas,
    precision_gain_percent,
    solve_optimal_gap,
    tur_bound,
    tur_consistency,
    tur_limits,
)
from .channels import HOProbeSpec, ProbeSpec, SwitchConfig
from .errors import NumericalError, PreconditionError
from .qfi import (
    qfi_ho,
    qfi_qubit_noswitch,
    qfi_spectral,
    qfi_switch_analytic,
    switch_family,
    to_temperature_parameter,
)

EXIT_USAGE = 2
EXIT_NUMERICAL = 3

PROBES = ("qubit_noswitch", "qubit_switch", "harmonic_oscillator")
PARAMETERS = ("temperature", "beta", "gap", "alpha")
PROBE_COLUMNS = {"qubit_noswitch": "F_noswitch", "qubit_switch": "F_switch", "harmonic_oscillator": "F_ho"}
SWEPT_COLUMNS = {
    "temperature": ["T", "beta"],
    "beta": ["beta", "T"],
    "gap": ["gap"],
    "alpha": ["alpha", "xi"],
}

FIGURE_DEFAULTS = {
    "fig2": {"gap": (0.1, 10.0, 100), "alpha": (0.0, 1.0, 21), "temperature": 1.0},
    "fig3": {"temperature": (0.05, 3.0, 300), "gap": 1.0, "xi": 1.0},
    "fig4": {"temperature": (0.05, 3.0, 300), "gap": 1.0, "xi": 1.0},
}


class UsageError(Exception):
    pass


@dataclass
class SweepConfig:
    parameter: str
    start: float
    stop: float
    points: int
    fixed: dict = field(default_factory=dict)
    probes: tuple = PROBES

    def __post_init__(self):
        if self.parameter not in PARAMETERS:
            raise UsageError(f"unknown sweep parameter {self.parameter!r}")
        if not self.start < self.stop:
            raise UsageError(f"need start < stop, got {self.start} >= {self.stop}")
        if self.points < 2:
            raise UsageError(f"need at least 2 points, got {self.points}")
        unknown = [p for p in self.probes if p not in PROBES]
        if unknown or not self.probes:
            raise UsageError(f"unknown probe(s) {unknown}; choose from {', '.join(PROBES)}")
        swept_keys = {"temperature": ("temperature", "beta"), "beta": ("temperature", "beta"),
                      "gap": ("gap",), "alpha": ("alpha", "xi")}[self.parameter]
        clash = [k for k in swept_keys if self.fixed.get(k) is not None]
        if clash:
            raise UsageError(f"swept parameter {self.parameter!r} is also fixed via {clash}")
        if self.parameter in ("temperature", "gap") and self.start <= 0:
            raise UsageError(f"{self.parameter} sweep must start above 0")
        if self.parameter == "beta" and self.start < 0:
            raise UsageError("beta sweep must start at or above 0")
        if self.parameter == "alpha" and not (0.0 <= self.start and self.stop <= 1.0):
            raise UsageError("alpha sweep must stay within [0, 1]")

    def columns(self) -> list:
        cols = list(SWEPT_COLUMNS[self.parameter])
        cols += [PROBE_COLUMNS[p] for p in PROBES if p in self.probes]
        if "qubit_noswitch" in self.probes and "qubit_switch" in self.probes:
            cols.append("chi")
        return cols


@dataclass
class RunRecord:
    config: SweepConfig
    columns: list
    rows: list
    method: str
    tool_version: str = __version__
    timestamp: str = ""


def _timestamp() -> str:
    return datetime.now(timezone.utc).isoformat(timespec="seconds")


def _fmt(v: float) -> str:
    return format(float(v), ".17g")


def _json_safe(obj):
    if isinstance(obj, float) and not math.isfinite(obj):
        return None
    if isinstance(obj, dict):
        return {k: _json_safe(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_json_safe(v) for v in obj]
    if isinstance(obj, np.floating):
        return _json_safe(float(obj))
    return obj


def _control(fixed: dict) -> SwitchConfig:
    if fixed.get("alpha") is not None:
        return SwitchConfig(fixed["alpha"])
    return SwitchConfig.from_xi(1.0 if fixed.get("xi") is None else fixed["xi"])


def _beta(fixed: dict) -> float:
    if fixed.get("beta") is not None:
        return fixed["beta"]
    if fixed.get("temperature") is not None:
        if fixed["temperature"] <= 0:
            raise UsageError("temperature must be > 0")
        return 1.0 / fixed["temperature"]
    return 1.0


def _point(config: SweepConfig, value: float) -> dict:
    fixed = config.fixed
    lam = 1.0 if fixed.get("lam") is None else fixed["lam"]
    gap = 1.0 if fixed.get("gap") is None else fixed["gap"]
    control = _control(fixed)
    beta = _beta(fixed)
    row = {}
    if config.parameter == "temperature":
        beta = 1.0 / value
        row.update(T=value, beta=beta)
    elif config.parameter == "beta":
        beta = value
        row.update(beta=value, T=math.inf if value == 0 else 1.0 / value)
    elif config.parameter == "gap":
        gap = value
        row.update(gap=value)
    else:
        control = SwitchConfig(min(max(value, 0.0), 1.0))
        row.update(alpha=control.alpha, xi=control.xi)

    probe = ProbeSpec(gap)
    per_t = config.parameter == "temperature"

    def finish(res):
        return to_temperature_parameter(res, 1.0 / beta).value if per_t else res.value

    if lam == 1.0:
        if "qubit_noswitch" in config.probes:
            row["F_noswitch"] = finish(qfi_qubit_noswitch(beta, probe))
        if "qubit_switch" in config.probes:
            row["F_switch"] = finish(qfi_switch_analytic(beta, probe, control))
    else:
        if "qubit_noswitch" in config.probes:
            row["F_noswitch"] = finish(qfi_spectral(switch_family(probe, SwitchConfig(0.0), lam), beta))
        if "qubit_switch" in config.probes:
            row["F_switch"] = finish(qfi_spectral(switch_family(probe, control, lam), beta))
    if "harmonic_oscillator" in config.probes:
        if beta <= 0:
            row["F_ho"] = math.inf
        else:
            row["F_ho"] = finish(qfi_ho(beta, HOProbeSpec(gap)))
    if "F_noswitch" in row and "F_switch" in row:
        if lam == 1.0:
            row["chi"] = gain_ratio(beta, probe, control)
        else:
            row["chi"] = row["F_switch"] / row["F_noswitch"] if row["F_noswitch"] > 0 else math.nan
    return row


def cmd_sweep(config: SweepConfig) -> RunRecord:
    """Evaluate the requested probes on an evenly spaced grid.

    QFI columns are per temperature for temperature sweeps and per inverse
    temperature otherwise. Rows come out in grid order.
    """
    grid = np.linspace(config.start, config.stop, config.points)
    cols = config.columns()
    rows = []
    for v in grid:
        point = _point(config, float(v))
        rows.append([float(point[c]) for c in cols])
    lam = config.fixed.get("lam")
    method = "analytic" if lam is None or lam == 1.0 else "spectral"
    return RunRecord(config, cols, rows, method, timestamp=_timestamp())


def render_csv(record: RunRecord) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(record.columns)
    for row in record.rows:
        w.writerow([_fmt(v) for v in row])
    return buf.getvalue()


def render_record_json(record: RunRecord) -> str:
    payload = {
        "config": asdict(record.config),
        "columns": record.columns,
        "rows": record.rows,
        "method": record.method,
        "units": "k_B = hbar = 1",
        "tool_version": record.tool_version,
        "timestamp": record.timestamp,
    }
    return json.dumps(_json_safe(payload), indent=2, allow_nan=False) + "\n"


def _report(payload: dict) -> str:
    payload = dict(payload, tool_version=__version__, timestamp=_timestamp())
    return json.dumps(_json_safe(payload), indent=2, allow_nan=False) + "\n"


def cmd_optimize(xi: float) -> dict:
    res = solve_optimal_gap(xi)
    return {
        "xi": xi,
        "x_star": res.x_star,
        "residual": res.residual,
        "iterations": res.iterations,
        "bracket": list(res.bracket),
        "argmax_crosscheck": res.argmax_crosscheck,
        "optimal_T_for_unit_gap": 1.0 / res.x_star,
    }


def cmd_threshold(gap: float) -> dict:
    res = ho_threshold(ProbeSpec(gap))
    return {
        "gap": gap,
        "x_star": res.x_star,
        "t_threshold": res.t_threshold,
        "residual": res.residual,
        "polynomial_crosscheck": res.polynomial_crosscheck,
    }


def cmd_tur(beta: float, gap: float, xi: float, nu: int) -> dict:
    probe = ProbeSpec(gap)
    control = SwitchConfig.from_xi(xi)
    report = tur_consistency(beta, probe, control, PrecisionQuery(nu))
    limits = tur_limits(control)
    return {
        "beta": beta,
        "gap": gap,
        "xi": xi,
        "nu": nu,
        "bound": tur_bound(beta, probe, control),
        "delta_h": delta_h(beta, probe),
        "f_switch": report.f_switch,
        "cramer_rao_side": report.cramer_rao_side,
        "bound_side": report.bound_side,
        "consistency_pass": report.consistent,
        "low_T_limit": limits["low_T"],
        "high_T_limit": limits["high_T"],
    }


def headline() -> dict:
    probe = ProbeSpec(1.0)
    control = SwitchConfig(0.5)
    chi = gain_ratio_limits(probe, control)
    thr = ho_threshold(probe)
    return {
        "x_star_noswitch": solve_optimal_gap(0.0).x_star,
        "x_star_switch": solve_optimal_gap(1.0).x_star,
        "chi_limits": chi,
        "limit_betas": limit_betas(probe),
        "precision_percents": {k: precision_gain_percent(v) for k, v in chi.items()},
        "x_threshold": thr.x_star,
        "T_threshold": thr.t_threshold,
        "gap": probe.gap,
        "xi": control.xi,
    }


def fig2_csv(points: int | None = None) -> str:
    """Per-beta QFI of the switched probe over (gap, alpha) at T = 1."""
    d = FIGURE_DEFAULTS["fig2"]
    g0, g1, ng = d["gap"]
    a0, a1, na = d["alpha"]
    beta = 1.0 / d["temperature"]
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(["gap", "alpha", "xi", "F_switch"])
    for g in np.linspace(g0, g1, points or ng):
        for a in np.linspace(a0, a1, na):
            c = SwitchConfig(float(a))
            f = qfi_switch_analytic(beta, ProbeSpec(float(g)), c).value
            w.writerow([_fmt(g), _fmt(a), _fmt(c.xi), _fmt(f)])
    return buf.getvalue()


def figure_record(name: str, points: int | None = None) -> RunRecord:
    d = FIGURE_DEFAULTS[name]
    t0, t1, n = d["temperature"]
    probes = ("qubit_noswitch", "qubit_switch") if name == "fig3" else PROBES
    cfg = SweepConfig("temperature", t0, t1, points or n, {"gap": d["gap"], "xi": d["xi"]}, probes)
    return cmd_sweep(cfg)


def cmd_reproduce(figure: str, out: Path | None, points: int | None = None) -> dict:
    """Data behind one figure, or the headline numbers; returns ``{filename: text}``."""
    if figure == "headline":
        return {"headline.json": _report(headline())}
    if figure == "fig2":
        return {"fig2.csv": fig2_csv(points)}
    if figure in ("fig3", "fig4"):
        return {f"{figure}.csv": render_csv(figure_record(figure, points))}
    raise UsageError(f"unknown figure {figure!r}")


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise UsageError(message)


def _add_control(p):
    g = p.add_mutually_exclusive_group()
    g.add_argument("--alpha", type=float, help="control weight on |0> (alpha in [0, 1])")
    g.add_argument("--xi", type=float, help="control coherence xi = 4 alpha (1 - alpha)")


def _add_temperature(p):
    g = p.add_mutually_exclusive_group()
    g.add_argument("--beta", type=float, help="inverse bath temperature")
    g.add_argument("--temp", type=float, help="bath temperature T = 1/beta")


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(
        prog="qswitch-thermo",
        description="Qubit thermometry with a quantum switch. Units: k_B = hbar = 1.",
        epilog="Exit codes: 0 success, 2 usage error, 3 numerical failure.",
    )
    parser.add_argument("--version", action="version", version=__version__)
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    sw = sub.add_parser("sweep", help="QFI of the probes on a grid (CSV or JSON)")
    sw.add_argument("--param", choices=PARAMETERS, default="temperature")
    sw.add_argument("--start", type=float, required=True)
    sw.add_argument("--stop", type=float, required=True)
    sw.add_argument("--points", type=int, default=100)
    sw.add_argument("--gap", type=float, help="probe gap / oscillator spacing (default 1)")
    _add_control(sw)
    _add_temperature(sw)
    sw.add_argument("--lambda", dest="lam", type=float,
                    help="damping strength; values below 1 use the numeric spectral QFI (exploratory)")
    sw.add_argument("--probes", default=",".join(PROBES),
                    help="comma-separated subset of " + ", ".join(PROBES))
    sw.add_argument("--format", choices=("csv", "json"), default="csv")
    sw.add_argument("--out", type=Path)

    op = sub.add_parser("optimize", help="optimal gap-to-temperature ratio x* (JSON)")
    _add_control(op)
    op.add_argument("--out", type=Path)

    th = sub.add_parser("threshold", help="temperature below which the switch beats the oscillator (JSON)")
    th.add_argument("--gap", type=float, default=1.0)
    th.add_argument("--out", type=Path)

    tu = sub.add_parser("tur", help="thermodynamic uncertainty bound and its consistency check (JSON)")
    _add_temperature(tu)
    tu.add_argument("--gap", type=float, default=1.0)
    _add_control(tu)
    tu.add_argument("--nu", type=int, default=1, help="number of measurements")
    tu.add_argument("--out", type=Path)

    rp = sub.add_parser("reproduce", help="write the data behind fig2/fig3/fig4 or the headline numbers")
    rp.add_argument("figure", choices=("fig2", "fig3", "fig4", "headline"))
    rp.add_argument("--points", type=int, help="override the default grid size")
    rp.add_argument("--out", type=Path, help="output directory (default: stdout)")
    return parser


def _xi_from(args, default: float = 1.0) -> float:
    if args.alpha is not None:
        return SwitchConfig(args.alpha).xi
    return default if args.xi is None else args.xi


def _emit(text: str, out: Path | None):
    if out is None:
        sys.stdout.write(text)
    else:
        out.write_text(text)


def _fail(kind: str, message: str, code: int) -> int:
    sys.stderr.write(json.dumps({"error": kind, "message": message}) + "\n")
    return code


def run(argv=None) -> int:
    try:
        args = build_parser().parse_args(argv)
        if args.command == "sweep":
            fixed = {"gap": args.gap, "alpha": args.alpha, "xi": args.xi,
                     "beta": args.beta, "temperature": args.temp, "lam": args.lam}
            probes = tuple(p.strip() for p in args.probes.split(",") if p.strip())
            record = cmd_sweep(SweepConfig(args.param, args.start, args.stop, args.points, fixed, probes))
            if record.method == "spectral":
                sys.stderr.write("note: lambda < 1 uses the exploratory spectral QFI path\n")
            _emit(render_csv(record) if args.format == "csv" else render_record_json(record), args.out)
        elif args.command == "optimize":
            _emit(_report(cmd_optimize(_xi_from(args, default=0.0))), args.out)
        elif args.command == "threshold":
            _emit(_report(cmd_threshold(args.gap)), args.out)
        elif args.command == "tur":
            beta = _beta({"beta": args.beta, "temperature": args.temp})
            _emit(_report(cmd_tur(beta, args.gap, _xi_from(args), args.nu)), args.out)
        elif args.command == "reproduce":
            files = cmd_reproduce(args.figure, args.out, args.points)
            for name, text in files.items():
                if args.out is None:
                    sys.stdout.write(text)
                else:
                    args.out.mkdir(parents=True, exist_ok=True)
                    (args.out / name).write_text(text)
    except (UsageError, PreconditionError) as exc:
        return _fail("usage", str(exc), EXIT_USAGE)
    except NumericalError as exc:
        return _fail("numerical", str(exc), EXIT_NUMERICAL)
    return 0


def main(argv=None) -> int:
    return run(argv)


if __name__ == "__main__":
    raise SystemExit(main())
