"""Command-line entry point: figure data as CSV/JSON plus the verification suite.

Every file written with ``--output`` gets a ``<output>.manifest.json`` sidecar
recording the command, the full parameter set, the tool version and the
SHA-256 of the output.
"""

from __future__ import annotations

import argparse
import csv
import hashlib
import io
import json
import math
import os
import re
import sys
import tempfile
from typing import List, Optional, Sequence

import numpy as np

from . import __version__
from .entanglement import entanglement_closed_form, full_state_entanglement
from .evolution import brute_force_evolve
from .field_geometry import (
    DEFAULT_HORIZON,
    TransformedCoords,
    classify_topology,
    diagonalized_field_metric,
    field_metric_closed_form,
)
from .geometry import (
    CurvatureDomainError,
    curvature_closed_form,
    curvature_extrema,
    entanglement_vs_curvature,
)
from .states import BlochAngles, SystemConfig
from .verify import LEVELS, run_verification

EXIT_OK, EXIT_VALIDATION, EXIT_VERIFY, EXIT_IO = 0, 1, 2, 3

_ANGLE = re.compile(r"^\s*([+-]?)\s*(\d*\.?\d*(?:[eE][+-]?\d+)?)\s*\*?\s*pi\s*(?:/\s*(\d*\.?\d+))?\s*$")


class ValidationError(ValueError):
    pass


def parse_angle(text: str) -> float:
    """Radians, or a multiple/fraction of pi such as ``pi/8``, ``3pi/8``, ``-pi/2``."""
    text = text.strip()
    m = _ANGLE.match(text)
    if m:
        sign, coef, denom = m.groups()
        value = (float(coef) if coef else 1.0) * math.pi / (float(denom) if denom else 1.0)
        return -value if sign == "-" else value
    try:
        value = float(text)
    except ValueError:
        raise ValidationError(f"cannot parse angle {text!r}") from None
    if not math.isfinite(value):
        raise ValidationError(f"angle {text!r} is not finite")
    return value


def parse_angle_list(text: str) -> List[float]:
    items = [t for t in text.split(",") if t.strip()]
    if not items:
        raise ValidationError("empty angle list")
    return [parse_angle(t) for t in items]


def parse_int_list(text: str) -> List[int]:
    try:
        values = [int(t) for t in text.split(",") if t.strip()]
    except ValueError:
        raise ValidationError(f"cannot parse integer list {text!r}") from None
    if not values:
        raise ValidationError("empty integer list")
    return values


def fmt(x) -> str:
    if x is None or (isinstance(x, str) and x == ""):
        return ""
    if isinstance(x, (int, np.integer)):
        return str(int(x))
    return f"{float(x):.15g}"


def render(columns: Sequence[str], rows: Sequence[Sequence], fmt_name: str) -> str:
    if fmt_name == "csv":
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(columns)
        for row in rows:
            w.writerow([v if isinstance(v, str) else fmt(v) for v in row])
        return buf.getvalue()
    records = [{c: _json_value(v) for c, v in zip(columns, row)} for row in rows]
    return json.dumps({"columns": list(columns), "rows": records}, indent=1) + "\n"


def _json_value(v):
    if isinstance(v, str):
        return v or None
    if isinstance(v, (int, np.integer)):
        return int(v)
    # round-trip through the CSV formatting so both formats carry the same digits
    return float(fmt(v))


def atomic_write(path: str, text: str):
    directory = os.path.dirname(os.path.abspath(path))
    fd, tmp = tempfile.mkstemp(dir=directory, prefix=".tmp-", suffix=os.path.basename(path))
    try:
        with os.fdopen(fd, "w", encoding="utf-8", newline="") as fh:
            fh.write(text)
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise


def emit(args, text: str, parameters: dict):
    if not args.output:
        sys.stdout.write(text)
        return
    atomic_write(args.output, text)
    manifest = {
        "command": args.command,
        "parameters": parameters,
        "version": __version__,
        "output": os.path.basename(args.output),
        "sha256": hashlib.sha256(text.encode("utf-8")).hexdigest(),
    }
    atomic_write(args.output + ".manifest.json", json.dumps(manifest, indent=1, sort_keys=True) + "\n")


def _config(args, spins: int) -> SystemConfig:
    try:
        return SystemConfig(
            spins,
            coupling=args.coupling,
            field=args.field,
            gauge_factor=args.gamma,
        )
    except ValueError as exc:
        raise ValidationError(str(exc)) from None


def cmd_entanglement_curve(args):
    if args.steps < 2:
        raise ValidationError("--steps must be at least 2")
    if args.field != 0:
        raise ValidationError("entanglement-curve covers the zero-field model; drop --field")
    config = _config(args, args.spins)
    config.require_pair()
    thetas = parse_angle_list(args.theta)
    phi = parse_angle(args.phi)
    chis = np.linspace(0, 2 * math.pi, args.steps)
    numeric = config.spins <= config.oracle_cap
    rows = []
    for th in thetas:
        closed = entanglement_closed_form(config, th, chis)
        for chi, e in zip(chis, closed):
            e_num = full_state_entanglement(brute_force_evolve(config, BlochAngles(th, phi), chi)) if numeric else ""
            rows.append((chi, th, e, e_num))
    params = {"spins": config.spins, "theta": thetas, "phi": phi, "steps": args.steps, "format": args.format}
    emit(args, render(("chi", "theta", "E_closed", "E_numeric"), rows, args.format), params)


def cmd_curvature_profile(args):
    if args.steps < 2:
        raise ValidationError("--steps must be at least 2")
    spins = parse_int_list(args.spins)
    if min(spins) < 2:
        raise ValidationError("curvature-profile needs N >= 2")
    thetas = np.linspace(0, math.pi, args.steps)
    rows = []
    for n in spins:
        for th, r in zip(thetas, curvature_closed_form(_config(args, n), thetas)):
            rows.append((n, th, r))
    params = {"spins": spins, "gamma": args.gamma, "steps": args.steps, "format": args.format}
    emit(args, render(("N", "theta", "R"), rows, args.format), params)


def cmd_ent_vs_curvature(args):
    if args.steps < 2:
        raise ValidationError("--steps must be at least 2")
    spins = parse_int_list(args.spins)
    if min(spins) < 2:
        raise ValidationError("ent-vs-curvature needs N >= 2")
    chi = parse_angle(args.chi)
    rows = []
    for n in spins:
        config = _config(args, n)
        lo, hi = curvature_extrema(config)
        for r in np.linspace(lo, hi, args.steps):
            try:
                rows.append((n, r, entanglement_vs_curvature(config, chi, r), ""))
            except CurvatureDomainError as exc:
                rows.append((n, r, "", str(exc)))
    params = {"spins": spins, "chi": chi, "gamma": args.gamma, "steps": args.steps, "format": args.format}
    emit(args, render(("N", "R", "E", "error"), rows, args.format), params)


def cmd_metric(args):
    if args.steps < 2:
        raise ValidationError("--steps must be at least 2")
    config = _config(args, args.spins)
    if config.coupling == 0:
        raise ValidationError("--coupling must be nonzero")
    phi = parse_angle(args.phi)
    rows = []
    for th in np.linspace(0, math.pi, args.steps):
        g = field_metric_closed_form(config, th, phi)
        gp = diagonalized_field_metric(config, TransformedCoords(th, 0.0, phi)).g22 if config.field else ""
        rows.append((th, g.g11, g.g22, g.g12, gp))
    params = {
        "spins": config.spins, "coupling": config.coupling, "field": config.field,
        "gamma": config.gauge_factor, "phi": phi, "steps": args.steps, "format": args.format,
    }
    cols = ("theta", "g_theta_theta", "g_chi_chi", "g_theta_chi", "gp_chi_chi")
    emit(args, render(cols, rows, args.format), params)


def cmd_classify_topology(args):
    config = _config(args, args.spins)
    if config.coupling == 0:
        raise ValidationError("--coupling must be nonzero")
    if not args.horizon > 0:
        raise ValidationError("--horizon must be positive")
    phi = parse_angle(args.phi)
    report = classify_topology(config, phi, args.horizon, max(args.steps, 100))
    out = report.to_dict()
    params = {"spins": config.spins, "coupling": config.coupling, "field": config.field, "phi": phi,
              "horizon": args.horizon, "steps": max(args.steps, 100)}
    emit(args, json.dumps(out, indent=1) + "\n", params)


def cmd_verify(args):
    overrides = {}
    for item in args.tolerance or []:
        name, _, value = item.partition("=")
        try:
            overrides[name.strip()] = float(value)
        except ValueError:
            raise ValidationError(f"bad --tolerance {item!r}; expected NAME=VALUE") from None
    report = run_verification(args.level, overrides)
    emit(args, json.dumps(report.to_dict(), indent=1) + "\n", {"level": args.level, "tolerance": overrides})
    if not report.passed:
        print(f"verification failed: {report.first_failure}", file=sys.stderr)
        return EXIT_VERIFY
    return EXIT_OK


def _common(p: argparse.ArgumentParser, spins_default, steps_default, theta=None, chi=None):
    p.add_argument("--spins", default=spins_default, type=type(spins_default))
    p.add_argument("--coupling", type=float, default=1.0)
    p.add_argument("--field", type=float, default=0.0)
    p.add_argument("--gamma", type=float, default=1.0)
    p.add_argument("--theta", default=theta or "pi/2")
    p.add_argument("--phi", default="0")
    p.add_argument("--chi", default=chi or "pi/2")
    p.add_argument("--steps", type=int, default=steps_default)
    p.add_argument("--format", choices=("csv", "json"), default="csv")
    p.add_argument("--output", default=None, help="destination file (stdout when omitted)")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="ising-geometry", description=__doc__.splitlines()[0])
    parser.add_argument("--version", action="version", version=__version__)
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("entanglement-curve", help="E(chi) for several initial polar angles")
    _common(p, 6, 501, theta="pi/8,pi/4,3pi/8,pi/2")
    p.set_defaults(func=cmd_entanglement_curve)

    p = sub.add_parser("curvature-profile", help="scalar curvature R(theta) for several N")
    _common(p, "2,3,6,9", 181)
    p.set_defaults(func=cmd_curvature_profile)

    p = sub.add_parser("ent-vs-curvature", help="entanglement as a function of curvature")
    _common(p, "2,3,6,9", 100)
    p.set_defaults(func=cmd_ent_vs_curvature)

    p = sub.add_parser("metric", help="Fubini-Study metric components over theta")
    _common(p, 6, 181)
    p.set_defaults(func=cmd_metric)

    p = sub.add_parser("classify-topology", help="manifold topology with a transverse field (JSON)")
    _common(p, 6, 20000)
    p.add_argument("--horizon", type=float, default=DEFAULT_HORIZON)
    p.set_defaults(func=cmd_classify_topology)

    p = sub.add_parser("verify", help="run the oracle/invariant suite")
    p.add_argument("--level", choices=LEVELS, default="quick")
    p.add_argument("--tolerance", action="append", metavar="NAME=VALUE",
                   help="override one check's tolerance (repeatable)")
    p.add_argument("--format", choices=("json",), default="json")
    p.add_argument("--output", default=None)
    p.set_defaults(func=cmd_verify)
    return parser


def main(argv: Optional[Sequence[str]] = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return EXIT_OK if exc.code == 0 else EXIT_VALIDATION
    try:
        return args.func(args) or EXIT_OK
    except OSError as exc:
        print(f"I/O error: {exc}", file=sys.stderr)
        return EXIT_IO
    except ValueError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_VALIDATION


if __name__ == "__main__":
    sys.exit(main())
