"""Batch command-line interface.

Configuration is a flat ``key = value`` document (``#`` starts a comment)::

    L = 100nm
    lambda_C = 1.2um
    a1a2 = 200nm2
    Ly = 24um
    material = plasma
    lambda_P = 137nm

A JSON document produced by ``--output json`` is accepted as well; its
``config`` object is read back with the same keys.

Exit status: 0 success, 1 computation error, 2 usage or configuration error.
"""
from __future__ import annotations

import argparse
import csv
import io
import json
import math
import re
import sys
from dataclasses import dataclass
from datetime import datetime, timezone
from decimal import Decimal
from typing import Optional

import numpy as np

from . import checks, lifshitz
from .model import Geometry, Material, validate
from .observables import (
    BracketError,
    energy_correction,
    landscape_grid,
    lateral_force,
    optimal_wavenumber,
    stability_classify,
    sweep_k,
    torque,
    torque_max,
)
from .quadrature import QuadratureSpec
from .response import DEFAULT_SPEC, Method, g_pfa, g_value

SUBCOMMANDS = ("energy", "epp", "gk", "torque", "torque-max", "landscape", "sweep-k", "optimize", "compare", "check")

KEYS = (
    "L", "Lx", "Ly", "a1", "a2", "a1a2", "lambda_C", "b", "theta",
    "material", "lambda_P", "method", "rel_tol", "output", "output_path",
)
LENGTH_KEYS = {"L", "Lx", "Ly", "a1", "a2", "lambda_C", "b", "lambda_P"}
# decimal scale factors keep "100nm" at exactly the double nearest 1e-7
LENGTH_UNITS = {"nm": Decimal("1e-9"), "um": Decimal("1e-6"), "µm": Decimal("1e-6"), "mm": Decimal("1e-3"), "m": 1}
AREA_UNITS = {"nm2": Decimal("1e-18"), "um2": Decimal("1e-12"), "µm2": Decimal("1e-12"), "mm2": Decimal("1e-6"), "m2": 1}
ANGLE_UNITS = {"rad": 1, "deg": math.pi / 180.0}

_QUANTITY = re.compile(r"^([-+]?(?:\d+\.?\d*|\.\d+)(?:[eE][-+]?\d+)?)\s*([A-Za-zµ][A-Za-zµ0-9^]*)?$")


class ConfigError(ValueError):
    """Invalid configuration; the message names the key and, when known, the line."""


@dataclass(frozen=True)
class RunConfig:
    geometry: Geometry
    material: Material
    method: Method = Method.SCATTERING
    quadrature: QuadratureSpec = DEFAULT_SPEC
    output: str = "csv"
    output_path: str = "-"
    # amplitudes given as a product only (echoed back that way)
    product_only: bool = False

    def echo(self) -> dict:
        """Config as a key -> string mapping that parses back to an identical RunConfig."""
        g = self.geometry
        out = {"L": f"{g.L!r}m", "Lx": f"{g.Lx!r}m", "Ly": f"{g.Ly!r}m"}
        if self.product_only:
            out["a1a2"] = f"{g.a1a2!r}m2"
        else:
            out["a1"] = f"{g.a1!r}m"
            out["a2"] = f"{g.a2!r}m"
        out.update(
            lambda_C=f"{g.lambda_c!r}m", b=f"{g.b!r}m", theta=f"{g.theta!r}rad",
            material=self.material.kind.value,
        )
        if not self.material.is_perfect:
            out["lambda_P"] = f"{self.material.lambda_p!r}m"
        out["method"] = self.method.value
        out["rel_tol"] = repr(self.quadrature.rel_tol)
        out["output"] = self.output
        return out


def _where(key, line):
    return f"key '{key}'" + (f" (line {line})" if line is not None else "")


def _quantity(key, text, units, line, kind):
    m = _QUANTITY.match(text.strip())
    if not m:
        raise ConfigError(f"{_where(key, line)}: cannot parse {kind} {text!r}")
    number, suffix = m.groups()
    if suffix is None:
        raise ConfigError(f"{_where(key, line)}: missing unit suffix in {text!r} (use one of {', '.join(units)})")
    suffix = suffix.replace("^", "")
    if suffix not in units:
        raise ConfigError(f"{_where(key, line)}: bad unit suffix {suffix!r} (use one of {', '.join(units)})")
    scale = units[suffix]
    if isinstance(scale, Decimal):
        return float(Decimal(number) * scale)
    return float(number) * scale


def _pairs_from_text(text: str):
    stripped = text.lstrip()
    if stripped.startswith("{"):
        try:
            doc = json.loads(text)
        except json.JSONDecodeError as exc:
            raise ConfigError(f"invalid JSON document: {exc}") from None
        cfg = doc.get("config", doc) if isinstance(doc, dict) else None
        if not isinstance(cfg, dict):
            raise ConfigError("JSON document must be an object (optionally with a 'config' object)")
        return [(str(k), str(v), None) for k, v in cfg.items()]
    pairs = []
    for n, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ConfigError(f"line {n}: expected 'key = value', got {raw.strip()!r}")
        key, value = (s.strip() for s in line.split("=", 1))
        pairs.append((key, value, n))
    return pairs


def parse_config(text: str) -> RunConfig:
    """Parse and validate a configuration document; raises ConfigError."""
    raw: dict = {}
    lines: dict = {}
    for key, value, n in _pairs_from_text(text):
        if key not in KEYS:
            raise ConfigError(f"{_where(key, n)}: unknown key (allowed: {', '.join(KEYS)})")
        if key in raw:
            raise ConfigError(f"{_where(key, n)}: duplicate key (first set on line {lines[key]})")
        raw[key] = value
        lines[key] = n

    val = {}
    for key in sorted(LENGTH_KEYS & raw.keys(), key=lambda k: lines[k] or 0):
        val[key] = _quantity(key, raw[key], LENGTH_UNITS, lines[key], "length")
    if "a1a2" in raw:
        val["a1a2"] = _quantity("a1a2", raw["a1a2"], AREA_UNITS, lines["a1a2"], "area")
    theta = _quantity("theta", raw["theta"], ANGLE_UNITS, lines["theta"], "angle") if "theta" in raw else 0.0

    missing = [k for k in ("L", "Ly", "lambda_C", "material") if k not in raw]
    has_pair = "a1" in raw or "a2" in raw
    if "a1a2" in raw and has_pair:
        raise ConfigError(f"{_where('a1a2', lines['a1a2'])}: give either a1 and a2 or a1a2, not both")
    if not has_pair and "a1a2" not in raw:
        missing.append("a1a2 (or a1 and a2)")
    elif has_pair:
        missing += [k for k in ("a1", "a2") if k not in raw]
    if raw.get("material") == "plasma" and "lambda_P" not in raw:
        missing.append("lambda_P")
    if missing:
        raise ConfigError("missing required keys: " + ", ".join(missing))

    kind = raw["material"]
    if kind == "perfect":
        if "lambda_P" in raw:
            raise ConfigError(f"{_where('lambda_P', lines['lambda_P'])}: lambda_P meaningless for perfect mirrors")
        material = Material.perfect()
    elif kind == "plasma":
        if not val["lambda_P"] > 0:
            raise ConfigError(f"{_where('lambda_P', lines['lambda_P'])}: plasma wavelength must be positive")
        material = Material.plasma(val["lambda_P"])
    else:
        raise ConfigError(f"{_where('material', lines['material'])}: expected 'perfect' or 'plasma', got {kind!r}")

    try:
        method = Method(raw.get("method", "scattering"))
    except ValueError:
        raise ConfigError(
            f"{_where('method', lines.get('method'))}: expected one of {', '.join(m.value for m in Method)}"
        ) from None

    spec = DEFAULT_SPEC
    if "rel_tol" in raw:
        try:
            rel_tol = float(raw["rel_tol"])
        except ValueError:
            raise ConfigError(f"{_where('rel_tol', lines['rel_tol'])}: not a number: {raw['rel_tol']!r}") from None
        if not 0 < rel_tol < 1:
            raise ConfigError(f"{_where('rel_tol', lines['rel_tol'])}: must lie in (0, 1)")
        spec = spec.with_(rel_tol=rel_tol)

    output = raw.get("output", "csv")
    if output not in ("csv", "json"):
        raise ConfigError(f"{_where('output', lines.get('output'))}: expected 'csv' or 'json', got {output!r}")

    common = dict(L=val["L"], Lx=val.get("Lx", val["Ly"]), Ly=val["Ly"], lambda_c=val["lambda_C"],
                  b=val.get("b", 0.0), theta=theta)
    if "a1a2" in raw:
        geometry = Geometry.from_product(a1a2=val["a1a2"], **common)
    else:
        geometry = Geometry(a1=val["a1"], a2=val["a2"], **common)
    report = validate(geometry, material)
    if report.errors:
        raise ConfigError("; ".join(report.errors))
    return RunConfig(geometry, material, method, spec, output, raw.get("output_path", "-"), "a1a2" in raw)


# ---------------------------------------------------------------- subcommands


@dataclass
class Table:
    header: list
    rows: list


def _num(x):
    return float(x) if isinstance(x, (float, int, np.floating, np.integer)) and not isinstance(x, bool) else x


def _g(cfg: RunConfig, method=None):
    g = cfg.geometry
    return g_value(g.k, g.L, cfg.material, method or cfg.method, cfg.quadrature).value


def cmd_energy(cfg, args):
    G = _g(cfg)
    g = cfg.geometry
    return Table(["b_m", "theta_rad", "delta_e_J_per_m2", "g_J_per_m4", "method"],
                 [[g.b, g.theta, energy_correction(g, cfg.material, g=G), G, cfg.method.value]])


def cmd_epp(cfg, args):
    r = lifshitz.plane_energy(cfg.geometry.L, cfg.material)
    return Table(["L_m", "material", "e_pp_J_per_m2", "d1_J_per_m3", "d2_J_per_m4"],
                 [[r.L, cfg.material.kind.value, r.e_pp, r.d1, r.d2]])


def cmd_gk(cfg, args):
    g = cfg.geometry
    s = g_value(g.k, g.L, cfg.material, cfg.method, cfg.quadrature)
    g0 = g_pfa(0.0, g.L, cfg.material).value
    return Table(["k_rad_per_m", "L_m", "method", "g_J_per_m4", "error_estimate_J_per_m4", "ratio_to_g0"],
                 [[g.k, g.L, cfg.method.value, s.value, s.error_estimate, s.value / g0]])


def cmd_torque(cfg, args):
    G = _g(cfg)
    g = cfg.geometry
    return Table(
        ["b_m", "theta_rad", "torque_N_per_m", "lateral_force_N_per_m2", "method", "stability"],
        [[g.b, g.theta, torque(g, cfg.material, g=G), lateral_force(g, cfg.material, g=G),
          cfg.method.value, stability_classify(g).value]],
    )


def cmd_torque_max(cfg, args):
    g = cfg.geometry
    r = torque_max(g, cfg.material, cfg.method, cfg.quadrature)
    return Table(["method", "tau_N_per_m", "theta_star_rad", "theta_star_over_lambdaC_Ly"],
                 [[cfg.method.value, r.torque_per_area, r.theta_at, r.theta_at * g.Ly / g.lambda_c]])


def cmd_landscape(cfg, args):
    land = landscape_grid(cfg.geometry, cfg.material, cfg.method, args.b_steps, args.theta_steps, cfg.quadrature)
    return Table(["b_m", "theta_rad", "delta_e_J_per_m2"],
                 [[p.b, p.theta, p.delta_e_per_area] for p in land.points()])


def cmd_sweep_k(cfg, args):
    g = cfg.geometry
    k_min = args.k_min if args.k_min is not None else 0.1 / g.L
    k_max = args.k_max if args.k_max is not None else 10.0 / g.L
    if not (0 < k_min < k_max) or args.k_count < 2:
        raise ConfigError("sweep-k needs 0 < --k-min < --k-max and --k-count >= 2")
    ks = np.geomspace(k_min, k_max, args.k_count)
    rows = sweep_k(g.L, cfg.material, ks, g.a1a2, g.Ly, cfg.quadrature, workers=args.workers)
    for r in rows:
        if r.error:
            print(f"warning: k={r.k!r}: {r.error}", file=sys.stderr)
    return Table(["k_rad_per_m", "tau_scattering", "tau_pfa", "tau_perfect", "theta_star"],
                 [[r.k, r.tau_scattering, r.tau_pfa, r.tau_perfect, r.theta_star] for r in rows])


def cmd_optimize(cfg, args):
    L = cfg.geometry.L
    k = optimal_wavenumber(L, cfg.material, cfg.method, cfg.quadrature)
    return Table(["L_m", "method", "k_star_rad_per_m", "k_star_L", "lambda_C_star_m"],
                 [[L, cfg.method.value, k, k * L, 2 * math.pi / k]])


def cmd_compare(cfg, args):
    g = cfg.geometry
    rows = []
    base = None
    for method in (Method.SCATTERING, Method.PFA, Method.PERFECT_SCATTERING):
        G = g_value(g.k, g.L, cfg.material, method, cfg.quadrature).value
        tau = torque_max(g, cfg.material, method, g=G).torque_per_area
        base = tau if base is None else base
        rows.append([method.value, G, tau, tau / base])
    return Table(["method", "g_J_per_m4", "tau_max_N_per_m", "ratio_to_scattering"], rows)


COMMANDS = {
    "energy": cmd_energy, "epp": cmd_epp, "gk": cmd_gk, "torque": cmd_torque, "torque-max": cmd_torque_max,
    "landscape": cmd_landscape, "sweep-k": cmd_sweep_k, "optimize": cmd_optimize, "compare": cmd_compare,
}


# ---------------------------------------------------------------- output


def render(table: Table, fmt: str, config: Optional[dict] = None, comment: Optional[str] = None) -> str:
    rows = [[_num(v) for v in row] for row in table.rows]
    if fmt == "json":
        doc = {"config": config or {}, "rows": [dict(zip(table.header, r)) for r in rows]}
        if comment:
            doc = {"comment": comment, **doc}
        return json.dumps(doc, indent=1, allow_nan=True) + "\n"
    buf = io.StringIO()
    if comment:
        buf.write(f"# {comment}\n")
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(table.header)
    for r in rows:
        writer.writerow([repr(v) if isinstance(v, float) else v for v in r])
    return buf.getvalue()


def _emit(text: str, path: str):
    if path in ("-", ""):
        sys.stdout.write(text)
        sys.stdout.flush()
    else:
        with open(path, "w", newline="") as fh:
            fh.write(text)


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="corrugated-casimir", description="Casimir torque between corrugated plates.")
    p.add_argument("subcommand", choices=SUBCOMMANDS)
    p.add_argument("config", nargs="?", help="configuration file ('-' for standard input)")
    p.add_argument("--output", choices=("csv", "json"), help="override the config 'output' key")
    p.add_argument("--output-path", help="override the config 'output_path' key ('-' = standard output)")
    p.add_argument("--timestamp", action="store_true", help="prepend a comment line with the run time")
    p.add_argument("--k-min", type=float, help="sweep-k: smallest k in rad/m (default 0.1/L)")
    p.add_argument("--k-max", type=float, help="sweep-k: largest k in rad/m (default 10/L)")
    p.add_argument("--k-count", type=int, default=40, help="sweep-k: number of log-spaced k values")
    p.add_argument("--workers", type=int, default=1, help="sweep-k: worker processes")
    p.add_argument("--b-steps", type=int, default=65, help="landscape: grid points along b")
    p.add_argument("--theta-steps", type=int, default=65, help="landscape: grid points along theta")
    return p


def _run_check(args) -> int:
    def show(r):
        print(f"{'PASS' if r.passed else 'FAIL'} {r.name}: {r.detail} [{r.seconds:.1f}s]", flush=True)

    results = checks.run_checks(progress=show)
    failed = [r.name for r in results if not r.passed]
    print(f"{len(results) - len(failed)}/{len(results)} checks passed", flush=True)
    return 1 if failed else 0


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0) and 2
    if args.subcommand == "check":
        return _run_check(args)
    if args.config is None:
        print("error: a configuration file is required", file=sys.stderr)
        return 2
    try:
        text = sys.stdin.read() if args.config == "-" else open(args.config).read()
    except OSError as exc:
        print(f"error: cannot read config: {exc}", file=sys.stderr)
        return 2
    try:
        cfg = parse_config(text)
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return 2
    for w in validate(cfg.geometry, cfg.material).warnings:
        print(f"warning: {w}", file=sys.stderr)
    fmt = args.output or cfg.output
    path = args.output_path if args.output_path is not None else cfg.output_path
    try:
        table = COMMANDS[args.subcommand](cfg, args)
    except ConfigError as exc:
        print(f"usage error: {exc}", file=sys.stderr)
        return 2
    except (BracketError, RuntimeError, ValueError, ArithmeticError) as exc:
        print(f"computation error: {type(exc).__name__}: {exc}", file=sys.stderr)
        return 1
    comment = f"generated {datetime.now(timezone.utc).isoformat()}" if args.timestamp else None
    try:
        _emit(render(table, fmt, cfg.echo(), comment), path)
    except OSError as exc:
        print(f"error: cannot write output: {exc}", file=sys.stderr)
        return 1
    return 0


if __name__ == "__main__":
    sys.exit(main())
