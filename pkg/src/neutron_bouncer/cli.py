"""Command-line entry point: ``neutron-bouncer <command> [options]``.

Settings are resolved as built-in defaults, then a flat JSON config file
(``--config``), then command-line flags. Output goes to ``--out`` (written
atomically) or to stdout.
"""

from __future__ import annotations

import argparse
import hashlib
import io
import json
import os
import sys
import tempfile
import warnings

import numpy as np

from . import __version__, interferometry, propagator, qfi
from .airy import airy_zero
from .checks import run_checks
from .propagator import GridSpec
from .spectrum import FieldConfig, Spin, delta_from_field, energy_shift_binomial, field_from_delta, table1
from .units import PEV, make_constants, derive_scales

EXIT_OK, EXIT_VALIDATION, EXIT_CONVERGENCE, EXIT_IO = 0, 2, 3, 4

CONSTANT_KEYS = {"m_kg": "m", "g_m_per_s2": "g", "hbar_J_s": "hbar", "c_m_per_s": "c", "mu_n_J_per_T": "mu_n"}
DEFAULTS = {
    "field_tesla": 45.0,
    "fields_tesla": [45.0, 1200.0, 1e7],
    "levels": [1, 2, 3, 4],
    "level": 1,
    "time_max_s": 1e-3,
    "samples": 21,
    "grid_points": 4096,
    "grid_z_max_m": 120e-6,
    "grid_dt_s": 1e-7,
    "epsilon": 1e-6,
    "models": ["numeric", "short-time", "semiclassical", "full-analytic"],
    "sigma_m": None,
    "delta_override": None,
    "format": "csv",
    "out": None,
}
ALLOWED_KEYS = set(DEFAULTS) | set(CONSTANT_KEYS)


class UsageError(ValueError):
    pass


def load_config(path):
    try:
        with open(path, encoding="utf-8") as fh:
            data = json.load(fh)
    except OSError as exc:
        raise OSError(f"cannot read config {path}: {exc.strerror}") from exc
    except json.JSONDecodeError as exc:
        raise UsageError(f"config {path} is not valid JSON: {exc}") from exc
    if not isinstance(data, dict):
        raise UsageError("config must be a flat JSON object")
    unknown = set(data) - ALLOWED_KEYS
    if unknown:
        raise UsageError(f"unknown config key(s): {', '.join(sorted(unknown))}")
    return data


def resolve_config(args) -> dict:
    cfg = dict(DEFAULTS)
    if args.config:
        cfg.update(load_config(args.config))
    flags = {
        "field_tesla": args.field_tesla, "level": args.level, "time_max_s": args.t_max_s,
        "samples": args.samples, "grid_points": args.grid_points, "delta_override": args.delta_override,
        "format": args.format, "out": args.out,
    }
    cfg.update({k: v for k, v in flags.items() if v is not None})
    _validate(cfg)
    return cfg


def _validate(cfg):
    if cfg["format"] not in ("csv", "json"):
        raise UsageError("format must be csv or json")
    if cfg["field_tesla"] < 0:
        raise UsageError("field_tesla must be non-negative")
    if int(cfg["level"]) != cfg["level"] or cfg["level"] < 1:
        raise UsageError("level must be a positive integer")
    if not cfg["levels"] or any(int(n) != n or n < 1 for n in cfg["levels"]):
        raise UsageError("levels must be positive integers")
    if not cfg["time_max_s"] > 0:
        raise UsageError("time_max_s must be positive")
    if int(cfg["samples"]) != cfg["samples"] or cfg["samples"] < 2:
        raise UsageError("samples must be an integer >= 2")
    bad = set(cfg["models"]) - set(qfi.MODELS)
    if bad:
        raise UsageError(f"unknown QFI model(s): {', '.join(sorted(bad))}")
    if cfg["delta_override"] is not None and not 0 <= cfg["delta_override"] < 1:
        raise UsageError("delta_override must lie in [0, 1)")
    make_constants(_constant_overrides(cfg))
    GridSpec(z_max=cfg["grid_z_max_m"], points=cfg["grid_points"], dt=cfg["grid_dt_s"])


def _constant_overrides(cfg):
    return {CONSTANT_KEYS[k]: cfg[k] for k in CONSTANT_KEYS if k in cfg}


def config_hash(cfg) -> str:
    resolved = {k: v for k, v in cfg.items() if k != "out"}
    return hashlib.sha256(json.dumps(resolved, sort_keys=True).encode()).hexdigest()


def _field(cfg, constants):
    if cfg["delta_override"] is not None:
        print(f"NOTICE: inflated-delta test mode, delta = {cfg['delta_override']:g} "
              "(not a physical field)", file=sys.stderr)
        return field_from_delta(cfg["delta_override"], constants, allow_large=True)
    return delta_from_field(cfg["field_tesla"], constants)


def _times(cfg):
    return np.linspace(0.0, cfg["time_max_s"], int(cfg["samples"]))


# --- commands: each returns (columns, rows, exit_code) -----------------------------

def cmd_spectrum(cfg, constants):
    field = _field(cfg, constants)
    rows = []
    for n in cfg["levels"]:
        E = -airy_zero(n) * derive_scales(constants).eps0
        up = energy_shift_binomial(n, Spin.UP, field.delta, constants)
        down = energy_shift_binomial(n, Spin.DOWN, field.delta, constants)
        rows.append([n, airy_zero(n), E / PEV, (E + up) / PEV, (E + down) / PEV, up / PEV])
    return ["n", "gamma_n", "E_n_peV", "E_up_peV", "E_down_peV", "shift_up_peV"], rows, EXIT_OK


def cmd_table1(cfg, constants):
    levels = [int(n) for n in cfg["levels"]]
    rows = []
    for B in cfg["fields_tesla"]:
        recs = table1([B], levels, constants)
        rows.append([B, recs[0]["delta"]] + [r["shift_peV"] for r in recs])
    return ["B_tesla", "delta"] + [f"shift_n{n}_peV" for n in levels], rows, EXIT_OK


def cmd_interference(cfg, constants):
    field = _field(cfg, constants)
    trace = interferometry.interference_trace(_times(cfg), field, int(cfg["level"]))
    rows = [list(r) for r in zip(trace.times, trace.probability, trace.phase, trace.visibility)]
    return ["t_s", "p", "phase_rad", "visibility"], rows, EXIT_OK


def cmd_qfi(cfg, constants):
    n = int(cfg["level"])
    times = _times(cfg)
    rows, code = [], EXIT_OK
    for model in cfg["models"]:
        if model == "numeric":
            spec = GridSpec(z_max=cfg["grid_z_max_m"], points=int(cfg["grid_points"]), dt=cfg["grid_dt_s"])
            curve = propagator.qfi_numeric(n, times, cfg["epsilon"], spec, constants)
            if curve.flagged.any():
                bad = ", ".join(f"{t:.3g}" for t in curve.times[curve.flagged])
                print(f"numeric QFI did not converge under epsilon halving at t = {bad} s", file=sys.stderr)
                code = EXIT_CONVERGENCE
        elif model == "free-fall":
            packet = qfi.GaussianPacket(sigma=_sigma(cfg, constants))
            curve = qfi.QfiCurve(times, qfi.qfi_freefall_gaussian(packet, times, constants), model)
        else:
            curve = qfi.qfi_curve(n, times, model, constants)
        rows.extend([t, model, v] for t, v in zip(curve.times, curve.values))
    return ["t_s", "model", "F_Q"], rows, code


def _sigma(cfg, constants):
    return cfg["sigma_m"] if cfg["sigma_m"] is not None else 2 * derive_scales(constants).lambda_


def cmd_freefall(cfg, constants):
    field = _field(cfg, constants)
    packet = qfi.GaussianPacket(sigma=_sigma(cfg, constants))
    rows = []
    for t in _times(cfg):
        rows.append([t, qfi.qfi_freefall_gaussian(packet, t, constants), qfi.qfi_freefall_limit(t, constants),
                     qfi.freefall_phase(t, field.delta, constants),
                     abs(qfi.freefall_overlap(packet, t, field.delta, constants))])
    return ["t_s", "F_Q_closed", "F_Q_t6_limit", "phi_g", "overlap_mag"], rows, EXIT_OK


def cmd_check(cfg, constants, tolerance_scale=1.0):
    results = run_checks(constants, tolerance_scale)
    for r in results:
        print(f"{'PASS' if r.passed else 'FAIL'}  {r.name:45s} value={r.value:.3e} "
              f"tol={r.tolerance:.1e} margin={r.margin:+.3e}", file=sys.stderr)
    rows = [[r.name, r.value, r.tolerance, int(r.passed), r.margin] for r in results]
    code = EXIT_OK if all(r.passed for r in results) else EXIT_CONVERGENCE
    return ["name", "value", "tolerance", "passed", "margin"], rows, code


COMMANDS = {
    "spectrum": cmd_spectrum, "table1": cmd_table1, "interference": cmd_interference,
    "qfi": cmd_qfi, "freefall": cmd_freefall, "check": cmd_check,
}


# --- output -----------------------------------------------------------------

def _fmt(v):
    if isinstance(v, str):
        return v
    if isinstance(v, (int, np.integer)) and not isinstance(v, bool):
        return str(int(v))
    return "%.17g" % float(v)


def render(columns, rows, cfg) -> str:
    header = f"neutron-bouncer {__version__} config-sha256={config_hash(cfg)}"
    if cfg["format"] == "json":
        data = {"version": __version__, "config_sha256": config_hash(cfg),
                "columns": {c: [r[i] for r in rows] for i, c in enumerate(columns)}}
        return json.dumps(data, indent=1, default=float) + "\n"
    buf = io.StringIO()
    buf.write(f"# {header}\n")
    buf.write(",".join(columns) + "\n")
    for r in rows:
        buf.write(",".join(_fmt(v) for v in r) + "\n")
    return buf.getvalue()


def write_atomic(path, text):
    directory = os.path.dirname(os.path.abspath(path))
    fd, tmp = tempfile.mkstemp(dir=directory, prefix=".tmp-", suffix=".part")
    try:
        with os.fdopen(fd, "w", encoding="utf-8", newline="\n") as fh:
            fh.write(text)
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise


def build_parser():
    parser = argparse.ArgumentParser(prog="neutron-bouncer", description=__doc__.splitlines()[0])
    parser.add_argument("--version", action="version", version=__version__)
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--config", help="flat JSON config file")
    common.add_argument("--out", help="output file (default: stdout)")
    common.add_argument("--format", choices=("csv", "json"))
    common.add_argument("--field-tesla", type=float)
    common.add_argument("--level", type=int)
    common.add_argument("--t-max-s", type=float)
    common.add_argument("--samples", type=int)
    common.add_argument("--grid-points", type=int)
    common.add_argument("--delta-override", type=float, help="inflated-delta test mode")
    sub = parser.add_subparsers(dest="command", required=True)
    for name in COMMANDS:
        p = sub.add_parser(name, parents=[common])
        if name == "check":
            p.add_argument("--tolerance-scale", type=float, default=1.0,
                           help="multiply every tolerance (values < 1 tighten)")
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        cfg = resolve_config(args)
        constants = make_constants(_constant_overrides(cfg))
        with warnings.catch_warnings():
            warnings.simplefilter("ignore", qfi.ShortTimeWarning)
            if args.command == "check":
                columns, rows, code = cmd_check(cfg, constants, args.tolerance_scale)
            else:
                columns, rows, code = COMMANDS[args.command](cfg, constants)
    except OSError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_IO
    except propagator.ConvergenceError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_CONVERGENCE
    except ValueError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_VALIDATION
    text = render(columns, rows, cfg)
    if cfg["out"]:
        try:
            write_atomic(cfg["out"], text)
        except OSError as exc:
            print(f"error: cannot write {cfg['out']}: {exc.strerror}", file=sys.stderr)
            return EXIT_IO
    else:
        sys.stdout.write(text)
    return code


if __name__ == "__main__":
    sys.exit(main())
