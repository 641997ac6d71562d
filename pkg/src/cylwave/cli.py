"""Command-line interface: cutoffs, mode, fields, currents, fig3, verify."""
from __future__ import annotations

import argparse
import json
import math
import sys
from dataclasses import asdict, fields as dc_fields
from importlib import resources

import numpy as np

from . import __version__, emdyn, gauge, profiles, quantize, specfun, verify
from .model import (Coaxial, Family, Hollow, Medium, ModeError, ModeSpec, Quadratures,
                    cutoff_roots, solve_mode)

EXIT_OK, EXIT_FAIL, EXIT_USAGE, EXIT_NUMERIC = 0, 1, 2, 3


class UsageError(Exception):
    pass


# ---------------------------------------------------------------------------
# deterministic serialization

def fmt(x):
    if x is None:
        return ""
    if isinstance(x, (bool, np.bool_)):
        return "true" if x else "false"
    if isinstance(x, (int, np.integer)):
        return str(int(x))
    if isinstance(x, (float, np.floating)):
        x = float(x)
        if not math.isfinite(x):
            return "nan" if math.isnan(x) else ("inf" if x > 0 else "-inf")
        return f"{x:.16e}"
    return str(x)


def to_json(obj, indent=0):
    pad, inner = "  " * indent, "  " * (indent + 1)
    if isinstance(obj, dict):
        if not obj:
            return "{}"
        items = [f"{inner}{json.dumps(str(k))}: {to_json(v, indent + 1)}" for k, v in obj.items()]
        return "{\n" + ",\n".join(items) + "\n" + pad + "}"
    if isinstance(obj, (list, tuple)):
        if not obj:
            return "[]"
        return "[\n" + ",\n".join(inner + to_json(v, indent + 1) for v in obj) + "\n" + pad + "]"
    if obj is None:
        return "null"
    if isinstance(obj, (bool, np.bool_)):
        return "true" if obj else "false"
    if isinstance(obj, (int, np.integer)):
        return str(int(obj))
    if isinstance(obj, (float, np.floating)):
        x = float(obj)
        return f"{x:.16e}" if math.isfinite(x) else "null"
    return json.dumps(str(obj))


def load_schema():
    text = resources.files("cylwave").joinpath("schema/output.schema.json").read_text()
    return json.loads(text)


def render(doc, fmt_name):
    if fmt_name == "json":
        return to_json(doc) + "\n"
    lines = [f"# {k}: {fmt(v)}" for k, v in doc["meta"].items()]
    rows = doc.get("rows", [])
    if rows:
        cols = list(rows[0].keys())
        lines.append(",".join(cols))
        lines += [",".join(fmt(r.get(c)) for c in cols) for r in rows]
    for k, v in (doc.get("summary") or {}).items():
        lines.append(f"# summary {k}: {fmt(v)}")
    if "data" in doc:
        lines += _flatten(doc["data"])
    return "\n".join(lines) + "\n"


def _flatten(d, prefix=""):
    out = []
    for k, v in d.items():
        if isinstance(v, dict):
            out += _flatten(v, f"{prefix}{k}.")
        else:
            out.append(f"{prefix}{k},{fmt(v)}")
    return out


def emit(doc, args):
    text = render(doc, args.format)
    if args.out:
        with open(args.out, "w", encoding="utf-8", newline="\n") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)


# ---------------------------------------------------------------------------
# argument handling

def _common(p):
    g = p.add_argument_group("mode")
    g.add_argument("--geometry", choices=["coax", "hollow"], default="coax")
    g.add_argument("--a", type=float, default=1e-3, help="inner / guide radius (m)")
    g.add_argument("--b", type=float, default=2e-3, help="outer radius (m), coax only")
    g.add_argument("--epsilon-r", type=float, default=1.0)
    g.add_argument("--mu-r", type=float, default=1.0)
    g.add_argument("--family", choices=["TEM", "TM", "TE"], default="TEM")
    g.add_argument("--n", type=int, default=0)
    g.add_argument("--m", type=int, default=1)
    g.add_argument("--L", type=float, default=1e-2, help="guide period (m)")
    g.add_argument("--l", type=int, default=1, help="longitudinal index, beta = 2*pi*l/L")
    g.add_argument("--X", type=float, default=1.0)
    g.add_argument("--Y", type=float, default=0.0)
    g.add_argument("--theta0", type=float, default=0.0, help="radians")
    g.add_argument("--phi0", type=float, default=0.0, help="radians")
    o = p.add_argument_group("output")
    o.add_argument("--format", choices=["csv", "json"], default=None)
    o.add_argument("--out", default=None)
    o.add_argument("--hbar", type=float, default=quantize.HBAR)
    o.add_argument("--strict", action="store_true")
    o.add_argument("--seed", type=int, default=0)


def build_parser():
    parser = argparse.ArgumentParser(prog="cylwave", description=__doc__)
    parser.add_argument("--version", action="version", version=__version__)
    sub = parser.add_subparsers(dest="command", required=True)
    p = sub.add_parser("cutoffs", help="cutoff wavenumbers and frequencies")
    _common(p)
    p.add_argument("--m-max", type=int, default=3)
    p = sub.add_parser("mode", help="modal and quantization constants of one mode")
    _common(p)
    p = sub.add_parser("fields", help="E and B on an (r, theta) grid")
    _common(p)
    p.add_argument("--nr", type=int, default=8)
    p.add_argument("--ntheta", type=int, default=8)
    p.add_argument("--z", type=float, default=0.0)
    p.add_argument("--t", type=float, default=0.0)
    p = sub.add_parser("currents", help="surface charge and current on every electrode")
    _common(p)
    p.add_argument("--npts", type=int, default=9)
    p.add_argument("--z", type=float, default=0.0)
    p.add_argument("--t", type=float, default=0.0)
    p = sub.add_parser("fig3", help="coax TE n=0 gauge profile minus g_vir")
    _common(p)
    p.add_argument("--ratios", default="2", help="comma-separated b/a values")
    p.add_argument("--ms", default="1,2,3,4", help="comma-separated m values")
    p.add_argument("--npts", type=int, default=201)
    p = sub.add_parser("verify", help="run the verification suite")
    _common(p)
    p.add_argument("--config", default=None, help="JSON file with grid/tolerance overrides")
    return parser


def _float_list(text, name):
    try:
        vals = [float(s) for s in text.split(",") if s.strip()]
    except ValueError:
        raise UsageError(f"--{name}: expected comma-separated numbers, got {text!r}") from None
    if not vals:
        raise UsageError(f"--{name}: empty list")
    return vals


def _geometry(args):
    if args.geometry == "hollow":
        return Hollow(args.a)
    return Coaxial(args.a, args.b)


def _medium(args):
    return Medium.from_relative(args.epsilon_r, args.mu_r)


def _spec(args):
    if args.family == "TEM":
        return ModeSpec("TEM", theta0=args.theta0, phi0=args.phi0)
    return ModeSpec(args.family, args.n, args.m, theta0=args.theta0, phi0=args.phi0)


def _mode(args):
    return solve_mode(_spec(args), _geometry(args), _medium(args), args.L, args.l)


def _meta(args, mode=None, **extra):
    meta = {"program": "cylwave", "version": __version__, "command": args.command}
    if mode is not None:
        meta.update(mode=mode.describe(), a_m=mode.a, b_m=mode.b if mode.coaxial else None,
                    L_m=mode.L, l=mode.l, theta0_rad=mode.spec.theta0, phi0_rad=mode.spec.phi0,
                    X=args.X, Y=args.Y)
    meta.update(extra)
    return meta


def _doc(args, meta, rows=None, data=None, summary=None):
    doc = {"command": args.command, "version": __version__, "meta": meta}
    if rows is not None:
        doc["rows"] = rows
    if data is not None:
        doc["data"] = data
    if summary is not None:
        doc["summary"] = summary
    return doc


# ---------------------------------------------------------------------------
# commands

def cmd_cutoffs(args):
    geo, med, spec = _geometry(args), _medium(args), _spec(args)
    if spec.family is Family.TEM:
        if not isinstance(geo, Coaxial):
            raise ModeError("no TEM mode exists in a hollow guide")
        rows = [{"m": 0, "x": 0.0, "k_c": 0.0, "omega_c": 0.0, "f_c": 0.0}]
        return _doc(args, _meta(args, geometry=args.geometry, family="TEM",
                                note="k_c = 0 (no cutoff)"), rows=rows)
    if args.m_max < 1:
        raise UsageError("--m-max must be at least 1")
    xs = cutoff_roots(spec, geo, args.m_max)
    rows = []
    for m, x in enumerate(xs, 1):
        kc = x / geo.a
        wc = med.c * kc
        rows.append({"m": m, "x": x, "k_c": kc, "omega_c": wc, "f_c": wc / (2 * math.pi)})
    meta = _meta(args, geometry=args.geometry, family=spec.family.value, n=spec.n,
                 units="x = k_c*a [1]; k_c [1/m]; omega_c [rad/s]; f_c [Hz]")
    return _doc(args, meta, rows=rows)


def cmd_mode(args):
    mode = _mode(args)
    mc = emdyn.modal_constants(mode, args.hbar)
    qr = quantize.quantize(mode, args.hbar)
    data = {
        "family": mode.family.value, "n": mode.n, "m": mode.m,
        "k_c": mode.k_c, "beta": mode.beta, "k": mode.k, "omega": mode.omega,
        "frequency_hz": mode.omega / (2 * math.pi), "omega_c": mode.omega_c,
        "v_phi": mode.v_phi, "c": mode.c,
        "normalization": {k: v for k, v in asdict(mode.norm).items()},
        "modal_constants": asdict(mc),
        "quantization": asdict(qr),
    }
    data.update(h_eff=mc.h_eff, K=mc.K, gap=qr.gap, photon_mass=qr.photon_mass)
    meta = _meta(args, mode, units="SI; L_H_inv [1/(H m)] with L_H_over_beta2 [H m]")
    return _doc(args, meta, data=data)


def cmd_fields(args):
    mode = _mode(args)
    if args.nr < 1 or args.ntheta < 1:
        raise UsageError("--nr and --ntheta must be positive")
    _, E_m = quantize.quantum_amplitude(mode, args.hbar)
    lo, hi = profiles.r_domain(mode)
    rs = np.linspace(lo, hi, args.nr)
    ths = np.linspace(0.0, 2 * math.pi, args.ntheta, endpoint=False)
    R, T = np.meshgrid(rs, ths, indexing="ij")
    q = Quadratures(args.X, args.Y)
    fs = profiles.field_at(mode, E_m, q, R.ravel(), T.ravel(), args.z, args.t)
    names = ("E_r", "E_theta", "E_z", "B_r", "B_theta", "B_z")
    comps = list(fs.E) + list(fs.B)
    rows = []
    for i, (r, th) in enumerate(zip(R.ravel(), T.ravel())):
        row = {"r": r, "theta": th}
        row.update({nm: float(np.broadcast_to(c, R.ravel().shape)[i]) for nm, c in zip(names, comps)})
        rows.append(row)
    meta = _meta(args, mode, z_m=args.z, t_s=args.t, E_m=E_m,
                 units="r [m]; theta [rad]; E [V/m]; B [T]")
    return _doc(args, meta, rows=rows)


def cmd_currents(args):
    mode = _mode(args)
    if args.npts < 2:
        raise UsageError("--npts must be at least 2")
    _, E_m = quantize.quantum_amplitude(mode, args.hbar)
    q = Quadratures(args.X, args.Y)
    rows = []
    real = {}
    for el in emdyn.valid_electrodes(mode):
        plane = el in (emdyn.Electrode.VIR_TOP, emdyn.Electrode.VIR_BOTTOM)
        if plane:
            lo, hi = profiles.r_domain(mode)
            coords = np.linspace(lo, hi, args.npts)
        else:
            coords = mode.spec.theta0 + np.linspace(0.0, 2 * math.pi, args.npts, endpoint=False)
        for c in coords:
            s = emdyn.surface_state(mode, el, q, c, args.z, args.t, E_m)
            row = {"electrode": el.value, "coord": c, "sigma": s.sigma, "j_z": s.j_z,
                   "j_transverse": s.j_t, "junction_mismatch": None}
            rows.append(row)
            if not plane and c == coords[0]:
                real[el] = s.j_t
    if mode.virtual:
        # the radial current of a virtual plane feeds the azimuthal current of the
        # conductor it meets; report the relative magnitude mismatch there
        lo, hi = profiles.r_domain(mode)
        walls = ({mode.a: emdyn.Electrode.IN, mode.b: emdyn.Electrode.OUT} if mode.coaxial
                 else {mode.a: emdyn.Electrode.FRONT})
        for row in rows:
            if row["electrode"].startswith("vir") and row["coord"] in walls:
                jw = real[walls[row["coord"]]]
                row["junction_mismatch"] = abs(abs(row["j_transverse"]) - abs(jw)) / max(abs(jw), 1e-300)
    lq = emdyn.line_charge_current(mode, q, args.z, args.t, E_m)
    meta = _meta(args, mode, z_m=args.z, t_s=args.t, E_m=E_m,
                 units="coord: theta [rad] on cylinders, r [m] on virtual planes; "
                       "sigma [C/m^2]; j [A/m]")
    return _doc(args, meta, rows=rows, summary=lq._asdict())


def cmd_fig3(args):
    ratios = _float_list(args.ratios, "ratios")
    ms = [int(m) for m in _float_list(args.ms, "ms")]
    med = _medium(args)
    rows, summary = [], {}
    for ratio in ratios:
        for m in ms:
            mode = solve_mode(ModeSpec("TE", 0, m), Coaxial(args.a, ratio * args.a), med, args.L, args.l)
            r, d = gauge.fig3_difference(mode, args.npts)
            for ri, di in zip(r, d):
                rows.append({"kind": "profile", "b_over_a": ratio, "m": m, "r_over_a": ri / args.a,
                             "difference": di})
            worst = float(np.max(np.abs(d)))
            rows.append({"kind": "summary", "b_over_a": ratio, "m": m, "r_over_a": None,
                         "difference": worst})
            summary[f"max_abs_difference[b/a={ratio:g},m={m}]"] = worst
    return _doc(args, _meta(args, family="TE", n=0), rows=rows, summary=summary)


_CONFIG_KEYS = {"grid", "tolerances", "seed", "strict", "cartesian_ratios"}


def _load_config(path):
    try:
        with open(path, encoding="utf-8") as fh:
            cfg = json.load(fh)
    except OSError as exc:
        raise UsageError(f"config: cannot read {path}: {exc.strerror}") from None
    except json.JSONDecodeError as exc:
        raise UsageError(f"config: line {exc.lineno}: {exc.msg}") from None
    if not isinstance(cfg, dict):
        raise UsageError("config: top level must be an object")
    for k in cfg:
        if k not in _CONFIG_KEYS:
            raise UsageError(f"config: unknown field {k!r}")
    grid = cfg.get("grid", {})
    names = {f.name for f in dc_fields(verify.GridSpec)}
    for k, v in grid.items():
        if k not in names:
            raise UsageError(f"config: unknown field 'grid.{k}'")
        if isinstance(v, list):
            grid[k] = tuple(v)
    for k, v in cfg.get("tolerances", {}).items():
        if k not in verify.DEFAULT_TOLERANCES:
            raise UsageError(f"config: unknown field 'tolerances.{k}'")
        if not isinstance(v, (int, float)) or not v > 0:
            raise UsageError(f"config: field 'tolerances.{k}' must be a positive number")
    return cfg


def cmd_verify(args):
    cfg = _load_config(args.config) if args.config else {}
    try:
        grid = verify.GridSpec(**cfg.get("grid", {}))
    except TypeError as exc:
        raise UsageError(f"config: grid: {exc}") from None
    seed = int(cfg.get("seed", args.seed))
    strict = bool(cfg.get("strict", False) or args.strict)
    tol = cfg.get("tolerances")
    reports = verify.run_suite(grid, tol, seed, strict)
    reports += verify.cartesian_limit_suite(cfg.get("cartesian_ratios", [2.0, 1.5, 1.1, 1.01, 1.001]),
                                           tol, strict)
    summary = verify.summarize(reports)
    doc = _doc(args, _meta(args, seed=seed, strict=strict), rows=[r.to_dict() for r in reports],
               summary=summary)
    return doc, summary["failed"] == 0


def _verify_text(doc):
    lines = [f"{'check':34s} {'mode':24s} {'residual':>24s} {'tolerance':>24s}  status"]
    for r in doc["rows"]:
        lines.append(f"{r['check']:34s} {r['mode']:24s} {fmt(r['residual']):>24s} "
                     f"{fmt(r['tolerance']):>24s}  {'pass' if r['passed'] else 'FAIL'}")
    s = doc["summary"]
    lines.append(f"{s['passed']}/{s['total']} checks passed")
    return "\n".join(lines) + "\n"


COMMANDS = {"cutoffs": cmd_cutoffs, "mode": cmd_mode, "fields": cmd_fields,
            "currents": cmd_currents, "fig3": cmd_fig3}
DEFAULT_FORMAT = {"mode": "json", "verify": "json"}


def main(argv=None):
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return EXIT_USAGE if exc.code not in (0, None) else EXIT_OK
    if args.format is None:
        args.format = DEFAULT_FORMAT.get(args.command, "csv")
    try:
        if args.command == "verify":
            doc, ok = cmd_verify(args)
            if args.out:
                with open(args.out, "w", encoding="utf-8", newline="\n") as fh:
                    fh.write(to_json(doc) + "\n")
                s = doc["summary"]
                sys.stdout.write(f"{s['passed']}/{s['total']} checks passed\n")
            elif args.format == "json":
                sys.stdout.write(to_json(doc) + "\n")
            else:
                sys.stdout.write(_verify_text(doc))
            return EXIT_OK if ok else EXIT_FAIL
        emit(COMMANDS[args.command](args), args)
        return EXIT_OK
    except (UsageError, ModeError, ValueError) as exc:
        sys.stderr.write(f"cylwave: error: {exc}\n")
        return EXIT_USAGE
    except (specfun.RootSearchError, specfun.DomainError, emdyn.QuadratureError,
            ArithmeticError) as exc:
        sys.stderr.write(f"cylwave: numerical failure: {exc}\n")
        return EXIT_NUMERIC


if __name__ == "__main__":
    sys.exit(main())
