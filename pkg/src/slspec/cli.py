"""Command-line interface.

Subcommands: classify, det-curve, spectrum, rootfns, degenerate, example,
report.  A TOML or JSON config file may supply any option; explicit flags
win.  Outputs are written atomically; exit status is 0 on success, 2 on
validation errors, 3 on numerical failures (with the error payload in the
JSON "error" field when an output path is set).
"""

from __future__ import annotations

import argparse
import os
import sys
from dataclasses import dataclass, field

import numpy as np

from . import bc as bcmod
from .bc import BcKind, BcMatrix, classify
from .degenerate import (classify_degenerate, example1_product, example2_product,
                         growth_bound_check, nonclassical_spectrum_report,
                         product_eval_many, pw_membership_check)
from .determinant import DetEvaluator
from .errors import InvalidInputError, SlspecError
from .ode import TOL_MAX, TOL_MIN
from .output import atomic_write_text, csv_rows, load_config_file, to_json
from .potential import Potential
from .rootfns import basis_diagnostics, build_chains, dual_system
from .spectrum import locate_spectrum

EXIT_OK = 0
EXIT_VALIDATION = 2
EXIT_NUMERICAL = 3

COMMANDS = ("classify", "det-curve", "spectrum", "rootfns", "degenerate",
            "example", "report")

_DEFAULTS = {
    "potential": "zero",
    "bc": "dirichlet",
    "tol": 1e-11,
    "region": [0.0, 10.5, -1.0, 1.0],
    "emit": "json",
    "num": 8,
    "kind": 1,
    "kmax": 64,
    "drop_prefix": 4,
    "f_form": False,
    "d": None,
    "max_refine": 48,
    "nre": 200,
    "nim": 1,
    "xmax": None,
    "out": None,
    "outdir": None,
}


@dataclass
class RunConfig:
    command: str
    options: dict = field(default_factory=dict)

    def __getitem__(self, key):
        return self.options[key]


@dataclass
class Diagnostic:
    code: str
    severity: str        # "error" | "warning"
    message: str

    def as_dict(self):
        return {"code": self.code, "severity": self.severity, "message": self.message}


def build_config(args) -> RunConfig:
    opts = dict(_DEFAULTS)
    if args.config:
        opts.update(load_config_file(args.config))
    for key in _DEFAULTS:
        flag = getattr(args, key.replace("-", "_"), None)
        if flag is not None:
            opts[key] = flag
    command = args.command or opts.get("command")
    return RunConfig(command=command, options=opts)


def validate(config: RunConfig):
    """Pure validation pass; returns diagnostics, never mutates files."""
    diags = []
    opts = config.options
    if config.command not in COMMANDS:
        diags.append(Diagnostic("CFG005", "error",
                                f"unknown command {config.command!r}"))
    src = opts.get("potential")
    if isinstance(src, str) and ("/" in src or src.endswith((".json", ".csv"))):
        if not os.path.exists(src):
            diags.append(Diagnostic("CFG001", "error",
                                    f"potential file not found: {src}"))
    bsrc = opts.get("bc")
    if isinstance(bsrc, str) and ("/" in bsrc or bsrc.endswith(".json")):
        if not os.path.exists(bsrc):
            diags.append(Diagnostic("CFG001", "error",
                                    f"boundary-condition file not found: {bsrc}"))
    tol = opts.get("tol")
    if not isinstance(tol, (int, float)) or not TOL_MIN <= float(tol) <= TOL_MAX:
        diags.append(Diagnostic("CFG002", "error",
                                f"tol must lie in [{TOL_MIN}, {TOL_MAX}], got {tol!r}"))
    region = opts.get("region")
    if region is not None:
        # det-curve may sample along a line, so a flat strip is fine there
        flat_ok = config.command == "det-curve"
        if (not isinstance(region, (list, tuple)) or len(region) != 4
                or not all(isinstance(v, (int, float)) for v in region)
                or not (region[1] > region[0]
                        and (region[3] > region[2]
                             or (flat_ok and region[3] == region[2])))):
            diags.append(Diagnostic("CFG004", "error",
                                    f"region must be re0,re1,im0,im1 with re1>re0, im1>im0: {region!r}"))
        elif region[0] < 0:
            diags.append(Diagnostic("CFG003", "warning",
                                    "region extends into Re mu < 0; clipped to the "
                                    "half-plane Re mu >= 0"))
    emit = opts.get("emit")
    if emit not in ("json", "csv", "zeros", "curve", "report"):
        diags.append(Diagnostic("CFG005", "error", f"unknown emit format {emit!r}"))
    return diags


def parse_potential(src) -> Potential:
    if src is None or src == "zero":
        return Potential.zero()
    if isinstance(src, dict):
        return Potential.from_json(src)
    if src.startswith("zero:"):
        return Potential.zero(int(src.split(":", 1)[1]))
    if src.startswith("poly:"):
        coeffs = [complex(c) for c in src.split(":", 1)[1].split(",")]
        return Potential.from_poly(coeffs)
    if src.lstrip().startswith("{"):
        return Potential.from_json(src)
    if src.endswith(".csv"):
        return Potential.from_csv(src)
    with open(src) as fh:
        return Potential.from_json(fh.read())


def parse_bc(src) -> BcMatrix:
    named = {
        "dirichlet": bcmod.dirichlet,
        "neumann": bcmod.neumann,
        "periodic": bcmod.periodic,
        "antiperiodic": bcmod.antiperiodic,
    }
    if src in named:
        return named[src]()
    if isinstance(src, dict):
        return BcMatrix.from_json(src)
    if src.startswith("type2:"):
        return bcmod.type2(complex(src.split(":", 1)[1]))
    if src.startswith("irregular:"):
        return bcmod.irregular_a0(complex(src.split(":", 1)[1]))
    if src.startswith("degenerate:"):
        return bcmod.degenerate_d(complex(src.split(":", 1)[1]))
    if src.lstrip().startswith("{"):
        return BcMatrix.from_json(src)
    with open(src) as fh:
        return BcMatrix.from_json(fh.read())


def _clip_region(region):
    re0, re1, im0, im1 = (float(v) for v in region)
    return (max(0.0, re0), re1, im0, im1)


def _write_out(config, text, default_name=None):
    out = config.options.get("out")
    outdir = config.options.get("outdir")
    if out is None and outdir and default_name:
        out = os.path.join(outdir, default_name)
    if out:
        atomic_write_text(out, text)
    else:
        sys.stdout.write(text if text.endswith("\n") else text + "\n")
    return out


# -- command bodies -----------------------------------------------------------


def _cmd_classify(config):
    A = parse_bc(config["bc"])
    cls = classify(A)
    _write_out(config, to_json(cls.to_json_dict()) + "\n", "classify.json")
    return EXIT_OK


def _det_rows(ev, region, nre, nim):
    re0, re1, im0, im1 = region
    res = np.linspace(re0, re1, int(nre))
    ims = np.linspace(im0, im1, int(nim)) if nim > 1 else np.array([(im0 + im1) / 2.0])
    rows = []
    for imv in ims:
        pts = res + 1j * imv
        vals = ev.delta_many(pts)
        rows.extend((float(p.real), float(p.imag), float(v.real), float(v.imag))
                    for p, v in zip(pts, vals))
    return rows


def _cmd_det_curve(config):
    q = parse_potential(config["potential"])
    A = parse_bc(config["bc"])
    ev = DetEvaluator(q, A, tol=float(config["tol"]))
    rows = _det_rows(ev, [float(v) for v in config["region"]],
                     config["nre"], config["nim"])
    text = csv_rows(rows, header=["re_mu", "im_mu", "re_delta", "im_delta"])
    _write_out(config, text, "det_curve.csv")
    return EXIT_OK


def _cmd_spectrum(config):
    q = parse_potential(config["potential"])
    A = parse_bc(config["bc"])
    ev = DetEvaluator(q, A, tol=float(config["tol"]))
    report = locate_spectrum(ev, _clip_region(config["region"]),
                             max_refine=int(config["max_refine"]))
    if config["emit"] == "csv":
        rows = [(r.mu.real, r.mu.imag, r.lam.real, r.lam.imag,
                 r.multiplicity, r.residual) for r in report.records]
        text = csv_rows(rows, header=["re_mu", "im_mu", "re_lambda", "im_lambda",
                                      "mult", "residual"])
        _write_out(config, text, "spectrum.csv")
    else:
        _write_out(config, to_json(report.to_json_dict()) + "\n", "spectrum.json")
    return EXIT_OK


def _rootfns_bundle(q, A, ev, region, num, max_refine):
    report = locate_spectrum(ev, region, max_refine=max_refine)
    records = report.records[:num]
    if len(records) < 2:
        raise InvalidInputError("fewer than two eigenvalues located in the region")
    chains = build_chains(q, A, records, tol=ev.tol)
    pair = dual_system(q, A, chains, tol=ev.tol)
    diag = basis_diagnostics(pair, min(len(pair), num))
    doc = {
        "gram_cond": diag.gram_cond,
        "norm_products": diag.norm_products,
        "kernel_sup": diag.kernel_sup,
        "gram_residual": pair.gram_residual,
        "num_pairs": len(pair),
    }
    return report, chains, pair, diag, doc


def _cmd_rootfns(config):
    q = parse_potential(config["potential"])
    A = parse_bc(config["bc"])
    ev = DetEvaluator(q, A, tol=float(config["tol"]))
    report, chains, pair, diag, doc = _rootfns_bundle(
        q, A, ev, _clip_region(config["region"]),
        int(config["num"]), int(config["max_refine"]))
    outdir = config.options.get("outdir")
    if outdir:
        for ci, ch in enumerate(chains):
            for p, tr in enumerate(ch.chain):
                rows = zip(tr.grid, tr.u.real, tr.u.imag, tr.up.real, tr.up.imag)
                atomic_write_text(
                    os.path.join(outdir, f"chain{ci:02d}_order{p}.csv"),
                    csv_rows(rows, header=["x", "re_u", "im_u", "re_up", "im_up"]))
    _write_out(config, to_json(doc) + "\n", "rootfns.json")
    return EXIT_OK


def _cmd_degenerate(config):
    q = parse_potential(config["potential"])
    d = config["d"]
    if d is None:
        A = parse_bc(config["bc"])
        cls = classify(A)
        if cls.kind is not BcKind.DEGENERATE or "d" not in cls.params:
            raise InvalidInputError("degenerate command needs --d or a degenerate "
                                    "visual-form boundary matrix")
        d = cls.params["d"]
    else:
        d = complex(str(d))
    res = classify_degenerate(q, d)
    doc = {
        "case": res.case.value,
        "d": res.d,
        "symmetric": res.symmetric,
        "defect_norm": res.defect_norm,
    }
    _write_out(config, to_json(doc) + "\n", "degenerate.json")
    return EXIT_OK


def _example_spec(config):
    kind = int(config["kind"])
    kmax = int(config["kmax"])
    drop = int(config["drop_prefix"])
    f_form = bool(config["f_form"])
    if kind == 1:
        return example1_product(kmax, drop, f_form)
    if kind == 2:
        return example2_product(kmax, drop, f_form)
    raise InvalidInputError("example kind must be 1 or 2")


def _cmd_example(config):
    spec = _example_spec(config)
    emit = config["emit"]
    if emit == "zeros":
        rows = [(z.real, z.imag, m) for z, m in spec.zeros]
        _write_out(config, csv_rows(rows, header=["re", "im", "mult"]), "zeros.csv")
        return EXIT_OK
    if emit == "curve":
        xmax = config["xmax"] or min(0.9 * spec.radius_cap, 50.0)
        xs = np.linspace(0.0, float(xmax), 801)
        vals = product_eval_many(spec, xs.astype(complex))
        rows = zip(xs, vals.real, vals.imag)
        _write_out(config, csv_rows(rows, header=["x", "re_f", "im_f"]), "curve.csv")
        return EXIT_OK
    # full JSON report on the construction
    report = nonclassical_spectrum_report(spec)
    xs = np.linspace(0.05, min(0.45 * spec.radius_cap, float(spec.a[min(7, len(spec.a) - 1)])), 900)
    growth = growth_bound_check(spec, xs, M=max(spec.drop_prefix, 1))
    doc = {
        "kind": spec.kind,
        "k_max": spec.k_max,
        "drop_prefix": spec.drop_prefix,
        "a_prefix": list(spec.a[:16]),
        "h_prefix": list(spec.h[:16]),
        "zero_count": len(spec.zeros),
        "growth": {"bounded": growth.bounded, "c_hat": growth.c_hat,
                   "m_empirical": growth.m_empirical},
        "multiplicity_ratio_bounds": [report.diagnostics["c1_hat"],
                                      report.diagnostics["c2_hat"]],
    }
    if spec.f_form:
        R = min(64.0, 0.45 * spec.radius_cap)
        pw = pw_membership_check(spec, R, 20.0)
        doc["paley_wiener"] = {
            "odd_defect": pw.odd_defect,
            "l2_bands": [[j, v] for j, v in pw.l2_bands],
            "type_max": pw.type_max,
        }
    if spec.kind == "example2":
        doc["im_growth"] = report.diagnostics["im_growth"][:32]
    _write_out(config, to_json(doc) + "\n", "example_report.json")
    return EXIT_OK


def _cmd_report(config):
    """classify -> spectrum -> root functions -> diagnostics, one JSON bundle.

    Alongside the JSON: the determinant curve CSV and rendered figures.
    """
    outdir = config.options.get("outdir") or "slspec-report"
    config.options["outdir"] = outdir
    os.makedirs(outdir, exist_ok=True)
    q = parse_potential(config["potential"])
    A = parse_bc(config["bc"])
    ev = DetEvaluator(q, A, tol=float(config["tol"]))
    region = _clip_region(config["region"])
    cls = classify(A)
    doc = {"bc_classification": cls.to_json_dict()}
    det_rows = _det_rows(ev, region, config["nre"], 1)
    atomic_write_text(os.path.join(outdir, "det_curve.csv"),
                      csv_rows(det_rows, header=["re_mu", "im_mu", "re_delta", "im_delta"]))
    spec_report = locate_spectrum(ev, region, max_refine=int(config["max_refine"]))
    doc["spectrum"] = spec_report.to_json_dict()
    diag = None
    if cls.kind is BcKind.DEGENERATE and "d" in cls.params:
        dres = classify_degenerate(q, cls.params["d"])
        doc["degenerate"] = {"case": dres.case.value, "d": dres.d,
                             "symmetric": dres.symmetric,
                             "defect_norm": dres.defect_norm}
    if len(spec_report.records) >= 2:
        records = spec_report.records[:int(config["num"])]
        chains = build_chains(q, A, records, tol=ev.tol)
        pair = dual_system(q, A, chains, tol=ev.tol)
        diag = basis_diagnostics(pair, min(len(pair), int(config["num"])))
        doc["rootfns"] = {
            "gram_cond": diag.gram_cond,
            "norm_products": diag.norm_products,
            "kernel_sup": diag.kernel_sup,
            "gram_residual": pair.gram_residual,
        }
    text = to_json(doc) + "\n"
    atomic_write_text(os.path.join(outdir, "report.json"), text)
    from .figures import render_report_figures
    render_report_figures(outdir, det_rows, spec_report, diag)
    sys.stdout.write(f"report written to {outdir}\n")
    return EXIT_OK


_BODIES = {
    "classify": _cmd_classify,
    "det-curve": _cmd_det_curve,
    "spectrum": _cmd_spectrum,
    "rootfns": _cmd_rootfns,
    "degenerate": _cmd_degenerate,
    "example": _cmd_example,
    "report": _cmd_report,
}


def run(config: RunConfig) -> int:
    """Validate and dispatch; exit codes 0 / 2 / 3."""
    diags = validate(config)
    errors = [d for d in diags if d.severity == "error"]
    for d in diags:
        print(f"{d.severity.upper()} {d.code}: {d.message}", file=sys.stderr)
    if errors:
        return EXIT_VALIDATION
    try:
        return _BODIES[config.command](config)
    except SlspecError as exc:
        payload = to_json({"error": {"type": type(exc).__name__, "message": str(exc)}})
        out = config.options.get("out")
        if out:
            atomic_write_text(out, payload + "\n")
        print(f"ERROR {type(exc).__name__}: {exc}", file=sys.stderr)
        return EXIT_NUMERICAL


def make_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(
        prog="slspec",
        description="Spectral workbench for Sturm-Liouville problems with "
                    "two-point boundary conditions on [0, pi]")
    ap.add_argument("--config", help="TOML or JSON config file (flags win)")
    ap.add_argument("--validate-only", action="store_true",
                    help="run validation and exit")
    sub = ap.add_subparsers(dest="command")
    for name in COMMANDS:
        sp = sub.add_parser(name)
        sp.add_argument("--potential", help="zero | zero:N | poly:c0,c1,... | file.json|.csv")
        sp.add_argument("--bc", help="dirichlet|neumann|periodic|antiperiodic|"
                                     "type2:a14|irregular:a0|degenerate:d|file.json")
        sp.add_argument("--tol", type=float)
        sp.add_argument("--region", type=_region_arg, help="re0,re1,im0,im1")
        sp.add_argument("--emit", choices=["json", "csv", "zeros", "curve", "report"])
        sp.add_argument("--out")
        sp.add_argument("--outdir")
        sp.add_argument("--num", type=int, help="number of eigenvalue records to use")
        sp.add_argument("--max-refine", type=int, dest="max_refine")
        sp.add_argument("--nre", type=int)
        sp.add_argument("--nim", type=int)
        if name == "degenerate":
            sp.add_argument("--d", help="complex d, e.g. 2 or 1+0.5j")
        if name == "example":
            sp.add_argument("--kind", type=int, choices=[1, 2])
            sp.add_argument("--kmax", type=int)
            sp.add_argument("--drop-prefix", type=int, dest="drop_prefix")
            sp.add_argument("--f-form", action="store_true", dest="f_form", default=None)
            sp.add_argument("--xmax", type=float)
    return ap


def _region_arg(text):
    parts = [float(v) for v in text.split(",")]
    if len(parts) != 4:
        raise argparse.ArgumentTypeError("region needs re0,re1,im0,im1")
    return parts


def main(argv=None) -> int:
    args = make_parser().parse_args(argv)
    config = build_config(args)
    if args.validate_only:
        diags = validate(config)
        for d in diags:
            print(f"{d.severity.upper()} {d.code}: {d.message}")
        return EXIT_VALIDATION if any(d.severity == "error" for d in diags) else EXIT_OK
    if config.command is None:
        make_parser().print_help()
        return EXIT_VALIDATION
    return run(config)


if __name__ == "__main__":
    sys.exit(main())
