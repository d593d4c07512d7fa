"""Command-line front end.

Subcommands mirror the library: dispersion curves, the gap constant, moment
checks, direct disk spectra with a comparison report against every
asymptotic prediction, semiclassical prefactors, and the effective boundary
operator.  Outputs are deterministic CSV/JSON files embedding their full
run configuration and a content hash, so identical configs reproduce
byte-identical files.

Exit codes: 0 success, 2 configuration error, 3 solver non-convergence,
4 failed self-check in ``check`` mode.
"""

from __future__ import annotations

import argparse
import configparser
import csv
import hashlib
import io
import json
import math
import os
import sys
import warnings
from concurrent.futures import ProcessPoolExecutor
from pathlib import Path
from typing import Dict, List, Optional, Sequence, Tuple

import numpy as np

from . import constants as ckmod
from . import disk as diskmod
from . import dispersion as dispmod
from . import effective as effmod
from . import fiber as fibermod

EXIT_OK = 0
EXIT_CONFIG = 2
EXIT_SOLVER = 3
EXIT_CHECK = 4

WORKERS_ENV = "DIRACBAG_WORKERS"


class ConfigError(ValueError):
    pass


def _fmt(x) -> str:
    if isinstance(x, (float, np.floating)):
        return format(float(x), ".17g")
    return str(x)


def _parse_int_range(text: str) -> List[int]:
    """'1..4' or '1:4' or '1,2,3'."""
    text = text.strip()
    for sep in ("..", ":"):
        if sep in text and "," not in text:
            parts = text.split(sep)
            if len(parts) == 2:
                return list(range(int(parts[0]), int(parts[1]) + 1))
    return [int(t) for t in text.split(",") if t.strip()]


def _parse_float_list(text: str) -> List[float]:
    return [float(t) for t in text.split(",") if t.strip()]


def _parse_sweep(text: str) -> np.ndarray:
    """'lo:hi:step' inclusive sweep."""
    parts = text.split(":")
    if len(parts) != 3:
        raise ConfigError(f"sweep must be lo:hi:step, got {text!r}")
    lo, hi, step = (float(p) for p in parts)
    if step <= 0 or hi < lo:
        raise ConfigError(f"bad sweep {text!r}")
    n = int(round((hi - lo) / step)) + 1
    return lo + step * np.arange(n)


def _parse_field(text: str, R: float) -> diskmod.RadialField:
    text = text.strip()
    if text.startswith("const:"):
        return diskmod.RadialField(float(text.split(":", 1)[1]), R)
    try:
        return diskmod.RadialField(float(text), R)
    except ValueError:
        raise ConfigError(f"unsupported field spec {text!r} (use const:<value>)")


def _config_dict(args: argparse.Namespace) -> Dict[str, str]:
    # out/workers do not influence the computed payload; leaving them out
    # keeps reruns byte-identical regardless of where they write
    skip = {"func", "config", "out", "workers"}
    return {
        k: _fmt(v)
        for k, v in sorted(vars(args).items())
        if k not in skip and v is not None and not k.startswith("_")
    }


def _write_csv(path: Path, config: Dict[str, str], header: Sequence[str], rows) -> None:
    buf = io.StringIO()
    writer = csv.writer(buf, quoting=csv.QUOTE_MINIMAL, lineterminator="\n")
    writer.writerow(header)
    for row in rows:
        writer.writerow([_fmt(x) for x in row])
    payload = buf.getvalue()
    digest = hashlib.sha256(payload.encode()).hexdigest()
    with open(path, "w", encoding="utf-8", newline="") as fh:
        for k, v in config.items():
            fh.write(f"# {k} = {v}\n")
        fh.write(f"# sha256 = {digest}\n")
        fh.write(payload)


def _write_json(path: Path, config: Dict[str, str], data) -> None:
    body = json.dumps(data, sort_keys=True, default=_fmt)
    digest = hashlib.sha256(body.encode()).hexdigest()
    doc = {"config": config, "sha256": digest, "data": json.loads(body)}
    path.write_text(json.dumps(doc, sort_keys=True, indent=1) + "\n", encoding="utf-8")


def _outdir(args) -> Path:
    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    return out


# ----------------------------------------------------------------- dispersion


def cmd_dispersion(args) -> int:
    xi = _parse_sweep(args.xi)
    ks = _parse_int_range(args.k)
    out = _outdir(args)
    header = ["xi"]
    columns: List[List[float]] = []
    if args.branch in ("nu-minus", "nu-plus"):
        sign = "minus" if args.branch == "nu-minus" else "plus"
        for k in ks:
            header.append(f"nu_{sign}_{k}")
            columns.append([fibermod.nu_k(sign, k, args.alpha, x, args.n) for x in xi])
    elif args.branch == "theta":
        for k in ks:
            header.append(f"theta_plus_{k}")
            columns.append([dispmod.theta("plus", k, x, args.n).theta for x in xi])
        for k in ks:
            header.append(f"theta_minus_{k}")
            columns.append([-dispmod.theta("minus", k, x, args.n).theta for x in xi])
    else:
        raise ConfigError(f"unknown branch {args.branch!r}")
    rows = [[x] + [col[i] for col in columns] for i, x in enumerate(xi)]
    name = out / f"dispersion_{args.branch}.csv"
    _write_csv(name, _config_dict(args), header, rows)
    print(f"wrote {name}")
    return EXIT_OK


# ------------------------------------------------------------------------- a0


def cmd_a0(args) -> int:
    res = dispmod.find_a0(args.n)
    data = {
        "a0": res.a0,
        "u0sq": res.u0sq,
        "d2xi_nu": res.d2xi_nu,
        "c0": res.c0,
        "grid_n": res.grid_n,
        "cxi_sign_convention": dispmod.CXI_SIGN_CONVENTION,
    }
    if args.refine:
        fine = dispmod.find_a0(2 * args.n - 1)
        data["refined"] = {"a0": fine.a0, "grid_n": fine.grid_n}
        data["a0_richardson"] = fine.a0 + (fine.a0 - res.a0) / 3.0
        data["grid_change"] = abs(fine.a0 - res.a0)
    out = _outdir(args)
    name = out / "a0.json"
    _write_json(name, _config_dict(args), data)
    print(f"wrote {name}  (a0 = {res.a0:.6f})")
    return EXIT_OK


# -------------------------------------------------------------------- momenta


def cmd_momenta(args) -> int:
    if args.alpha is None or args.xi is None:
        raise ConfigError("momenta requires --alpha and --xi (flag or config file)")
    mom = dispmod.momenta(args.alpha, args.xi, args.n)
    out = _outdir(args)
    name = out / "momenta.csv"
    rows = [[j, mom.M[j]] for j in range(5)]
    _write_csv(name, _config_dict(args), ["j", "M_j"], rows)
    print(f"wrote {name}")
    return EXIT_OK


# ----------------------------------------------------------------------- disk


def _disk_single_h(field_value, R, h, n, npos, nneg, zigzag, oracle):
    """One h of the disk sweep (run in a worker when workers > 1)."""
    field = _parse_field(field_value, R)
    spec = diskmod.DiskSpec.make(field, h, n=n)
    count = max(npos, nneg)
    sp = diskmod.dirac_spectrum(spec, count)
    nus = diskmod.hardy_nu_k(spec, npos)
    result = {
        "h": h,
        "pos": sp.pos[:npos],
        "neg": sp.neg[:nneg],
        "pos_prov": sp.pos_provenance[:npos],
        "neg_prov": sp.neg_provenance[:nneg],
        "hardy": nus,
        "phi_min": spec.gauge.phi_min,
    }
    if zigzag:
        result["zigzag_plus"] = diskmod.zigzag_spectrum(spec, "plus", 3)
        result["zigzag_minus"] = diskmod.zigzag_spectrum(spec, "minus", 3)
        result["b0"] = float(np.min(field.samples(spec.rgrid.nodes())))
    if oracle:
        m, k = sp.neg_provenance[0]
        with warnings.catch_warnings():
            warnings.simplefilter("ignore")
            direct = diskmod.dirac_radial_direct(
                spec, -(m + 1), 1, sigma=-sp.neg[0]
            )
        below = direct[direct < 0]
        result["oracle_neg1"] = float(-below[-1]) if below.size else float("nan")
    return result


def cmd_disk(args) -> int:
    hs = _parse_float_list(args.h)
    out = _outdir(args)
    workers = args.workers
    jobs = [
        (args.B, args.R, h, args.n, args.pos, args.neg, args.zigzag, args.oracle)
        for h in hs
    ]
    results = []
    errors = []
    if workers > 1:
        with ProcessPoolExecutor(max_workers=workers) as pool:
            futs = [pool.submit(_disk_single_h, *job) for job in jobs]
            for h, fut in zip(hs, futs):
                try:
                    results.append(fut.result())
                except Exception as exc:  # row-level isolation
                    errors.append((h, str(exc)))
    else:
        for job in jobs:
            try:
                results.append(_disk_single_h(*job))
            except Exception as exc:
                errors.append((job[2], str(exc)))
    results.sort(key=lambda r: -r["h"])

    a0res = dispmod.find_a0(args.n_a0)
    field = _parse_field(args.B, args.R)
    const_field = not callable(field.B)

    spec_rows = []
    report_rows = []
    for r in results:
        h = r["h"]
        for i, (val, prov) in enumerate(zip(r["pos"], r["pos_prov"])):
            spec_rows.append([h, "pos", i + 1, val, prov[0], prov[1]])
        for i, (val, prov) in enumerate(zip(r["neg"], r["neg_prov"])):
            spec_rows.append([h, "neg", i + 1, val, prov[0], prov[1]])

        # leading negative order: a0 sqrt(b0' h)
        if const_field:
            b0 = float(field.B)
            lead = a0res.a0 * math.sqrt(b0 * h)
            report_rows.append(
                [h, 1, "lambda_minus_leading", r["neg"][0], lead,
                 r["neg"][0] - lead, abs(r["neg"][0] - lead) / lead]
            )
            # fine structure vs effective operator; a constant field b0 maps
            # to the unit-field problem at h/b0 with energies scaled by b0
            es = effmod.EffSpec.disk(args.R, h / b0, a0res.a0)
            eff = effmod.qeff_disk(es.t_h, args.R, len(r["neg"]))
            for i in range(len(r["neg"])):
                pred = b0 * effmod.lambda_minus_prediction(
                    i + 1, h / b0, a0res, eff
                )
                report_rows.append(
                    [h, i + 1, "lambda_minus_fine", r["neg"][i], pred,
                     r["neg"][i] - pred, abs(r["neg"][i] - pred) / pred]
                )
        # positive eigenvalues vs C_k and the Hardy bound
        w = ckmod.BargmannWeight.isotropic(2.0 * diskmod.radial_phi(field).hess)
        curve = ckmod.BoundaryCurve.circle(args.R)
        for i in range(len(r["pos"])):
            ck = ckmod.ck_constant(i + 1, w, curve)
            pred = ckmod.lambda_plus_prediction(ck, r["phi_min"], h)
            report_rows.append(
                [h, i + 1, "lambda_plus_Ck", r["pos"][i], pred,
                 r["pos"][i] - pred, abs(r["pos"][i] - pred) / pred]
            )
            bound = r["hardy"][i]
            report_rows.append(
                [h, i + 1, "hardy_upper_bound", r["pos"][i], bound,
                 r["pos"][i] - bound, float(r["pos"][i] <= bound + 1e-12)]
            )
        small = min(r["pos"][0], r["neg"][0])
        report_rows.append([h, 1, "zero_gap", small, 0.0, small, float(small > 1e-6)])
        if args.zigzag:
            zb = 2.0 * r["b0"] * h
            report_rows.append(
                [h, 1, "zigzag_lower_bound", r["zigzag_plus"][0], zb,
                 r["zigzag_plus"][0] - zb,
                 float(r["zigzag_plus"][0] >= zb * (1 - 1e-3))]
            )
        if args.oracle:
            report_rows.append(
                [h, 1, "oracle_agreement", r["neg"][0], r["oracle_neg1"],
                 r["neg"][0] - r["oracle_neg1"],
                 abs(r["neg"][0] - r["oracle_neg1"]) / r["neg"][0]]
            )
    for h, msg in errors:
        report_rows.append([h, 0, "error", float("nan"), float("nan"), float("nan"), msg])

    cfg = _config_dict(args)
    _write_csv(out / "disk_spectrum.csv", cfg,
               ["h", "branch", "k", "eigenvalue", "mode", "mode_k"], spec_rows)
    _write_csv(out / "disk_report.csv", cfg,
               ["h", "n", "formula", "direct", "prediction", "deviation", "rel_or_flag"],
               report_rows)
    print(f"wrote {out / 'disk_spectrum.csv'}")
    print(f"wrote {out / 'disk_report.csv'}")
    if errors and not results:
        return EXIT_SOLVER
    return EXIT_OK


# ------------------------------------------------------------------ constants


def cmd_constants(args) -> int:
    ks = _parse_int_range(args.k)
    b0 = float(args.B)
    w = ckmod.BargmannWeight.isotropic(b0)
    curve = ckmod.BoundaryCurve.circle(args.R, z_min=complex(args.zmin_re, args.zmin_im))
    rows = []
    for k in ks:
        res = ckmod.ck_constant(k, w, curve)
        closed = b0**k / math.factorial(k - 1) * (args.R**2 / 2) ** (k - 1) * args.R
        rows.append([k, res.dist_H, res.dist_B, res.Ck, closed, abs(res.Ck - closed)])
    out = _outdir(args)
    name = out / "constants.csv"
    _write_csv(name, _config_dict(args),
               ["k", "dist_H", "dist_B", "Ck", "disk_closed_form", "deviation"], rows)
    print(f"wrote {name}")
    return EXIT_OK


# ------------------------------------------------------------------ effective


def cmd_effective(args) -> int:
    out = _outdir(args)
    a0res = dispmod.find_a0(args.n_a0)
    if args.kappa:
        samples = np.loadtxt(args.kappa, delimiter=",", ndmin=1)
        L = args.L if args.L else 2 * math.pi * args.R
        area = args.area if args.area else math.pi * args.R**2
        spec = effmod.EffSpec(
            L=L, area=area, h=args.h, a0=a0res.a0,
            t_h=effmod.flux_th(area, L, args.h, a0res.a0),
            kappa=samples, cutoff=max(64, 4 * args.count + 16),
        )
        eff = effmod.qeff_general(spec, args.count)
        shifted = effmod.EffSpec(
            L=L, area=area, h=args.h, a0=a0res.a0,
            t_h=spec.t_h + 2 * math.pi / L, kappa=samples, cutoff=spec.cutoff,
        )
        gauge_err = float(np.max(np.abs(
            effmod.qeff_general(shifted, args.count).values - eff.values)))
        rows = [[n + 1, eff.values[n], ""] for n in range(args.count)]
        rows.append(["gauge_periodicity_error", gauge_err, ""])
        header = ["n", "lambda_n", "m_n"]
    else:
        spec = effmod.EffSpec.disk(args.R, args.h, a0res.a0)
        eff = effmod.qeff_disk(spec.t_h, args.R, args.count)
        rows = [
            [n + 1, eff.values[n], eff.m_sequence[n]] for n in range(args.count)
        ]
        header = ["n", "lambda_n", "m_n"]
        rows.append(["t_h", spec.t_h, ""])
        rows.append(["prediction_lambda1", effmod.lambda_minus_prediction(
            1, args.h, a0res, eff), ""])
    name = out / "effective.csv"
    _write_csv(name, _config_dict(args), header, rows)
    print(f"wrote {name}")
    return EXIT_OK


# ----------------------------------------------------------------------- check


def cmd_check(args) -> int:
    """Fast self-checks of the main identities; exits 4 on any failure."""
    failures: List[str] = []

    def check(name: str, ok: bool, detail: str = ""):
        print(f"[{'PASS' if ok else 'FAIL'}] {name} {detail}")
        if not ok:
            failures.append(name)

    check("landau_minus_1", abs(fibermod.whole_line_levels("minus", 1) - 2.0) == 0.0)
    n = 2001 if not args.full else 4001
    res = dispmod.find_a0(n)
    check("a0_range", 0 < res.a0 < math.sqrt(2.0), f"a0={res.a0:.6f}")
    check("a0_value", abs(res.a0 - dispmod.A0_REFERENCE) < 2e-3,
          f"|a0 - {dispmod.A0_REFERENCE}| = {abs(res.a0 - dispmod.A0_REFERENCE):.2e}")
    check("c0_positive", res.c0 > 0 and res.u0sq < 2 * res.a0)
    mom = dispmod.momenta(res.a0, res.a0, n)
    check("momentum_M1", abs(mom.M[1] - res.u0sq / 2) < 1e-3 * res.u0sq)
    w = ckmod.BargmannWeight.isotropic(1.0)
    curve = ckmod.BoundaryCurve.circle(1.0)
    ck1 = ckmod.ck_constant(1, w, curve)
    check("C1_disk", abs(ck1.Ck - 1.0) < 1e-6, f"C1={ck1.Ck:.8f}")
    eff = effmod.qeff_disk(0.5, 1.0, 2)
    check("qeff_tie", abs(eff.values[0] - eff.values[1]) < 1e-12)
    if args.full:
        field = diskmod.RadialField(1.0, 1.0)
        spec = diskmod.DiskSpec.make(field, 0.1, n=2001)
        sp = diskmod.dirac_spectrum(spec, 3)
        nus = diskmod.hardy_nu_k(spec, 3)
        check("hardy_bound", bool(np.all(sp.pos <= nus + 1e-12)))
        check("zero_gap", min(sp.pos[0], sp.neg[0]) > 1e-6)
        e1 = sp.neg[0] / math.sqrt(0.1)
        check("e1_near_a0", abs(e1 - res.a0) < 0.15, f"e1={e1:.6f}")
    return EXIT_CHECK if failures else EXIT_OK


# ---------------------------------------------------------------------- parse


def _add_common(p: argparse.ArgumentParser):
    p.add_argument("--out", default="out", help="output directory")
    p.add_argument("--format", default="csv", choices=["csv", "json"])
    p.add_argument("--config", default=None, help="key=value config file with sections")
    p.add_argument("--workers", type=int,
                   default=int(os.environ.get(WORKERS_ENV, "1")))


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(
        prog="diracbag",
        description="Spectra of planar magnetic Dirac operators with MIT bag walls",
    )
    sub = ap.add_subparsers(dest="command", required=True)

    p = sub.add_parser("dispersion", help="fibered dispersion curves")
    p.add_argument("--branch", default="nu-minus",
                   choices=["nu-minus", "nu-plus", "theta"])
    p.add_argument("--alpha", type=float, default=2.0)
    p.add_argument("--k", default="1..4")
    p.add_argument("--xi", default="-2:8:0.1")
    p.add_argument("--n", type=int, default=fibermod.DEFAULT_N)
    _add_common(p)
    p.set_defaults(func=cmd_dispersion)

    p = sub.add_parser("a0", help="the gap constant and derived quantities")
    p.add_argument("--n", type=int, default=fibermod.DEFAULT_N)
    p.add_argument("--refine", action="store_true")
    _add_common(p)
    p.set_defaults(func=cmd_a0)

    p = sub.add_parser("momenta", help="ground-state moments")
    p.add_argument("--alpha", type=float, default=None)
    p.add_argument("--xi", type=float, default=None)
    p.add_argument("--n", type=int, default=fibermod.DEFAULT_N)
    _add_common(p)
    p.set_defaults(func=cmd_momenta)

    for cname in ("disk", "compare"):
        p = sub.add_parser(cname, help="direct disk spectra and comparison report")
        p.add_argument("--B", default="const:1")
        p.add_argument("--R", type=float, default=1.0)
        p.add_argument("--h", default="0.2,0.1")
        p.add_argument("--neg", type=int, default=4)
        p.add_argument("--pos", type=int, default=2)
        p.add_argument("--n", type=int, default=2001)
        p.add_argument("--n-a0", type=int, default=fibermod.DEFAULT_N, dest="n_a0")
        p.add_argument("--zigzag", action="store_true")
        p.add_argument("--oracle", action="store_true")
        _add_common(p)
        p.set_defaults(func=cmd_disk)

    p = sub.add_parser("constants", help="Hardy/Bargmann distances and C_k")
    p.add_argument("--disk", action="store_true")
    p.add_argument("--B", type=float, default=1.0)
    p.add_argument("--R", type=float, default=1.0)
    p.add_argument("--k", default="1..4")
    p.add_argument("--zmin-re", type=float, default=0.0, dest="zmin_re")
    p.add_argument("--zmin-im", type=float, default=0.0, dest="zmin_im")
    _add_common(p)
    p.set_defaults(func=cmd_constants)

    p = sub.add_parser("effective", help="effective boundary operator")
    p.add_argument("--disk", action="store_true")
    p.add_argument("--R", type=float, default=1.0)
    p.add_argument("--h", type=float, default=0.1)
    p.add_argument("--count", type=int, default=5)
    p.add_argument("--kappa", default=None, help="CSV file of curvature samples")
    p.add_argument("--L", type=float, default=None)
    p.add_argument("--area", type=float, default=None)
    p.add_argument("--n-a0", type=int, default=fibermod.DEFAULT_N, dest="n_a0")
    _add_common(p)
    p.set_defaults(func=cmd_effective)

    p = sub.add_parser("check", help="fast self-checks (exit 4 on failure)")
    p.add_argument("--full", action="store_true")
    _add_common(p)
    p.set_defaults(func=cmd_check)

    return ap


def _glue_negative_sweeps(argv: List[str]) -> List[str]:
    """Join '--xi -2:8:0.1' into '--xi=-2:8:0.1' so argparse does not read
    the sweep (leading dash) as an option string."""
    out: List[str] = []
    i = 0
    while i < len(argv):
        tok = argv[i]
        nxt = argv[i + 1] if i + 1 < len(argv) else None
        if (
            tok.startswith("--")
            and "=" not in tok
            and nxt is not None
            and nxt.startswith("-")
            and any(c in nxt for c in ":,")
        ):
            out.append(f"{tok}={nxt}")
            i += 2
        else:
            out.append(tok)
            i += 1
    return out


def main(argv: Optional[Sequence[str]] = None) -> int:
    parser = build_parser()
    argv = _glue_negative_sweeps(list(argv) if argv is not None else sys.argv[1:])
    try:
        args = parser.parse_args(argv)
        if getattr(args, "config", None):
            cp = configparser.ConfigParser()
            if not cp.read(args.config):
                raise ConfigError(f"config file {args.config!r} not found")
            if cp.has_section(args.command):
                base = [args.command]
                for key, value in cp.items(args.command):
                    flag = f"--{key.replace('_', '-')}"
                    base.extend([flag, value])
                rest = list(argv) if argv is not None else sys.argv[1:]
                rest = [a for a in rest if a != args.command]
                args = parser.parse_args(base + rest)
    except (ConfigError, ValueError) as exc:
        print(f"configuration error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    try:
        return args.func(args)
    except ConfigError as exc:
        print(f"configuration error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except (fibermod.GridRefinementError, diskmod.ModeRangeError,
            ckmod.TruncationError, effmod.CutoffError, RuntimeError) as exc:
        print(f"solver error: {exc}", file=sys.stderr)
        return EXIT_SOLVER


if __name__ == "__main__":
    sys.exit(main())
