"""Command-line entry point.

Exit codes: 0 success, 1 usage error, 2 numerical failure, 3 validation failure.
The worker count is read from PVDIST_WORKERS; every numeric parameter is a flag.
"""

from __future__ import annotations

import argparse
import io
import json
import logging
import math
import sys
import warnings

import numpy as np

from . import __version__
from .curves import DistributionCurve, parse_grid
from .limitshape import InballCondition, cap0_hit_probability, h_growth_diagnostic, q_probability
from .moments import approx_typical_cdf, approx_typical_moment, rho
from .simulate import EmpiricalCdf, sample_typical_distance
from .typical1d import typical1d_cdf, typical1d_moment
from .typicalexact import McBudget, default_ell, typical_cdf_exact
from .zerocell import ModelParams, contact_cdf

EXIT_OK, EXIT_USAGE, EXIT_NUMERIC, EXIT_VALIDATION = 0, 1, 2, 3

log = logging.getLogger("pvdist")


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_USAGE, f"{self.prog}: error: {message}\n")


def _model(args) -> ModelParams:
    try:
        return ModelParams(args.d, args.lam)
    except ValueError as exc:
        raise UsageError(str(exc)) from exc


def _grid(args) -> np.ndarray:
    try:
        return parse_grid(args.grid)
    except ValueError as exc:
        raise UsageError(str(exc)) from exc


def _base_meta(args, command: str) -> dict:
    meta = {"command": command, "version": __version__, "d": getattr(args, "d", None), "lambda": args.lam}
    if hasattr(args, "seed"):
        meta["seed"] = args.seed
    meta["args"] = {k: v for k, v in sorted(vars(args).items()) if k not in ("out", "format", "verbose")}
    return meta


def _emit(text: str, args) -> None:
    if args.out in (None, "-"):
        sys.stdout.write(text)
    else:
        with open(args.out, "w", encoding="utf-8") as fh:
            fh.write(text)


def cmd_contact_cdf(args) -> DistributionCurve:
    m = _model(args)
    r = _grid(args)
    return DistributionCurve(r, contact_cdf(r, m), _base_meta(args, "contact-cdf") | {"method": "contact"})


def cmd_typical_cdf(args) -> DistributionCurve:
    m = _model(args)
    r = _grid(args)
    meta = _base_meta(args, "typical-cdf")
    method = args.method
    if method == "exact" and m.d == 1:
        warnings.warn("exact method on the line: using the closed form instead", stacklevel=2)
        method = "d1-closed"
    meta["method"] = method

    if method == "d1-closed":
        if m.d != 1:
            raise UsageError("--method d1-closed requires --d 1")
        return DistributionCurve(r, typical1d_cdf(r, m.lam), meta)
    if method == "approx":
        rv = rho(m, tol=args.tol)
        meta["rho"] = rv
        return DistributionCurve(r, approx_typical_cdf(r, m, rv), meta)
    if method == "simulate":
        s = sample_typical_distance(m, args.samples, args.seed)
        meta["samples"] = args.samples
        return DistributionCurve(r, EmpiricalCdf(s)(r), meta)
    # exact via configurations
    b = McBudget(args.samples, args.inner_samples, args.kmax, args.seed, args.tail_tol)
    ell = args.ell if args.ell is not None else default_ell(m, args.seed)
    inside = r[r <= ell]
    res = typical_cdf_exact(inside, m, ell, b)
    values = np.concatenate([res.curve.value, np.ones(r.size - inside.size)])
    meta.update({k: v for k, v in res.meta.items() if k not in meta})
    meta["max_standard_error"] = float(np.max(res.se)) if res.se.size else 0.0
    return DistributionCurve(r, values, meta)


def _required_samples(d: int, tol: float) -> int:
    """Samples needed for the simulated mean to have standard error below tol/3."""
    m = ModelParams(d)
    sd = math.sqrt(approx_typical_moment(2, m, 1.0) - approx_typical_moment(1, m, 1.0) ** 2)
    return int(math.ceil((3.0 * sd / tol) ** 2))


def _parse_dims(spec: str) -> list[int]:
    dims = []
    for part in spec.split(","):
        lo, _, hi = part.partition("-")
        dims.extend(range(int(lo), int(hi or lo) + 1))
    if not dims or min(dims) < 1 or max(dims) > 10:
        raise UsageError("dimension range must lie within 1..10")
    return dims


def cmd_table1(args) -> dict:
    try:
        dims = _parse_dims(args.dims)
    except ValueError as exc:
        raise UsageError(f"bad --dims: {exc}") from exc
    need = max((_required_samples(d, args.mean_tol) for d in dims if d >= 2), default=0)
    if args.samples < need:
        raise UsageError(
            f"--samples {args.samples} is too small for a mean accurate to {args.mean_tol}; need about {need}"
        )
    rows = []
    for d in dims:
        m = ModelParams(d, args.lam)
        rv = rho(m, tol=args.tol)
        mean_a = approx_typical_moment(1, m, rv)
        var_a = approx_typical_moment(2, m, rv) - mean_a**2
        if d == 1:
            mean_e = typical1d_moment(1, args.lam)
            var_e = typical1d_moment(2, args.lam) - mean_e**2
        else:
            s = sample_typical_distance(m, args.samples, args.seed)
            mean_e, var_e = float(s.mean()), float(s.var(ddof=1))
        rows.append({"d": d, "rho": rv, "mean_exact": mean_e, "mean_approx": mean_a,
                     "var_exact": var_e, "var_approx": var_a})
        log.info("d=%d done", d)
    meta = _base_meta(args, "table1") | {"samples": args.samples}
    return {"meta": meta, "rows": rows}


def _table_text(table: dict, fmt: str) -> str:
    if fmt == "json":
        return json.dumps(table, indent=1) + "\n"
    buf = io.StringIO()
    for k, v in table["meta"].items():
        buf.write(f"# {k}={json.dumps(v)}\n")
    cols = ["d", "rho", "mean_exact", "mean_approx", "var_exact", "var_approx"]
    buf.write(",".join(cols) + "\n")
    for row in table["rows"]:
        buf.write(",".join(str(row["d"]) if c == "d" else f"{row[c]:.12g}" for c in cols) + "\n")
    return buf.getvalue()


def cmd_validate(args) -> list:
    from .validation import Suite, run_all

    tol = {}
    if args.ks_tol is not None:
        tol["ks"] = args.ks_tol
    suite = Suite(samples=args.samples, seed=args.seed,
                  exact_budget=McBudget(args.configs, args.inner_samples, None, args.seed), tol=tol)
    return run_all(suite, echo=lambda line: print(line, flush=True))


def cmd_limit_shape(args) -> DistributionCurve:
    if args.d < 2:
        raise UsageError("limit-shape needs --d >= 2")
    if args.lam < 0 or args.eps <= 0:
        raise UsageError("need --lambda >= 0 and --eps > 0")
    if args.log:
        parts = args.grid.split(":")
        try:
            lo, hi, steps = float(parts[0]), float(parts[1]), int(parts[2])
        except (ValueError, IndexError) as exc:
            raise UsageError(f"bad --grid {args.grid!r}") from exc
        if not (0 < lo < hi) or steps < 2:
            raise UsageError("log grid needs 0 < min < max and steps >= 2")
        R = np.geomspace(lo, hi, steps)
    else:
        R = _grid(args)
        if R[0] <= 0:
            raise UsageError("R grid must be positive")
    q = np.array([q_probability(InballCondition(float(x), args.eps, args.d, args.lam)) for x in R])
    meta = _base_meta(args, "limit-shape") | {"eps": args.eps, "method": "cap-coverage"}
    meta["p0_first"] = cap0_hit_probability(InballCondition(float(R[0]), args.eps, args.d))
    if R[-1] / R[0] >= 100:
        meta["h_loglog_slope"] = h_growth_diagnostic(args.d, args.eps, R)["slope"]
    return DistributionCurve(R, q, meta)


def build_parser() -> argparse.ArgumentParser:
    p = _Parser(prog="pvdist", description="Distance distributions in Poisson-Voronoi cells.")
    p.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    p.add_argument("-v", "--verbose", action="store_true")
    sub = p.add_subparsers(dest="command", required=True, parser_class=_Parser)

    def common(sp, grid_default="0:2:201"):
        sp.add_argument("--d", type=int, default=2, help="dimension (default 2)")
        sp.add_argument("--lambda", dest="lam", type=float, default=1.0, help="intensity (default 1)")
        sp.add_argument("--grid", default=grid_default, help=f"min:max:steps (default {grid_default})")
        sp.add_argument("--format", choices=("csv", "json"), default="csv")
        sp.add_argument("--out", default=None, help="output file (default stdout)")

    sp = sub.add_parser("contact-cdf", help="distance law for the 0-cell")
    common(sp)

    sp = sub.add_parser("typical-cdf", help="distance law for the typical cell")
    common(sp)
    sp.add_argument("--method", choices=("exact", "approx", "simulate", "d1-closed"), default="approx")
    sp.add_argument("--seed", type=int, default=0)
    sp.add_argument("--samples", type=int, default=4000,
                    help="outer configurations (exact) or cells (simulate); default 4000")
    sp.add_argument("--inner-samples", type=int, default=4096, help="volume probes per configuration (default 4096)")
    sp.add_argument("--ell", type=float, default=None, help="conditioning radius (default 1.6 for d=2, else calibrated)")
    sp.add_argument("--kmax", type=int, default=None, help="Poisson truncation index (default from --tail-tol)")
    sp.add_argument("--tail-tol", type=float, default=1e-6, help="Poisson tail mass bound (default 1e-6)")
    sp.add_argument("--tol", type=float, default=1e-8, help="quadrature tolerance for rho (default 1e-8)")

    sp = sub.add_parser("table1", help="rho, mean and variance for a range of dimensions")
    sp.add_argument("--dims", default="1-10", help="e.g. 1-10 or 2,3 (default 1-10)")
    sp.add_argument("--lambda", dest="lam", type=float, default=1.0)
    sp.add_argument("--seed", type=int, default=0)
    sp.add_argument("--samples", type=int, default=100_000, help="simulated cells per dimension (default 1e5)")
    sp.add_argument("--mean-tol", type=float, default=0.01, help="target accuracy of simulated means (default 0.01)")
    sp.add_argument("--tol", type=float, default=1e-8)
    sp.add_argument("--format", choices=("csv", "json"), default="csv")
    sp.add_argument("--out", default=None)

    sp = sub.add_parser("validate", help="run every reference check")
    sp.add_argument("--seed", type=int, default=2024)
    sp.add_argument("--samples", type=int, default=100_000, help="simulated samples per law (default 1e5)")
    sp.add_argument("--configs", type=int, default=4000, help="outer configurations for the exact curve")
    sp.add_argument("--inner-samples", type=int, default=4096)
    sp.add_argument("--ks-tol", type=float, default=None, help="override the KS threshold (default 0.01)")

    sp = sub.add_parser("limit-shape", help="cap-coverage probability Q_d(R, eps) along an R grid")
    common(sp, grid_default="1:1000:4")
    sp.add_argument("--eps", type=float, default=0.1)
    sp.add_argument("--log", action="store_true", help="log-spaced R grid")
    return p


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING, format="%(name)s: %(message)s")
    try:
        if args.command == "validate":
            results = cmd_validate(args)
            failed = [r for r in results if not r.passed]
            print(f"{len(results) - len(failed)}/{len(results)} checks passed")
            return EXIT_VALIDATION if failed else EXIT_OK
        if args.command == "table1":
            _emit(_table_text(cmd_table1(args), args.format), args)
            return EXIT_OK
        handler = {"contact-cdf": cmd_contact_cdf, "typical-cdf": cmd_typical_cdf,
                   "limit-shape": cmd_limit_shape}[args.command]
        _emit(handler(args).dump(args.format), args)
        return EXIT_OK
    except (UsageError, ValueError) as exc:
        print(f"pvdist: error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except (ArithmeticError, RuntimeError, FloatingPointError) as exc:
        print(f"pvdist: numerical failure: {exc}", file=sys.stderr)
        return EXIT_NUMERIC


if __name__ == "__main__":
    sys.exit(main())
