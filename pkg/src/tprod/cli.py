"""Command-line surface: tensor file I/O, decompose/apply/solve/check/bench.

Exit codes: 0 success, 1 check failed, 2 usage error, 3 numerical failure,
4 I/O or parse failure.
"""

from __future__ import annotations

import argparse
import csv
import sys
import time

import numpy as np

from . import io as tio
from .algebra import tprod
from .core import Tensor3, bcirc, conj_transpose, fnorm, fold, specnorm
from .errors import FileFormatError, FnDomainError, TprodError, UnsupportedClass
from .genfun import gfun, gfun_taylor, named_scalar_fn, polynomial, standard_tfn
from .solve import gfun_contour, lstsq, pinv, solve_axb, standard_fn_contour
from .spectral import tcsvd
from .structure import StructClass, is_member, preservation_check
from .errors import HypothesisViolation

EXIT_OK = 0
EXIT_CHECK_FAILED = 1
EXIT_USAGE = 2
EXIT_NUMERICAL = 3
EXIT_IO = 4


def _read(path):
    return tio.read_tensor(path)


def _write(path, t, text=False):
    tio.write_tensor(path, t, text=text)


def cmd_info(args):
    a = _read(args.path)
    c = tcsvd(a)
    print(f"dims: {a.m} x {a.n} x {a.p}")
    print(f"dtype: {'real64' if a.exactly_real else 'complex128'}")
    print(f"fnorm: {fnorm(a):.12g}")
    print(f"specnorm: {specnorm(a):.12g}")
    print(f"tubal rank: {c.r}")
    print(f"face ranks: {' '.join(str(r) for r in c.face_ranks)}")
    return EXIT_OK


def cmd_decompose(args):
    a = _read(args.path)
    c = tcsvd(a) if args.compact else None
    if args.compact:
        u, s, v = c.Ur, c.Sr, c.Vr
    else:
        from .spectral import tsvd

        f = tsvd(a)
        u, s, v = f.U, f.S, f.V
    rec = tprod(u, tprod(s, conj_transpose(v)))
    residual = fnorm(rec - a) / max(fnorm(a), 1e-300)
    prefix = args.out_prefix
    _write(f"{prefix}_U.tt3a", u, text=args.text)
    _write(f"{prefix}_S.tt3a", s, text=args.text)
    _write(f"{prefix}_V.tt3a", v, text=args.text)
    print(f"reconstruction residual: {residual:.3e}")
    if args.compact:
        print(f"tubal rank: {c.r}")
    if residual > 1e-10:
        print("error: factors fail to reconstruct the input", file=sys.stderr)
        return EXIT_NUMERICAL
    return EXIT_OK


def _resolve_fn(args):
    if args.poly is not None:
        coeffs = [float(v) for v in args.poly.split(",") if v.strip()]
        return polynomial(coeffs)
    return named_scalar_fn(args.fn)


def cmd_apply(args):
    a = _read(args.path)
    f = _resolve_fn(args)
    generalized = not args.standard
    if generalized:
        if args.method == "spectral":
            out = gfun(a, f)
        elif args.method == "series":
            out = gfun_taylor(a, f, z0=args.z0)
        else:
            out = gfun_contour(a, f, nodes=args.nodes)
        reference = gfun(a, f)
    else:
        if args.method == "spectral":
            out = standard_tfn(a, f)
        elif args.method == "series":
            out = standard_tfn(a, f, force_series=True)
        else:
            out = standard_fn_contour(a, f, nodes=args.nodes)
        reference = standard_tfn(a, f)
    if args.method != "spectral":
        diff = fnorm(out - reference) / max(fnorm(reference), 1e-300)
        print(f"cross-check vs spectral: {diff:.3e}")
    _write(args.out, out, text=args.text)
    return EXIT_OK


def cmd_pinv(args):
    a = _read(args.path)
    _write(args.out, pinv(a), text=args.text)
    return EXIT_OK


def cmd_solve(args):
    a = _read(args.A)
    b = _read(args.B)
    d = _read(args.D)
    res = solve_axb(a, b, d)
    print(f"consistency residual: {res.residual:.3e}")
    _write(args.out, res.x, text=args.text)
    return EXIT_OK


def cmd_lstsq(args):
    a = _read(args.A)
    b = _read(args.B)
    _write(args.out, lstsq(a, b), text=args.text)
    return EXIT_OK


def cmd_check(args):
    a = _read(args.path)
    cls = StructClass.parse(args.cls)
    ok, residual = is_member(a, cls, tol=args.tol)
    print(f"membership[{cls.name}]: residual {residual:.3e} -> {'ok' if ok else 'FAIL'}")
    failed = not ok
    if args.fn is not None:
        f = named_scalar_fn(args.fn)
        image = gfun(a, f)
        ok2, res2 = is_member(image, cls, tol=args.preserve_tol)
        print(f"after {args.fn}: residual {res2:.3e} -> {'ok' if ok2 else 'FAIL'}")
        failed = failed or not ok2
        if args.trials:
            report = preservation_check(
                cls, f, trials=args.trials, shape=(a.m, a.n, a.p), seed=args.seed,
                tol=args.preserve_tol,
            )
            print(
                f"harness[{report.cls}, {report.fn}, {report.trials} trials]: "
                f"max residual {report.max_residual:.3e} -> {'ok' if report.ok else 'FAIL'}"
            )
            failed = failed or not report.ok
    return EXIT_CHECK_FAILED if failed else EXIT_OK


def _median_time(fn, reps):
    times = []
    for _ in range(reps):
        t0 = time.perf_counter()
        fn()
        times.append(time.perf_counter() - t0)
    return float(np.median(times))


def cmd_bench(args):
    rng = np.random.default_rng(args.seed)
    m, n, p = args.m, args.n, args.p
    a = Tensor3(rng.standard_normal((p, m, n)))
    b = Tensor3(rng.standard_normal((p, n, m)))
    ops = [s.strip() for s in args.ops.split(",") if s.strip()]
    rows = []
    if "tprod" in ops:
        fft_t = _median_time(lambda: tprod(a, b, method="fft"), args.reps)
        dense_t = _median_time(lambda: tprod(a, b, method="dense"), args.reps)
        rows.append(("tprod", fft_t, dense_t))
    if "gfun" in ops:
        f = named_scalar_fn("cube")

        def dense_gfun():
            mat = bcirc(a)
            u, s, vh = np.linalg.svd(mat, full_matrices=False)
            r = int((s > s[0] * 1e-12).sum())
            return fold(((u[:, :r] * s[:r] ** 3) @ vh[:r])[:, :n], m, n, p)

        fft_t = _median_time(lambda: gfun(a, f), max(1, args.reps // 2))
        dense_t = _median_time(dense_gfun, max(1, args.reps // 2))
        rows.append(("gfun", fft_t, dense_t))

    print(f"{'op':8s} {'fft_s':>12s} {'dense_s':>12s} {'speedup':>9s}")
    for name, fft_t, dense_t in rows:
        print(f"{name:8s} {fft_t:12.6f} {dense_t:12.6f} {dense_t / fft_t:9.2f}")
    if args.csv:
        with open(args.csv, "w", newline="") as fh:
            w = csv.writer(fh)
            w.writerow(["op", "m", "n", "p", "reps", "fft_seconds", "dense_seconds", "speedup"])
            for name, fft_t, dense_t in rows:
                w.writerow([name, m, n, p, args.reps, f"{fft_t:.9f}", f"{dense_t:.9f}",
                            f"{dense_t / fft_t:.4f}"])
    return EXIT_OK


def build_parser():
    ap = argparse.ArgumentParser(prog="tprod", description=__doc__)
    sub = ap.add_subparsers(dest="command", required=True)

    p_info = sub.add_parser("info", help="dims, norms, tubal rank, face ranks")
    p_info.add_argument("path")
    p_info.set_defaults(fn_=cmd_info)

    p_dec = sub.add_parser("decompose", help="write U, S, V factor files")
    p_dec.add_argument("path")
    p_dec.add_argument("--compact", action="store_true", help="truncate at the tubal rank")
    p_dec.add_argument("--out-prefix", required=True)
    p_dec.add_argument("--text", action="store_true", help="write text files")
    p_dec.set_defaults(fn_=cmd_decompose)

    p_app = sub.add_parser("apply", help="apply a scalar function to a tensor")
    p_app.add_argument("path")
    g = p_app.add_mutually_exclusive_group(required=True)
    g.add_argument("--fn", help="named function, e.g. exp, sin, sqrt, square, power(1.5)")
    g.add_argument("--poly", help="comma-separated polynomial coefficients c0,c1,...")
    mode = p_app.add_mutually_exclusive_group()
    mode.add_argument("--generalized", action="store_true", default=True)
    mode.add_argument("--standard", action="store_true", default=False)
    p_app.add_argument("--method", choices=("spectral", "series", "contour"),
                       default="spectral")
    p_app.add_argument("--nodes", type=int, default=256)
    p_app.add_argument("--z0", type=float, default=0.0, help="series expansion point")
    p_app.add_argument("--out", required=True)
    p_app.add_argument("--text", action="store_true")
    p_app.set_defaults(fn_=cmd_apply)

    p_pinv = sub.add_parser("pinv", help="Moore-Penrose inverse")
    p_pinv.add_argument("path")
    p_pinv.add_argument("--out", required=True)
    p_pinv.add_argument("--text", action="store_true")
    p_pinv.set_defaults(fn_=cmd_pinv)

    p_solve = sub.add_parser("solve", help="best-consistent solution of A*X*B = D")
    p_solve.add_argument("--A", required=True)
    p_solve.add_argument("--B", required=True)
    p_solve.add_argument("--D", required=True)
    p_solve.add_argument("--out", required=True)
    p_solve.add_argument("--text", action="store_true")
    p_solve.set_defaults(fn_=cmd_solve)

    p_ls = sub.add_parser("lstsq", help="least squares solution of A*X = B")
    p_ls.add_argument("--A", required=True)
    p_ls.add_argument("--B", required=True)
    p_ls.add_argument("--out", required=True)
    p_ls.add_argument("--text", action="store_true")
    p_ls.set_defaults(fn_=cmd_lstsq)

    p_chk = sub.add_parser("check", help="structured-class membership and preservation")
    p_chk.add_argument("path")
    p_chk.add_argument("--class", dest="cls", required=True)
    p_chk.add_argument("--fn", default=None)
    p_chk.add_argument("--trials", type=int, default=0)
    p_chk.add_argument("--tol", type=float, default=1e-8)
    p_chk.add_argument("--preserve-tol", type=float, default=1e-8)
    p_chk.add_argument("--seed", type=int, default=0)
    p_chk.set_defaults(fn_=cmd_check)

    p_bench = sub.add_parser("bench", help="FFT path vs dense block-circulant path")
    p_bench.add_argument("--m", type=int, default=8)
    p_bench.add_argument("--n", type=int, default=8)
    p_bench.add_argument("--p", type=int, default=256)
    p_bench.add_argument("--reps", type=int, default=5)
    p_bench.add_argument("--ops", default="tprod,gfun")
    p_bench.add_argument("--csv", default=None)
    p_bench.add_argument("--seed", type=int, default=0)
    p_bench.set_defaults(fn_=cmd_bench)

    return ap


def main(argv=None):
    ap = build_parser()
    try:
        args = ap.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code) if exc.code else EXIT_OK
    try:
        return args.fn_(args)
    except (FileFormatError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_IO
    except (UnsupportedClass, FnDomainError, HypothesisViolation) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except TprodError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_NUMERICAL


if __name__ == "__main__":
    sys.exit(main())
