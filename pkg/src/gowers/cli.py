"""Command-line entry point: ``gowers {norm,tower,verify,oracle,bench}``.

Exit status is 0 on success, 1 on usage, spec or budget errors, and 2 when a
verification check fails.  Reports go to stdout or are written atomically to
``--out``.
"""
from __future__ import annotations

import argparse
import csv
import io
import json
import os
import sys
import tempfile
import time

import numpy as np

from . import checks, delta
from .discrete import discrete_uk_fourier, discrete_uk_norm, sample_oracle
from .measures import SpecError, spec_from_json
from .spectral import BudgetExceeded, cross_correlate, make_freq_box, plancherel_mass

EXIT_OK, EXIT_USAGE, EXIT_FAILED = 0, 1, 2

VERIFY_HEADER = ["check", "status", "measured", "tolerance", "seed", "spec_digest"]
BENCH_HEADER = ["backend", "d", "k", "M", "elements", "seconds", "max_abs_diff"]


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        raise UsageError(message)


def _positive(v):
    try:
        x = int(v)
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected an integer, got {v!r}")
    if x < 1:
        raise argparse.ArgumentTypeError(f"expected a positive integer, got {x}")
    return x


def _nonneg(v):
    x = int(v)
    if x < 0:
        raise argparse.ArgumentTypeError(f"expected a non-negative integer, got {x}")
    return x


def _schedule(v):
    try:
        ms = [int(p) for p in v.split(",") if p.strip()]
    except ValueError:
        raise argparse.ArgumentTypeError(f"bad radius list {v!r}")
    if not ms or any(m < 0 for m in ms):
        raise argparse.ArgumentTypeError(f"radii must be non-negative integers: {v!r}")
    return ms


def load_spec(text):
    """Inline JSON, or a path to a JSON file."""
    if os.path.exists(text):
        with open(text) as fh:
            text = fh.read()
    try:
        obj = json.loads(text)
    except json.JSONDecodeError as exc:
        raise SpecError(f"spec is neither a file nor valid JSON: {exc}") from None
    return spec_from_json(obj)


def write_output(text, path=None):
    """Write to stdout, or atomically to ``path`` (temp file + rename)."""
    if path is None:
        sys.stdout.write(text)
        return
    folder = os.path.dirname(os.path.abspath(path))
    fd, tmp = tempfile.mkstemp(dir=folder, prefix=".tmp-", suffix=os.path.basename(path))
    try:
        with os.fdopen(fd, "w") as fh:
            fh.write(text)
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise


def _dumps(obj):
    return json.dumps(checks._jsonable(obj), sort_keys=True, indent=2) + "\n"


def _csv(header, rows):
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(header)
    w.writerows(rows)
    return buf.getvalue()


# --------------------------------------------------------------------------
# commands


def cmd_norm(args):
    spec = load_spec(args.spec)
    _check_d(spec, args.d)
    report = delta.tail_report(spec, args.k, args.M, growth=args.growth, tol=args.tol,
                               backend=args.backend, budget=args.budget)
    if args.format == "csv":
        rows = [[k, M, repr(v), report.verdicts[k]]
                for k in report.ks for M, v in zip(report.schedule, report.values[k])]
        return _csv(["k", "M", "value", "verdict"], rows)
    return _dumps(report.to_json())


def cmd_tower(args):
    spec = load_spec(args.spec)
    _check_d(spec, args.d)
    if len(args.M) != 1:
        raise UsageError("tower takes a single radius --M")
    t0 = time.perf_counter()
    tower = delta.build_tower(spec, args.k, args.M[0], budget=args.budget, backend=args.backend)
    seconds = time.perf_counter() - t0
    levels = []
    for j, T in enumerate(tower.levels):
        levels.append({"level": j, "shape": list(T.box.shape), "elements": T.box.size,
                       "plancherel_mass": plancherel_mass(T), "origin": T.origin})
    if args.format == "csv":
        rows = [[L["level"], L["elements"], repr(L["plancherel_mass"]), repr(L["origin"].real),
                 repr(L["origin"].imag)] for L in levels]
        return _csv(["level", "elements", "plancherel_mass", "origin_re", "origin_im"], rows)
    payload = {"spec": spec.to_json(), "M": args.M[0], "backend": args.backend,
               "levels": levels}
    return _dumps({"report": payload, "timing": {"seconds": seconds}})


def cmd_verify(args):
    results = checks.run_suite(args.suite, seed=args.seed, N=args.N, k=args.k,
                               trials=args.trials, backend=args.backend)
    if args.format == "csv":
        rows = [[r.check, r.status, repr(float(r.measured)), repr(r.tolerance), r.seed,
                 r.spec_digest] for r in results]
        text = _csv(VERIFY_HEADER, rows)
    else:
        text = "".join(r.to_json() + "\n" for r in results)
    failed = any(r.status == checks.FAIL for r in results)
    return text, (EXIT_FAILED if failed else EXIT_OK)


def cmd_oracle(args):
    spec = load_spec(args.spec)
    oracle = spec.oracle()
    if oracle.support_radius is None:
        raise SpecError("oracle comparison needs a band-limited spec")
    samples = sample_oracle(oracle, args.N)
    brute = discrete_uk_norm(samples, args.k, budget=args.budget)
    fourier = discrete_uk_fourier(samples, args.k, budget=args.budget)
    payload = {"spec": spec.to_json(), "N": args.N, "k": args.k,
               "brute_force": brute, "fourier": fourier,
               "relative_difference": abs(brute - fourier) / max(abs(brute), 1e-300)}
    if args.format == "csv":
        return _csv(["N", "k", "brute_force", "fourier", "relative_difference"],
                    [[args.N, args.k, repr(brute), repr(fourier),
                      repr(payload["relative_difference"])]])
    return _dumps({"report": payload, "timing": {}})


def bench(M_values, k, d=1, backends=("naive", "fft"), seed=0, repeat=1, budget=None):
    """Time ``cross_correlate`` on random unit-norm complex rows of the
    ``(d, r=k, M)`` box with each backend.

    ``max_abs_diff`` is the largest deviation between backends, reported on
    every row of that radius.
    """
    rows = []
    for M in M_values:
        box = make_freq_box(d, k, M, budget)
        rng = np.random.default_rng([seed, M])
        shape = box.eta_shape
        a = rng.normal(size=shape) + 1j * rng.normal(size=shape)
        b = rng.normal(size=shape) + 1j * rng.normal(size=shape)
        a /= np.linalg.norm(a)
        b /= np.linalg.norm(b)
        outs, times = {}, {}
        for be in ("naive", "fft"):
            best = np.inf
            for _ in range(repeat if be in backends else 1):
                t0 = time.perf_counter()
                outs[be] = cross_correlate(a, b, box, backend=be)
                best = min(best, time.perf_counter() - t0)
            times[be] = best
        diff = float(np.max(np.abs(outs["naive"] - outs["fft"])))
        for be in backends:
            rows.append({"backend": be, "d": d, "k": k, "M": M, "elements": int(a.size),
                         "seconds": times[be], "max_abs_diff": diff})
    return rows


def cmd_bench(args):
    backends = ("naive", "fft") if args.backend in ("both", "auto") else (args.backend,)
    rows = bench(args.M, args.k, args.d, backends, args.seed, args.repeat, args.budget)
    if args.format == "json":
        return _dumps({"report": [{c: r[c] for c in BENCH_HEADER if c != "seconds"} for r in rows],
                       "timing": [r["seconds"] for r in rows]})
    return _csv(BENCH_HEADER, [[repr(r[c]) if isinstance(r[c], float) else r[c]
                                for c in BENCH_HEADER] for r in rows])


def _check_d(spec, d):
    if d is not None and spec.d != d:
        raise SpecError(f"spec lives on T^{spec.d}, --d says {d}")


# --------------------------------------------------------------------------


def build_parser():
    p = _Parser(prog="gowers", description="Gowers U^k norms of measures on the torus.")
    sub = p.add_subparsers(dest="command", required=True, parser_class=_Parser)

    def common(sp, fmt=("json", "csv")):
        sp.add_argument("--backend", choices=("naive", "fft", "auto"), default="auto")
        sp.add_argument("--budget", type=_positive, default=None,
                        help="element budget (default: $GM_BUDGET_ELEMENTS or 2^26)")
        sp.add_argument("--format", choices=fmt, default=fmt[0])
        sp.add_argument("--out", default=None, help="write here instead of stdout")

    sp = sub.add_parser("norm", help="U^1..U^k along a radius schedule")
    sp.add_argument("--spec", required=True, help="JSON file or inline JSON")
    sp.add_argument("--k", type=_positive, required=True)
    sp.add_argument("--M", type=_schedule, required=True, help="radius or comma list")
    sp.add_argument("--d", type=_positive, default=None)
    sp.add_argument("--growth", type=float, default=0.01)
    sp.add_argument("--tol", type=float, default=1e-6)
    common(sp)

    sp = sub.add_parser("tower", help="summary of Delta tower levels 0..k")
    sp.add_argument("--spec", required=True)
    sp.add_argument("--k", type=_nonneg, required=True)
    sp.add_argument("--M", type=_schedule, required=True)
    sp.add_argument("--d", type=_positive, default=None)
    common(sp)

    sp = sub.add_parser("verify", help="run the property suite")
    sp.add_argument("--suite", choices=checks.SUITES + ("all",), default="all")
    sp.add_argument("--seed", type=int, default=0)
    sp.add_argument("--N", type=_positive, default=16)
    sp.add_argument("--k", type=_positive, default=2)
    sp.add_argument("--trials", type=_positive, default=3)
    common(sp, fmt=("jsonl", "csv"))

    sp = sub.add_parser("oracle", help="brute-force vs Fourier U^k on Z_N")
    sp.add_argument("--spec", required=True)
    sp.add_argument("--N", type=_positive, required=True)
    sp.add_argument("--k", type=_positive, required=True)
    common(sp)

    sp = sub.add_parser("bench", help="naive vs FFT cross-correlation timings")
    sp.add_argument("--M", type=_schedule, required=True)
    sp.add_argument("--k", type=_positive, default=2, help="number of eta blocks r")
    sp.add_argument("--d", type=_positive, default=1)
    sp.add_argument("--seed", type=int, default=0)
    sp.add_argument("--repeat", type=_positive, default=3)
    sp.add_argument("--backend", choices=("naive", "fft", "both", "auto"), default="both")
    sp.add_argument("--budget", type=_positive, default=None)
    sp.add_argument("--format", choices=("csv", "json"), default="csv")
    sp.add_argument("--out", default=None)
    return p


COMMANDS = {"norm": cmd_norm, "tower": cmd_tower, "verify": cmd_verify,
            "oracle": cmd_oracle, "bench": cmd_bench}


def main(argv=None):
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
        result = COMMANDS[args.command](args)
        text, code = result if isinstance(result, tuple) else (result, EXIT_OK)
        write_output(text, args.out)
        return code
    except UsageError as exc:
        print(f"gowers: error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except BudgetExceeded as exc:
        print(f"gowers: budget exceeded: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except (SpecError, ValueError, OSError) as exc:
        print(f"gowers: error: {exc}", file=sys.stderr)
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
