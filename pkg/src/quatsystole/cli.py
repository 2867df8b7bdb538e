"""Command-line interface: bound, analyze, witness, table, selftest.

Exit codes: 0 ok, 2 inadmissible group data, 3 ineligible ideal, 4 parse error,
5 numerical or search failure.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import math
import os
import sys
from fractions import Fraction
from typing import Optional

from .eigen import EigenConvergenceError
from .hyperbolic import GeometryError, classify, trace_length_bound
from .lattice import (
    AdmissibleGroupSpec,
    bad_places,
    congruence_index,
    index_upper_bound,
    is_admissible,
    is_lattice_element,
    local_index,
)
from .matrixfile import MatrixFile, MatrixFileError, dump, load
from .numberfield import FieldElement, FieldError, IdealSpec, PrimeIdealData, classify_prime
from .quatlinalg import preserves_form, right_eigenvalues
from .systole import (
    CSV_COLUMNS,
    WitnessNotFound,
    congruence_witness,
    exceeds_exactly,
    find_witness,
    primes_in,
    sweep,
    systole_lower_bound_index,
    systole_lower_bound_norm,
    trace_bound_report,
)

EXIT_OK = 0
EXIT_INADMISSIBLE = 2
EXIT_INELIGIBLE = 3
EXIT_PARSE = 4
EXIT_NUMERICAL = 5

OUTPUT_DIR_ENV = "QUATSYSTOLE_OUTPUT_DIR"


class CliError(Exception):
    def __init__(self, code: int, message: str, payload: Optional[dict] = None):
        super().__init__(message)
        self.code = code
        self.payload = payload


# ---------------------------------------------------------------------------
# formatting


def fmt_float(x: float):
    """12 significant digits; non-finite values become strings."""
    if math.isnan(x):
        return "nan"
    if math.isinf(x):
        return "inf" if x > 0 else "-inf"
    return float(format(x, ".12g")) + 0.0  # no negative zero


def fmt_value(v):
    if isinstance(v, bool) or v is None or isinstance(v, (int, str)):
        return v
    if isinstance(v, float):
        return fmt_float(v)
    if isinstance(v, Fraction):
        return str(v)
    if isinstance(v, FieldElement):
        return str(v)
    if isinstance(v, complex):
        return [fmt_float(v.real), fmt_float(v.imag)]
    if isinstance(v, dict):
        return {k: fmt_value(x) for k, x in v.items()}
    if isinstance(v, (list, tuple)):
        return [fmt_value(x) for x in v]
    return str(v)


def dumps(obj: dict) -> str:
    return json.dumps(fmt_value(obj), indent=2) + "\n"


def csv_cell(v) -> str:
    if isinstance(v, bool):
        return "true" if v else "false"
    v = fmt_value(v)
    return v if isinstance(v, str) else json.dumps(v)


# ---------------------------------------------------------------------------
# argument handling


def parse_primes(text: str) -> list[int]:
    """``lo..hi`` (inclusive) or a comma list."""
    try:
        if ".." in text:
            lo, hi = text.split("..", 1)
            return primes_in(int(lo), int(hi))
        return sorted({int(t) for t in text.split(",") if t.strip()})
    except ValueError as exc:
        raise CliError(EXIT_PARSE, f"bad prime range {text!r}; expected lo..hi or p1,p2,...") from exc


def build_spec(args) -> AdmissibleGroupSpec:
    try:
        spec = AdmissibleGroupSpec.build(args.d, args.a, args.n, args.delta, args.gamma)
    except (FieldError, ValueError) as exc:
        raise CliError(EXIT_PARSE, str(exc)) from exc
    ok, problems = is_admissible(spec)
    if not ok:
        raise CliError(
            EXIT_INADMISSIBLE,
            "inadmissible: " + "; ".join(problems),
            {"error": "inadmissible", "reasons": problems},
        )
    return spec


def select_prime(spec: AdmissibleGroupSpec, p: int, r: Optional[int]) -> PrimeIdealData:
    try:
        above = classify_prime(p, spec.field)
    except (FieldError, ValueError) as exc:
        raise CliError(EXIT_PARSE, str(exc)) from exc
    if r is None:
        return above[0]
    for P in above:
        if P.r == r % p:
            return P
    raise CliError(EXIT_PARSE, f"no prime ideal above {p} with residue {r}")


def eligible_ideal(spec, args, S=None) -> tuple[IdealSpec, PrimeIdealData]:
    P = select_prime(spec, args.prime, args.r)
    if args.e < 1:
        raise CliError(EXIT_PARSE, "--e must be >= 1")
    if P.kind == "inert" and not args.inert_ok:
        raise CliError(
            EXIT_INELIGIBLE,
            f"prime {P} is inert (norm {P.q}); pass --inert-ok to use it",
            {"error": "ineligible", "prime": str(P), "reasons": ["inert"]},
        )
    S = S if S is not None else bad_places(spec, max(100, args.prime))
    reasons = sorted(S.reasons(P))
    if reasons and not args.force:
        raise CliError(
            EXIT_INELIGIBLE,
            f"prime {P} is a bad place: {', '.join(reasons)}",
            {"error": "ineligible", "prime": str(P), "reasons": reasons},
        )
    return IdealSpec.prime_power(P, args.e), P


def spec_record(spec: AdmissibleGroupSpec) -> dict:
    return {
        "d": spec.d,
        "delta": spec.algebra.delta,
        "gamma": spec.algebra.gamma,
        "a": spec.a,
        "n": spec.n,
    }


def prime_record(P: PrimeIdealData, e: int) -> dict:
    return {"prime": str(P), "prime_p": P.p, "kind": P.kind, "residue_r": P.r, "q": P.q, "e": e}


# ---------------------------------------------------------------------------
# commands


def cmd_bound(args) -> tuple[str, int]:
    spec = build_spec(args)
    I, P = eligible_ideal(spec, args)
    forced = False
    try:
        index = congruence_index(I, spec)
    except ValueError:
        # bad place passed with --force: hyperspecial formula reported as-is
        forced = True
        index = local_index(P.q, args.e, spec.n)
    low = systole_lower_bound_norm(I, spec)
    idx = systole_lower_bound_index(index, spec.n)
    tb = trace_bound_report(I, spec)
    out = {"spec": spec_record(spec), **prime_record(P, args.e), "norm_I": I.norm()}
    out.update(
        {
            "index": index,
            "index_upper_bound": index_upper_bound(I, spec.n),
            "lower_bound_norm": low.value,
            "lower_bound_valid": low.valid,
            "lower_bound_index": idx.value,
            "index_slope": idx.constants["slope"],
            "index_constant": "-c",
            "trace_bound": tb.exact,
            "trace_bound_float": tb.value,
            "forced": forced,
        }
    )
    return dumps(out), EXIT_OK


def analyze_file(path: str) -> dict:
    mf = load(path)
    spec, C = mf.spec, mf.matrix
    if not spec.algebra.is_definite():
        raise MatrixFileError("the algebra must be definite (delta, gamma totally negative)", "delta")
    exact_form = preserves_form(C, spec.J())
    lattice = is_lattice_element(C, spec)
    mat = C.to_float("trivial")
    a = spec.a.embed("trivial")
    try:
        cls = classify(mat)
        kind, t = cls.kind, cls.t
        eig = list(cls.eigenvalues)
    except ArithmeticError as exc:
        if isinstance(exc, EigenConvergenceError) or exact_form:
            raise
        eig = list(right_eigenvalues(mat))
        kind, t = "unclassified", None
    tr = C.real_trace()
    out = {
        "spec": spec_record(spec),
        "is_lattice": lattice,
        "preserves_form": exact_form,
        "is_integral": C.is_integral(),
        "eigenvalues": [complex(z) for z in eig],
        "class": kind,
    }
    if kind == "loxodromic":
        out["t"] = complex(t)
        out["length"] = 2.0 * math.log(abs(t))
    tlb = trace_length_bound(C, spec.n) if a > 0 else -math.inf
    out["trace"] = tr
    out["trace_float"] = tr.embed("trivial")
    out["trace_bound"] = tlb if math.isfinite(tlb) else None
    if kind == "loxodromic" and math.isfinite(tlb):
        out["trace_bound_holds"] = tlb <= out["length"] + 1e-6
    return out


def cmd_analyze(args) -> tuple[str, int]:
    return dumps(analyze_file(args.file)), EXIT_OK


def cmd_witness(args) -> tuple[str, int]:
    spec = build_spec(args)
    I, P = eligible_ideal(spec, args)
    W = find_witness(spec, args.height)
    if args.emit_matrix:
        dump(MatrixFile(spec, W.matrix()), args.emit_matrix)
    cw = congruence_witness(W, I)
    low = systole_lower_bound_norm(I, spec)
    tb = trace_bound_report(I, spec)
    tr = cw.element.real_trace()
    tlb = trace_length_bound(cw.element, spec.n)
    sandwich = low.value <= cw.length
    trace_ok = exceeds_exactly(tr, tb.exact)
    chain_ok = tlb <= cw.length + 1e-6
    out = {"spec": spec_record(spec), **prime_record(P, args.e), "norm_I": I.norm()}
    out.update(
        {
            "c": W.c,
            "s": W.s,
            "b": W.b,
            "witness_length": W.length(),
            "m": cw.m,
            "length": cw.length,
            "trace": tr,
            "trace_bound": tb.exact,
            "trace_bound_holds": trace_ok,
            "trace_length_bound": tlb,
            "lower_bound_norm": low.value,
            "lower_bound_valid": low.valid,
            "sandwich": "PASS" if sandwich and trace_ok and chain_ok else "FAIL",
        }
    )
    return dumps(out), EXIT_OK if out["sandwich"] == "PASS" else EXIT_NUMERICAL


def cmd_table(args, stderr) -> tuple[str, int]:
    spec = build_spec(args)
    primes = parse_primes(args.primes)
    S = bad_places(spec, max(primes + [100]))
    keep = []
    for p in primes:
        P = classify_prime(p, spec.field)[0]
        if P.kind == "inert" and not args.inert_ok:
            print(f"refused p={p}: inert", file=stderr)
            continue
        if S.reasons(P):
            print(f"refused p={p}: {','.join(sorted(S.reasons(P)))}", file=stderr)
            continue
        keep.append(p)
    W = find_witness(spec, args.height) if keep else None
    rows, _ = sweep(spec, keep, W, S, args.e) if keep else ([], [])
    failed = [r for r in rows if not (r.sandwich and r.trace_ok)]
    for r in failed:
        print(f"check failed p={r.prime.p}: sandwich={r.sandwich} trace={r.trace_ok}", file=stderr)
    if args.format == "json":
        text = dumps({"spec": spec_record(spec), "rows": [r.as_dict() for r in rows]})
    else:
        buf = io.StringIO()
        writer = csv.writer(buf, lineterminator="\n")
        writer.writerow(CSV_COLUMNS)
        for r in rows:
            d = r.as_dict()
            writer.writerow([csv_cell(d[c]) for c in CSV_COLUMNS])
        text = buf.getvalue()
    return text, EXIT_NUMERICAL if failed else EXIT_OK


def cmd_selftest(args, stdout) -> tuple[str, int]:
    from .selftest import run_all

    ok = run_all(stdout, quick=not args.full)
    return "", EXIT_OK if ok else EXIT_NUMERICAL


# ---------------------------------------------------------------------------


def _group_args(p: argparse.ArgumentParser) -> None:
    p.add_argument("--d", type=int, default=2, help="squarefree d with d = 2, 3 mod 4")
    p.add_argument("--a", default="1+1s2", help="form parameter, e.g. 1+1s2")
    p.add_argument("--n", type=int, default=1, help="hyperbolic dimension (quaternionic)")
    p.add_argument("--delta", default="-1")
    p.add_argument("--gamma", default="-1")


def _prime_args(p: argparse.ArgumentParser) -> None:
    p.add_argument("--prime", type=int, required=True, help="rational prime below the ideal")
    p.add_argument("--r", type=int, default=None, help="residue of sqrt(d) selecting a split factor")
    p.add_argument("--e", type=int, default=1, help="exponent of the prime ideal")
    p.add_argument("--inert-ok", action="store_true", help="allow inert primes (norm p^2)")
    p.add_argument("--force", action="store_true", help="ignore the bad-place set")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="quatsystole", description=__doc__.splitlines()[0])
    parser.add_argument("--output", help=f"write the result to this file (relative to ${OUTPUT_DIR_ENV} if set)")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("bound", help="systole lower bounds and index for a prime-power ideal")
    _group_args(p)
    _prime_args(p)

    p = sub.add_parser("analyze", help="spectral analysis of a matrix file")
    p.add_argument("file")

    p = sub.add_parser("witness", help="congruence witness and sandwich check")
    _group_args(p)
    _prime_args(p)
    p.add_argument("--height", type=int, default=20, help="coordinate bound of the witness search")
    p.add_argument("--emit-matrix", metavar="PATH", help="also write the witness block as a matrix file")

    p = sub.add_parser("table", help="sweep a prime range and emit CSV or JSON")
    _group_args(p)
    p.add_argument("--primes", required=True, help="lo..hi or p1,p2,...")
    p.add_argument("--e", type=int, default=1)
    p.add_argument("--inert-ok", action="store_true")
    p.add_argument("--height", type=int, default=20)
    p.add_argument("--format", choices=("csv", "json"), default="csv")

    p = sub.add_parser("selftest", help="run the invariant suites")
    p.add_argument("--full", action="store_true", help="larger sample sizes")
    return parser


def _write(text: str, target: Optional[str], stdout) -> None:
    if not text:
        return
    if target:
        base = os.environ.get(OUTPUT_DIR_ENV)
        path = os.path.join(base, target) if base else target
        with open(path, "w", encoding="utf-8") as fh:
            fh.write(text)
    else:
        stdout.write(text)


def main(argv=None, stdout=None, stderr=None) -> int:
    stdout = stdout or sys.stdout
    stderr = stderr or sys.stderr
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return EXIT_PARSE if exc.code not in (0, None) else EXIT_OK
    try:
        if args.command == "bound":
            text, code = cmd_bound(args)
        elif args.command == "analyze":
            text, code = cmd_analyze(args)
        elif args.command == "witness":
            text, code = cmd_witness(args)
        elif args.command == "table":
            text, code = cmd_table(args, stderr)
        else:
            text, code = cmd_selftest(args, stdout)
    except CliError as exc:
        print(f"error: {exc}", file=stderr)
        if exc.payload is not None:
            stdout.write(dumps(exc.payload))
        return exc.code
    except MatrixFileError as exc:
        print(f"parse error: {exc}", file=stderr)
        return EXIT_PARSE
    except WitnessNotFound as exc:
        print(f"search exhausted: {exc}", file=stderr)
        return EXIT_NUMERICAL
    except (ArithmeticError, GeometryError) as exc:
        print(f"numerical failure: {exc}", file=stderr)
        return EXIT_NUMERICAL
    _write(text, args.output, stdout)
    return code


if __name__ == "__main__":
    sys.exit(main())
