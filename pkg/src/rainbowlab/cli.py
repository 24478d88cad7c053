"""Command-line front end: one subcommand per family of checks.

Exit codes: 0 when every check passed, 1 when a violation (or, for
``verify``, a counterexample) was found, 2 on usage or parameter errors.
Reports go to stdout; diagnostics go to stderr.
"""

from __future__ import annotations

import argparse
import csv
import io
import itertools
import json
import logging
import os
import sys
import time
from importlib import resources
from typing import Sequence

import numpy as np

from . import __version__
from .concentration import (
    SamplerConfig,
    check_eqnew2,
    check_prop_prob,
    conditional_tail_report,
    half_split_report,
    mean_check,
    sample_eta,
    sample_matching,
    tail_report,
)
from .constructions import (
    SizeSequence,
    Status,
    c_counterexample,
    is_down_set,
    sequence_c,
    sequence_satisfying_check,
    shift_closure,
)
from .matching import (
    BudgetExceeded,
    SearchStatus,
    hall_report,
    rainbow_search,
    verify_conjecture_exhaustive,
)
from .spectral import alon_chung_check, pg_spectrum
from .threshold import LOG_BASES, threshold_report
from .tuple_space import (
    Family,
    ParameterError,
    SpaceParams,
    extremal_family,
    random_family,
)

log = logging.getLogger("rainbowlab")

THRESHOLD_FIELDS = [
    "s",
    "log_base",
    "x",
    "z",
    "tail_sum",
    "e_bound",
    "e_limit",
    "contradiction_value",
    "hypothesis_ok",
    "eq2_plus_one_ok",
    "passes",
    "double_agrees",
]


class UsageError(Exception):
    pass


def load_schema(command: str) -> dict:
    """JSON schema shipped for a subcommand's report (or a wire format such as ``family``)."""
    return json.loads(resources.files("rainbowlab").joinpath("schemas", f"{command}.json").read_text())


def _ints(text: str) -> list[int]:
    try:
        return [int(x) for x in text.split(",") if x.strip()]
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected comma-separated integers, got {text!r}")


def _floats(text: str) -> list[float]:
    try:
        return [float(x) for x in text.split(",") if x.strip()]
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected comma-separated numbers, got {text!r}")


def _seed(text: str) -> int:
    v = int(text)
    if not 0 <= v < 2**64:
        raise argparse.ArgumentTypeError(f"seed must lie in [0, 2^64), got {v}")
    return v


def _positive(text: str) -> int:
    v = int(text)
    if v < 1:
        raise argparse.ArgumentTypeError(f"expected a positive integer, got {v}")
    return v


def _sub_seed(seed: int, *path: int) -> int:
    return int(np.random.SeedSequence([seed, *path]).generate_state(1, dtype=np.uint64)[0])


def _csv(rows: list[dict], fields: list[str]) -> str:
    buf = io.StringIO()
    w = csv.DictWriter(buf, fields, lineterminator="\n", extrasaction="ignore")
    w.writeheader()
    for row in rows:
        w.writerow({k: (str(v).lower() if isinstance(v, bool) else v) for k, v in row.items()})
    return buf.getvalue()


def _emit(args, payload: dict, rows: list[dict] | None = None, fields: list[str] | None = None) -> None:
    if args.format == "csv":
        sys.stdout.write(_csv(rows or [], fields or []))
    else:
        sys.stdout.write(json.dumps(payload, indent=2) + "\n")


# -- threshold ---------------------------------------------------------------


def cmd_threshold(args) -> int:
    lo, hi = args.min_s, args.max_s
    if lo < 2 or hi > 10**7 or lo > hi:
        raise UsageError(f"range must lie within [2, 10^7], got [{lo}, {hi}]")
    reports = [threshold_report(s, args.base) for s in range(lo, hi + 1)]
    first = next((r for r in reports if r.passes), None)
    after = [r.s for r in reports if first is not None and r.s > first.s and not r.passes]
    named = {str(s): threshold_report(s, args.base).to_dict() for s in (470, 471)}
    variants = {b: threshold_report(470, b).to_dict() for b in LOG_BASES}
    payload = {
        "command": "threshold",
        "range": [lo, hi],
        "log_base": args.base,
        "min_passing_s": None if first is None else first.s,
        "at_min": None if first is None else first.to_dict(),
        "at": named,
        "passes_470": named["470"]["passes"],
        "passes_471": named["471"]["passes"],
        "log_base_variants_470": variants,
        "failures_after_min": after,
        "double_agrees": all(r.double_agrees for r in reports),
    }
    if args.table:
        payload["table"] = [r.to_dict() for r in reports]
    rows = [r.to_dict() for r in reports] if args.table else [named["470"], named["471"]]
    if first is not None and not args.table:
        rows.insert(0, first.to_dict())
    _emit(args, payload, rows, THRESHOLD_FIELDS)
    return 0 if first is not None and payload["double_agrees"] else 1


# -- concentration -----------------------------------------------------------


def _concentration_family(args, space: SpaceParams) -> Family:
    if args.extremal_s is not None:
        return extremal_family(SpaceParams(space.n, space.k, args.extremal_s))
    if not 0 <= args.alpha <= 1:
        raise UsageError(f"alpha must lie in [0, 1], got {args.alpha}")
    size = round(args.alpha * space.size)
    return random_family(space, size, _sub_seed(args.seed, 0))


def cmd_concentration(args) -> int:
    space = SpaceParams(args.n, args.k)
    family = _concentration_family(args, space)
    config = SamplerConfig(space, args.seed, args.trials)
    started = time.perf_counter()
    samples = sample_eta(family, config, args.threads)
    log.info("sampled %d matchings in %.2fs", args.trials, time.perf_counter() - started)
    tails = [tail_report(samples, args.lambdas, d) for d in (1, -1)]
    mean = mean_check(samples)
    halves = None
    if space.n % 2 == 0:
        halves = [half_split_report(samples, args.a, d, space.n).to_dict() for d in (1, -1)]
    cond = [conditional_tail_report(samples, lam, mu, d).to_dict() for d in (1, -1) for lam, mu in args.cond]
    ok = all(t.ok for t in tails) and mean.ok and all(h["pass"] for h in halves or [])
    payload = {
        "command": "concentration",
        "n": space.n,
        "k": space.k,
        "seed": args.seed,
        "trials": args.trials,
        "family_size": len(family),
        "alpha_n": float(samples.alpha_n),
        "mean": mean.to_dict(),
        "tails": [t.to_dict() for t in tails],
        "half_split": halves,
        "half_split_note": None if halves is not None else "skipped: n is odd",
        "conditional_tails": cond,
        "pass": ok,
    }
    rows = [row for t in tails for row in t.rows()]
    _emit(args, payload, rows, ["delta", "lambda", "empirical", "stderr", "bound", "pass"])
    return 0 if ok else 1


# -- spectral ----------------------------------------------------------------


def _random_subsets(space: SpaceParams, count: int, seed: int):
    rng = np.random.default_rng(seed)
    for _ in range(count):
        size = int(rng.integers(0, space.size + 1))
        yield random_family(space, size, int(rng.integers(0, 2**63)))


def cmd_spectral(args) -> int:
    space = SpaceParams(args.n, args.k)
    summary = pg_spectrum(space.n, space.k)
    ac_fail = prop_fail = cond_fail = 0
    witnesses = []
    for S in _random_subsets(space, args.subsets, args.seed):
        bad = []
        if not alon_chung_check(S):
            ac_fail += 1
            bad.append("alon_chung")
        if not check_prop_prob(S):
            prop_fail += 1
            bad.append("pair_probabilities")
        if not check_eqnew2(S).ok:
            cond_fail += 1
            bad.append("conditional_expectation")
        if bad:
            witnesses.append({"checks": bad, "family": S.to_dict()})
    payload = {
        "command": "spectral",
        "n": space.n,
        "k": space.k,
        "seed": args.seed,
        "spectrum": summary.to_dict(),
        "subsets": args.subsets,
        "violations": {
            "alon_chung": ac_fail,
            "pair_probabilities": prop_fail,
            "conditional_expectation": cond_fail,
        },
        "witnesses": witnesses,
        "pass": not witnesses,
    }
    rows = [{"eigenvalue": v, "multiplicity": m} for v, m in summary.spectrum]
    _emit(args, payload, rows, ["eigenvalue", "multiplicity"])
    return 0 if not witnesses else 1


# -- verify ------------------------------------------------------------------


def cmd_verify(args) -> int:
    params = SpaceParams(args.n, args.k, args.s)
    bounds = args.bounds or [(args.s - 1) * args.n ** (args.k - 1) + 1] * args.s
    if len(bounds) != args.s:
        raise UsageError(f"--bounds needs {args.s} values, got {len(bounds)}")
    noun = "pairs" if args.s == 2 else f"{args.s}-tuples"
    if args.mode == "exhaustive":
        v = verify_conjecture_exhaustive(params, bounds, ceiling=args.budget)
        status = "verified" if v.verified else ("counterexample" if v.counterexample else "inconclusive")
        payload = {"command": "verify", "mode": args.mode, "n": args.n, "k": args.k, "s": args.s, **v.to_dict()}
        checked, witness = v.checked, v.counterexample
    else:
        seq = SizeSequence(tuple(sorted(b - 1 for b in bounds)), params)
        verdict = sequence_satisfying_check(seq, "random", budget=args.budget, seed=args.seed)
        status = {Status.COUNTEREXAMPLE: "counterexample"}.get(verdict.status, "inconclusive")
        checked, witness = verdict.checked, verdict.witness
        payload = {
            "command": "verify",
            "mode": args.mode,
            "n": args.n,
            "k": args.k,
            "s": args.s,
            "verified": False,
            "checked": checked,
            "inconclusive": 0,
            "bounds": list(bounds),
            "counterexample": None if witness is None else [f.to_dict() for f in witness],
        }
    payload["status"] = status
    payload["message"] = {
        "verified": f"verified {checked} {noun}",
        "counterexample": f"counterexample after {checked} {noun}",
        "inconclusive": f"no counterexample in {checked} {noun} (inconclusive)",
    }[status]
    rows = [{"status": status, "checked": checked, "message": payload["message"]}]
    _emit(args, payload, rows, ["status", "checked", "message"])
    print(payload["message"], file=sys.stderr)
    return 1 if status == "counterexample" else 0


# -- counterexample ----------------------------------------------------------


def _valid_tuples(args) -> list[tuple[int, ...]]:
    """Every F in [s+1, n] x [n]^{k-1} unless --F was given."""
    if args.F:
        return [tuple(f) for f in args.F]
    rest = [range(1, args.n + 1)] * (args.k - 1)
    return list(itertools.product(range(args.s + 1, args.n + 1), *rest))


def cmd_counterexample(args) -> int:
    seq = sequence_c(args.s, args.n, args.k)
    results = []
    ok = True
    for F in _valid_tuples(args):
        fams = c_counterexample(args.s, args.n, args.k, F)
        sizes = [len(f) for f in fams]
        exceeds = all(z > c for z, c in zip(sizes, seq.values))
        search = rainbow_search(fams, args.budget)
        valid = exceeds and search.status is SearchStatus.ABSENT
        ok &= valid
        entry = {
            "F": list(F),
            "sizes": sizes,
            "exceeds_sequence": exceeds,
            "rainbow": search.status.value,
            "valid": valid,
            "families": [f.to_dict() for f in fams],
        }
        if search.matching is not None:
            entry["rainbow_matching"] = search.matching.to_dict()
        results.append(entry)
    payload = {
        "command": "counterexample",
        "s": args.s,
        "n": args.n,
        "k": args.k,
        "sequence_c": list(seq.values),
        "results": results,
        "pass": ok,
    }
    rows = [{**r, "F": " ".join(map(str, r["F"])), "sizes": " ".join(map(str, r["sizes"]))} for r in results]
    _emit(args, payload, rows, ["F", "sizes", "exceeds_sequence", "rainbow", "valid"])
    return 0 if ok else 1


# -- hall --------------------------------------------------------------------


def _hall_families(args) -> list[Family]:
    if args.families == "c":
        F = tuple(args.F[0]) if args.F else (args.s + 1,) + (1,) * (args.k - 1)
        return c_counterexample(args.s, args.n, args.k, F)
    return [extremal_family(SpaceParams(args.n, args.k, args.s))] * args.s


def hall_violations(report, s: int) -> list[str]:
    bad = []
    if not report.saturated and report.j_m is None:
        bad.append("unsaturated_without_j")
    if report.j_m is not None:
        neg = sum(z for z in report.zeta if z <= 0)
        if neg > -report.j_m * (s - report.j_m):
            bad.append("negative_mass")
    return bad


def cmd_hall(args) -> int:
    fams = _hall_families(args)
    s = len(fams)
    config = SamplerConfig(SpaceParams(args.n, args.k), args.seed, args.trials)
    reports = []
    violations = 0
    saturated = 0
    for t in range(args.trials):
        rep = hall_report(fams, sample_matching(config, t))
        bad = hall_violations(rep, s)
        violations += bool(bad)
        saturated += rep.saturated
        d = rep.to_dict()
        d["violations"] = bad
        reports.append(d)
    payload = {
        "command": "hall",
        "n": args.n,
        "k": args.k,
        "s": s,
        "seed": args.seed,
        "trials": args.trials,
        "families": args.families,
        "saturated": saturated,
        "violations": violations,
        "pass": violations == 0,
    }
    if not args.summary_only:
        payload["reports"] = reports
    rows = [{**r, "eta": " ".join(map(str, r["eta"])), "zeta": " ".join(map(str, r["zeta"]))} for r in reports]
    _emit(args, payload, rows, ["eta", "zeta", "j_m", "saturated"])
    return 0 if violations == 0 else 1


# -- shift -------------------------------------------------------------------


def cmd_shift(args) -> int:
    space = SpaceParams(args.n, args.k)
    rng = np.random.default_rng(args.seed)
    size_fail = down_fail = rainbow_fail = no_rainbow = 0
    witnesses = []
    for _ in range(args.instances):
        fams = [
            random_family(space, int(rng.integers(0, space.size + 1)), int(rng.integers(0, 2**63)))
            for _ in range(args.s)
        ]
        shifted = shift_closure(fams)
        bad = []
        if [len(f) for f in fams] != [len(f) for f in shifted]:
            size_fail += 1
            bad.append("cardinality")
        if not all(is_down_set(f) for f in shifted):
            down_fail += 1
            bad.append("down_set")
        if rainbow_search(fams).status is SearchStatus.ABSENT:
            no_rainbow += 1
            if rainbow_search(shifted).status is not SearchStatus.ABSENT:
                rainbow_fail += 1
                bad.append("rainbow_created")
        if bad:
            witnesses.append({"checks": bad, "families": [f.to_dict() for f in fams]})
    payload = {
        "command": "shift",
        "n": args.n,
        "k": args.k,
        "s": args.s,
        "seed": args.seed,
        "instances": args.instances,
        "no_rainbow_instances": no_rainbow,
        "violations": {"cardinality": size_fail, "down_set": down_fail, "rainbow_created": rainbow_fail},
        "witnesses": witnesses,
        "pass": not witnesses,
    }
    rows = [{"check": k, "violations": v} for k, v in payload["violations"].items()]
    _emit(args, payload, rows, ["check", "violations"])
    return 0 if not witnesses else 1


# -- parser ------------------------------------------------------------------


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="rainbowlab", description=__doc__.splitlines()[0])
    p.add_argument("--version", action="version", version=__version__)
    p.add_argument("-v", "--verbose", action="store_true", help="diagnostics on stderr")
    sub = p.add_subparsers(dest="command", required=True)

    def common(sp, seed=True):
        sp.add_argument("--format", choices=("json", "csv"), default="json")
        sp.add_argument("--threads", type=_positive, default=os.cpu_count() or 1)
        if seed:
            sp.add_argument("--seed", type=_seed, default=0)

    sp = sub.add_parser("threshold", help="x(s), z(s), tail sums and the minimal passing s")
    sp.add_argument("--min-s", type=int, default=2)
    sp.add_argument("--max-s", type=int, default=1000)
    sp.add_argument("--base", choices=LOG_BASES, default="e")
    sp.add_argument("--table", action="store_true", help="include every s in the range")
    common(sp, seed=False)
    sp.set_defaults(func=cmd_threshold)

    sp = sub.add_parser("concentration", help="Monte Carlo tail checks for |F & M|")
    sp.add_argument("--n", type=_positive, required=True)
    sp.add_argument("--k", type=_positive, required=True)
    grp = sp.add_mutually_exclusive_group()
    grp.add_argument("--alpha", type=float, default=0.1, help="density of a seeded random family")
    grp.add_argument("--extremal-s", type=_positive, help="use the extremal family for this s")
    sp.add_argument("--trials", type=_positive, default=10**5)
    sp.add_argument("--lambdas", type=_floats, default=[2.0, 4.0, 6.0, 8.0])
    sp.add_argument("--a", type=float, default=3.0, help="half-split deviation")
    sp.add_argument(
        "--cond",
        type=_floats,
        action="append",
        default=[],
        metavar="LAMBDA,MU",
        help="conditional tail check at (lambda, mu); repeatable",
    )
    common(sp)
    sp.set_defaults(func=cmd_concentration)

    sp = sub.add_parser("spectral", help="PG_{n,k} spectrum and exact mixing checks")
    sp.add_argument("--n", type=_positive, required=True)
    sp.add_argument("--k", type=_positive, required=True)
    sp.add_argument("--subsets", type=int, default=1000)
    common(sp)
    sp.set_defaults(func=cmd_spectral)

    sp = sub.add_parser("verify", help="search for counterexamples to the rainbow conjecture")
    sp.add_argument("--n", type=_positive, required=True)
    sp.add_argument("--k", type=_positive, required=True)
    sp.add_argument("--s", type=_positive, required=True)
    sp.add_argument("--mode", choices=("exhaustive", "random"), default="exhaustive")
    sp.add_argument("--bounds", type=_ints, help="minimum family sizes, one per family")
    sp.add_argument("--budget", type=_positive, default=10**7)
    common(sp)
    sp.set_defaults(func=cmd_verify)

    sp = sub.add_parser("counterexample", help="build and check the c-sequence counterexample")
    sp.add_argument("--n", type=_positive, required=True)
    sp.add_argument("--k", type=_positive, required=True)
    sp.add_argument("--s", type=_positive, required=True)
    sp.add_argument("--F", type=_ints, action="append", help="tuple F, e.g. 4,1; repeatable")
    sp.add_argument("--budget", type=_positive, default=10**7)
    common(sp, seed=False)
    sp.set_defaults(func=cmd_counterexample)

    sp = sub.add_parser("hall", help="Hall statistics over seeded random matchings")
    sp.add_argument("--n", type=_positive, required=True)
    sp.add_argument("--k", type=_positive, required=True)
    sp.add_argument("--s", type=_positive, required=True)
    sp.add_argument("--families", choices=("c", "extremal"), default="c")
    sp.add_argument("--F", type=_ints, action="append", help="tuple F for the c construction")
    sp.add_argument("--trials", type=_positive, default=10**4)
    sp.add_argument("--summary-only", action="store_true")
    common(sp)
    sp.set_defaults(func=cmd_hall)

    sp = sub.add_parser("shift", help="shift-closure invariants on seeded random families")
    sp.add_argument("--n", type=_positive, required=True)
    sp.add_argument("--k", type=_positive, required=True)
    sp.add_argument("--s", type=_positive, default=2)
    sp.add_argument("--instances", type=_positive, default=1000)
    common(sp)
    sp.set_defaults(func=cmd_shift)
    return p


def main(argv: Sequence[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    logging.basicConfig(
        level=logging.INFO if args.verbose else logging.WARNING,
        format="%(levelname)s %(message)s",
        stream=sys.stderr,
    )
    if getattr(args, "cond", None):
        for pair in args.cond:
            if len(pair) != 2:
                parser.error("--cond takes exactly LAMBDA,MU")
    try:
        return args.func(args)
    except (UsageError, ParameterError, BudgetExceeded) as exc:
        print(f"rainbowlab {args.command}: error: {exc}", file=sys.stderr)
        return 2


run = main


if __name__ == "__main__":
    sys.exit(main())
