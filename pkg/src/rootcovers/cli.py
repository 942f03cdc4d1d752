"""Command-line front end.

Subcommands
-----------
arrangement generate|info|validate   work with arrangement files
invariants                           one cover: exact chi, c1^2, c2, ratios
tables                               re-run a built-in reference table
scan                                 good-sample ratios across primes (CSV)
badset                               Farey bad-set statistics or members
numth                                debug access to the exact kernels

Every emitted result embeds its run manifest (command, inputs, seed, C,
tool version), and reruns with the same manifest produce byte-identical
output.  Exit codes: 0 ok, 2 validation/parse, 3 budget, 4 sampling
exhausted, 5 table mismatch.
"""

from __future__ import annotations

import argparse
import sys
from fractions import Fraction

from . import __version__
from . import arrangements as arr
from . import covers, numth, partitions, tables
from .errors import (
    BudgetError,
    EmptySolutionSetError,
    ExhaustedTries,
    RootCoversError,
    ValidationError,
)
from .numth import FareyConfig, bad_set, badset_bound_holds, is_prime

EXIT_OK = 0
EXIT_VALIDATION = 2
EXIT_BUDGET = 3
EXIT_EXHAUSTED = 4
EXIT_TABLE_MISMATCH = 5

_GENERATORS = {
    "general-lines": (arr.gen_general_lines, 1, "d"),
    "ceva": (arr.gen_ceva, 1, "m"),
    "pg2": (arr.gen_pg2, 1, "m"),
    "underline-ceva": (arr.gen_underline_ceva, 1, "m"),
    "p1xp1": (arr.gen_p1xp1, 3, "d1 d2 d3"),
}


def _parse_rational(text: str) -> Fraction:
    try:
        return Fraction(text)
    except (ValueError, ZeroDivisionError) as exc:
        raise ValidationError("bad-rational", f"cannot parse rational {text!r}") from exc


def _fr(x: Fraction) -> str:
    x = Fraction(x)
    return f"{x.numerator}/{x.denominator}"


class _Output:
    """Collects lines and writes them to --out or stdout at the end."""

    def __init__(self, path: str | None):
        self.path = path
        self.lines: list[str] = []

    def emit(self, line: str = "") -> None:
        self.lines.append(line)

    def finish(self) -> None:
        text = "\n".join(self.lines) + "\n"
        if self.path:
            with open(self.path, "w", encoding="utf-8") as fh:
                fh.write(text)
        else:
            sys.stdout.write(text)


def _manifest_lines(args, command: str, extra: dict | None = None) -> list[str]:
    entries = {
        "command": command,
        "version": __version__,
    }
    for key in ("arrangement", "p", "partition", "seed", "C", "samples",
                "max_tries", "primes", "out"):
        value = getattr(args, key.replace("-", "_"), None)
        if value is not None:
            entries[key] = value
    if extra:
        entries.update({k: v for k, v in extra.items() if v is not None})
    return [f"# manifest {key}={entries[key]}" for key in sorted(entries)]


def _load_arrangement(path: str) -> arr.Arrangement:
    a = arr.load(path)
    arr.validate(a)
    return a


# ---------------------------------------------------------------------------
# arrangement subcommand


def _cmd_arrangement(args) -> int:
    if args.action == "generate":
        gen, nparams, names = _GENERATORS[args.kind]
        if len(args.params) != nparams:
            raise ValidationError(
                "bad-params",
                f"generator {args.kind} takes {nparams} parameter(s): {names}",
            )
        a = gen(*args.params)
        text = arr.to_text(a)
        if args.out:
            with open(args.out, "w", encoding="utf-8") as fh:
                fh.write(text)
        else:
            sys.stdout.write(text)
        return EXIT_OK

    a = _load_arrangement(args.arrangement)
    data = arr.validate(a)
    out = _Output(args.out)
    if args.action == "validate":
        out.emit(f"arrangement {args.arrangement}: valid")
        out.emit(f"d={data.d} blocks={a.blocks} points={len(a.points)}")
        if a.line_arrangement:
            diag = arr.diagnostics(a)
            out.emit(
                "incidence-bound "
                f"{'PASS' if diag.incidence_holds else 'FAIL'} "
                f"(t2+3/4*t3 = {_fr(diag.incidence_lhs)}, floor = {_fr(diag.incidence_rhs)})"
            )
            out.emit(f"pair-floor {'PASS' if diag.pair_floor_holds else 'FAIL'}")
            out.emit(f"ratio-cap {'PASS' if diag.ratio_bound_holds else 'FAIL'}")
        out.finish()
        return EXIT_OK

    # info
    lc = arr.log_chern_direct(a)
    out.emit(f"surface: {a.surface.name} (c1^2={a.surface.c1_sq}, c2={a.surface.c2})")
    out.emit(f"curves: d={data.d} in {a.blocks} block(s)")
    for n, tn in sorted(data.t.items()):
        out.emit(f"t_{n} = {tn}")
    out.emit(f"log c1^2 = {lc.c1bar_sq}")
    out.emit(f"log c2   = {lc.c2bar}")
    if lc.c2bar != 0:
        out.emit(
            f"log ratio = {_fr(lc.ratio)} "
            f"({covers.truncate_decimal(lc.ratio, 3)}...)"
        )
    else:
        out.emit("log ratio undefined (c2 = 0)")
    out.finish()
    return EXIT_OK


# ---------------------------------------------------------------------------
# invariants subcommand


def _partition_text(parts) -> str:
    return "|".join("+".join(str(x) for x in block) for block in parts)


def _cmd_invariants(args) -> int:
    if not is_prime(args.p):
        raise ValidationError("p-prime", f"--p {args.p} is not prime")
    a = _load_arrangement(args.arrangement)
    resolved = arr.resolve(a)
    config = FareyConfig(args.C)
    sysd = partitions.system_for(a, args.p)
    tries = None
    if args.partition and args.seed is not None:
        raise ValidationError(
            "partition-or-seed", "give --partition FILE or --seed N, not both"
        )
    if args.partition:
        with open(args.partition, encoding="utf-8") as fh:
            sol = partitions.solution_from_text(sysd, fh.read())
        ma = partitions.assign(resolved, sol)
    elif args.seed is not None:
        good = partitions.sample_good(
            sysd, resolved, seed=args.seed, max_tries=args.max_tries, config=config
        )
        sol, ma, tries = good.solution, good.assignment, good.tries
    else:
        raise ValidationError("no-partition", "need --partition FILE or --seed N")
    rep = covers.report(covers.CoverSpec(args.p, resolved, ma, config))
    parts = tuple(
        tuple(sol.mu[cid] for cid in block.curve_ids) for block in sysd.blocks
    )

    out = _Output(args.out)
    manifest = _manifest_lines(args, "invariants", {"tries": tries})
    if args.format == "csv":
        for line in manifest:
            out.emit(line)
        out.emit("p,partition,chi,c1_sq,c2,ratio_c,ratio_chi,good,tries")
        out.emit(
            f"{args.p},{_partition_text(parts)},{rep.chi},{rep.c1_sq},{rep.c2},"
            f"{_fr(rep.ratio_c)},{_fr(rep.ratio_chi)},{rep.good},"
            f"{'' if tries is None else tries}"
        )
    elif args.format == "json":
        import json

        doc = {
            "manifest": {"command": "invariants", "version": __version__,
                         "arrangement": args.arrangement, "p": args.p,
                         "partition": args.partition, "seed": args.seed,
                         "C": str(Fraction(args.C)), "tries": tries},
            "parts": [list(b) for b in parts],
            "chi": rep.chi,
            "c1_sq": rep.c1_sq,
            "c2": rep.c2,
            "ratio_c": _fr(rep.ratio_c),
            "ratio_chi": _fr(rep.ratio_chi),
            "good": rep.good,
            "bounds_ok": rep.bounds_ok,
        }
        out.emit(json.dumps(doc, indent=2, sort_keys=True))
    else:
        for line in manifest:
            out.emit(line)
        out.emit(f"p = {args.p}")
        out.emit(f"partition = {_partition_text(parts)}")
        if tries is not None:
            out.emit(f"sampler tries = {tries}")
        out.emit(f"chi   = {rep.chi}")
        out.emit(f"c1^2  = {rep.c1_sq}")
        out.emit(f"c2    = {rep.c2}")
        out.emit(
            f"c1^2/c2  = {_fr(rep.ratio_c)} "
            f"({covers.truncate_decimal(rep.ratio_c, 3)}...)"
        )
        out.emit(
            f"c1^2/chi = {_fr(rep.ratio_chi)} "
            f"({covers.truncate_decimal(rep.ratio_chi, 3)}...)"
        )
        out.emit(f"good = {rep.good}")
        out.emit(f"error bounds hold = {rep.bounds_ok}")
        if not rep.good:
            shown = ", ".join(
                f"{i}-{j}: q={q}" for (i, j), q in rep.goodness.offending[:6]
            )
            more = len(rep.goodness.offending) - 6
            out.emit(f"offending nodes: {shown}" + (f" (+{more} more)" if more > 0 else ""))
    out.finish()
    return EXIT_OK


# ---------------------------------------------------------------------------
# tables subcommand


def _cmd_tables(args) -> int:
    run = tables.run_table(args.which)
    out = _Output(args.out)
    out.emit(f"# table {run.name}: {run.title}")
    failures = 0
    for row in run.rows:
        status = "PASS" if row.ok else "FAIL"
        if not row.ok:
            failures += 1
        detail = " ".join(
            f"{key}={row.computed[key]}(expected {row.expected[key]})"
            if row.computed[key] != row.expected[key]
            else f"{key}={row.computed[key]}"
            for key in sorted(row.expected)
        )
        out.emit(
            f"row {row.index:2d} p={row.p} {status} "
            f"{_partition_text(row.parts)} {detail}"
        )
    out.emit(f"{'PASS' if failures == 0 else 'FAIL'}: {len(run.rows) - failures}/{len(run.rows)} rows match")
    out.finish()
    return EXIT_OK if failures == 0 else EXIT_TABLE_MISMATCH


# ---------------------------------------------------------------------------
# scan subcommand


def _parse_primes(text: str) -> list[int]:
    from .numth import primes_between

    primes: list[int] = []
    for chunk in text.split(","):
        chunk = chunk.strip()
        if not chunk:
            continue
        if "-" in chunk:
            lo_s, hi_s = chunk.split("-", 1)
            primes.extend(primes_between(int(lo_s), int(hi_s)))
        else:
            value = int(chunk)
            if not is_prime(value):
                raise ValidationError("p-prime", f"{value} is not prime")
            primes.append(value)
    if not primes:
        raise ValidationError("no-primes", "no primes given")
    return primes


def _cmd_scan(args) -> int:
    a = _load_arrangement(args.arrangement)
    primes = _parse_primes(args.primes)
    config = FareyConfig(args.C)
    result = covers.convergence_scan(
        a,
        primes,
        samples_per_prime=args.samples,
        seed=args.seed,
        config=config,
        max_tries=args.max_tries,
    )
    out = _Output(args.out)
    for line in _manifest_lines(args, "scan", {"log_ratio": _fr(result.log_ratio)}):
        out.emit(line)
    out.emit("p,sample,seed,tries,partition,chi,c1_sq,c2,ratio_c,ratio_chi,good")
    for s in result.samples:
        rep = s.report
        out.emit(
            f"{s.p},{s.index},{s.seed},{s.tries},{_partition_text(s.parts)},"
            f"{rep.chi},{rep.c1_sq},{rep.c2},{_fr(rep.ratio_c)},"
            f"{_fr(rep.ratio_chi)},{rep.good}"
        )
    out.finish()
    summary = []
    for s in result.summaries:
        summary.append(
            f"p={s.p} samples={s.samples} "
            f"min={covers.truncate_decimal(s.ratio_min, 3)} "
            f"median={covers.truncate_decimal(s.ratio_median, 3)} "
            f"max={covers.truncate_decimal(s.ratio_max, 3)} "
            f"|median-log|={covers.truncate_decimal(s.gap, 4)}"
        )
    for p, reason in result.skipped:
        summary.append(f"p={p} skipped: {reason}")
    if args.out:
        sys.stdout.write("\n".join(summary) + "\n")
    return EXIT_OK


# ---------------------------------------------------------------------------
# numth subcommand (debug surface over the exact kernels)


def _cmd_numth(args) -> int:
    op = args.op
    vals = args.values
    config = FareyConfig(args.C)

    def need(n):
        if len(vals) != n:
            raise ValidationError("bad-params", f"{op} takes {n} integer(s)")

    out = _Output(args.out)
    if op == "mod-inverse":
        need(2)
        out.emit(str(numth.mod_inverse(vals[0], vals[1])))
    elif op == "ncf":
        need(2)
        exp = numth.ncf_expand(vals[0], vals[1])
        out.emit(f"e = {list(exp.e)}")
        out.emit(f"b = {list(exp.b)}")
        out.emit(f"length = {exp.length}")
    elif op == "ncf-eval":
        value = numth.ncf_eval(vals)
        out.emit(_fr(value))
    elif op == "length":
        need(2)
        out.emit(str(numth.ncf_length(vals[0], vals[1])))
    elif op == "canonical":
        need(2)
        out.emit(_fr(numth.canonical_part(vals[0], vals[1])))
    elif op == "dedekind":
        need(2)
        q, p = vals
        fast = numth.dedekind_fast(q, p)
        chain = numth.dedekind_from_ncf(q, p)
        out.emit(f"fast  = {_fr(fast)}")
        out.emit(f"chain = {_fr(chain)}")
        if p <= 100_000:
            out.emit(f"brute = {_fr(numth.dedekind_brute(q, p))}")
    elif op == "rcf-total":
        need(2)
        out.emit(str(numth.rcf_total(vals[0], vals[1])))
    elif op == "farey":
        need(2)
        out.emit(str(numth.is_farey_neighbour(vals[0], vals[1], config)))
    else:
        raise ValidationError("bad-op", f"unknown numth operation {op!r}")
    out.finish()
    return EXIT_OK


# ---------------------------------------------------------------------------
# badset subcommand


def _cmd_badset(args) -> int:
    config = FareyConfig(args.C)
    members = bad_set(args.p, config)
    out = _Output(args.out)
    for line in _manifest_lines(args, "badset", {"count": len(members)}):
        out.emit(line)
    holds = badset_bound_holds(len(members), args.p, config)
    density = Fraction(len(members), args.p)
    out.emit(f"p = {args.p}")
    out.emit(f"|F| = {len(members)}")
    out.emit(f"bound C*sqrt(p)*(log p + 2 log 2) holds: {holds}")
    out.emit(f"density = {_fr(density)} ({covers.truncate_decimal(density, 4)}...)")
    if args.list:
        out.emit("members: " + " ".join(str(q) for q in sorted(members)))
    out.finish()
    return EXIT_OK


# ---------------------------------------------------------------------------
# parser


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="rootcovers",
        description="Exact Chern invariants of cyclic root covers of curve arrangements",
    )
    parser.add_argument("--version", action="version", version=__version__)
    sub = parser.add_subparsers(dest="cmd", required=True)

    pa = sub.add_parser("arrangement", help="generate, inspect, or validate arrangement files")
    pa_sub = pa.add_subparsers(dest="action", required=True)
    pg = pa_sub.add_parser("generate", help="write a built-in arrangement")
    pg.add_argument("kind", choices=sorted(_GENERATORS))
    pg.add_argument("params", nargs="*", type=int)
    pg.add_argument("--out", default=None)
    for action in ("info", "validate"):
        px = pa_sub.add_parser(action)
        px.add_argument("--arrangement", required=True)
        px.add_argument("--out", default=None)

    pi = sub.add_parser("invariants", help="exact invariants of one cover")
    pi.add_argument("--arrangement", required=True)
    pi.add_argument("--p", type=int, required=True)
    pi.add_argument("--partition", default=None, help="partition file")
    pi.add_argument("--seed", type=int, default=None, help="sample a good partition")
    pi.add_argument("--C", type=_parse_rational, default=Fraction(1))
    pi.add_argument("--max-tries", type=int, default=100)
    pi.add_argument("--format", choices=("table", "csv", "json"), default="table")
    pi.add_argument("--out", default=None)

    pt = sub.add_parser("tables", help="re-run a built-in reference table")
    pt.add_argument("which", choices=tables.TABLE_NAMES)
    pt.add_argument("--out", default=None)

    ps = sub.add_parser("scan", help="good-sample ratio scan across primes")
    ps.add_argument("--arrangement", required=True)
    ps.add_argument("--primes", required=True,
                    help="comma list; ranges like 80-110 take all primes inside")
    ps.add_argument("--samples", type=int, default=5)
    ps.add_argument("--seed", type=int, required=True)
    ps.add_argument("--C", type=_parse_rational, default=Fraction(1))
    ps.add_argument("--max-tries", type=int, default=200)
    ps.add_argument("--out", default=None)

    pb = sub.add_parser("badset", help="Farey bad-set statistics")
    pb.add_argument("--p", type=int, required=True)
    pb.add_argument("--C", type=_parse_rational, default=Fraction(1))
    pb.add_argument("--stats", action="store_true", default=True)
    pb.add_argument("--list", action="store_true")
    pb.add_argument("--out", default=None)

    pn = sub.add_parser("numth", help="debug access to the exact kernels")
    pn.add_argument(
        "op",
        choices=(
            "mod-inverse", "ncf", "ncf-eval", "length", "canonical",
            "dedekind", "rcf-total", "farey",
        ),
    )
    pn.add_argument("values", nargs="+", type=int)
    pn.add_argument("--C", type=_parse_rational, default=Fraction(1))
    pn.add_argument("--out", default=None)
    return parser


_HANDLERS = {
    "arrangement": _cmd_arrangement,
    "invariants": _cmd_invariants,
    "tables": _cmd_tables,
    "scan": _cmd_scan,
    "badset": _cmd_badset,
    "numth": _cmd_numth,
}


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return _HANDLERS[args.cmd](args)
    except BudgetError as exc:
        print(f"error (budget): {exc}", file=sys.stderr)
        return EXIT_BUDGET
    except ExhaustedTries as exc:
        print(f"error (sampling): {exc}", file=sys.stderr)
        return EXIT_EXHAUSTED
    except (ValidationError, EmptySolutionSetError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_VALIDATION
    except (RootCoversError, ValueError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_VALIDATION


if __name__ == "__main__":
    sys.exit(main())
