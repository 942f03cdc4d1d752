"""Invariant engine: exact chi, c1^2, c2, error terms, oracle, scans."""

import random
from fractions import Fraction

import pytest

from rootcovers import arrangements as ar
from rootcovers import covers as cv
from rootcovers import partitions as pt
from rootcovers.errors import BudgetError, NonIntegral
from rootcovers.numth import dedekind_fast, ncf_length, primes_between


def _cover(a, p, parts):
    ra = ar.resolve(a)
    sysd = pt.system_for(a, p)
    sol = pt.solution_from_parts(sysd, parts)
    ma = pt.assign(ra, sol)
    return cv.CoverSpec(p, ra, ma)


def _dual_hesse_cover(p, parts):
    return _cover(ar.gen_ceva(3), p, [parts])


def test_dual_hesse_flagship_row():
    spec = _dual_hesse_cover(61169, [1, 2, 3, 4, 5, 6, 7, 8, 61133])
    assert cv.chi(spec) == 181282
    assert cv.c1_sq(spec) == 1441949
    assert cv.c2(spec) == 733435


def test_dual_hesse_good_looking_row():
    spec = _dual_hesse_cover(61169, [1, 29, 89, 269, 1019, 3469, 7919, 15859, 32515])
    rep = cv.report(spec)
    assert rep.c1_sq == 1465970 and rep.c2 == 552166
    assert cv.truncate_decimal(rep.ratio_c, 3) == "2.654"
    assert rep.bounds_ok  # bounded error terms even though strictly not good
    assert not rep.good


def test_dual_hesse_degenerate_row():
    rep = cv.report(_dual_hesse_cover(61169, [1] * 8 + [61161]))
    assert rep.c1_sq == 1386413 and rep.c2 == 1060303
    assert not rep.good and not rep.bounds_ok


def test_small_prime_row():
    rep = cv.report(_dual_hesse_cover(83, [1, 2, 3, 5, 7, 11, 13, 17, 24]))
    assert cv.truncate_decimal(rep.ratio_chi, 3) == "7.331"
    assert cv.truncate_decimal(rep.ratio_c, 3) == "1.570"


def test_underline_ceva_example():
    blocks = [
        [1, 307, 7031, 11109, 42721],
        [589, 2007, 5007, 20001, 33565],
        [1009, 3001, 13003, 17807, 26349],
    ]
    rep = cv.report(_cover(ar.gen_underline_ceva(5), 61169, blocks))
    assert rep.c1_sq == 4341016
    assert rep.c2 == 1595264
    assert rep.ratio_c == Fraction(542627, 199408)


def test_noether_ties_the_three_routes():
    rep = cv.report(_dual_hesse_cover(61169, [1, 2, 3, 4, 5, 6, 7, 8, 61133]))
    assert 12 * rep.chi == rep.c1_sq + rep.c2
    terms = rep.error_terms
    assert terms.ccf == 12 * terms.scf + terms.lcf


def test_error_term_bounds_definition():
    # the three strict bounds, evaluated on a sampled good assignment
    dh = ar.gen_ceva(3)
    ra = ar.resolve(dh)
    sysd = pt.system_for(dh, 61169)
    good = pt.sample_good(sysd, ra, seed=11, max_tries=100)
    rep = cv.report(cv.CoverSpec(61169, ra, good.assignment))
    assert rep.good and rep.bounds_ok


def test_orientation_invariance():
    # reversing the divisor order inverts every node residue; the report
    # must not change
    dh = ar.gen_ceva(3)
    ra = ar.resolve(dh)
    sysd = pt.system_for(dh, 61169)
    sol = pt.solution_from_parts(sysd, [[1, 23, 45, 100, 1019, 3002, 16199, 20389, 20391]])
    ma = pt.assign(ra, sol)
    rep = cv.report(cv.CoverSpec(61169, ra, ma))

    flipped = ar.ResolvedArrangement(
        arrangement=ra.arrangement,
        surface=ra.surface,
        divisors=tuple(reversed(ra.divisors)),
        nodes={
            (ra.r - 1 - j, ra.r - 1 - i): count
            for (i, j), count in ra.nodes.items()
        },
        t2_total=ra.t2_total,
    )
    rep2 = cv.report(cv.CoverSpec(61169, flipped, ma))
    assert (rep.chi, rep.c1_sq, rep.c2) == (rep2.chi, rep2.c1_sq, rep2.c2)
    assert rep.error_terms == rep2.error_terms


@pytest.mark.parametrize("p", [101, 1009])
def test_example_closed_forms_general_lines(p):
    # weights (1, ..., 1, p - q) on r general lines admit closed forms for
    # chi and c2; the engine must reproduce them for every q, r
    for r in range(3, 9):
        lines = ar.gen_general_lines(r)
        rl = ar.resolve(lines)
        for q in range(1, r):
            nu = {f"L{i + 1}": 1 for i in range(r - 1)}
            nu[f"L{r}"] = p - q
            spec = cv.CoverSpec(p, rl, pt.MultiplicityAssignment(p, nu))
            terms = cv._error_terms(spec)
            chi_closed = (
                p
                - Fraction((p * p - 1) * r, 12 * p)
                - Fraction((p - 1) * r * (5 - r), 8)
                + Fraction((r - 1) * (r - 2) * (p - 1) * (p - 2), 24 * p)
                + (r - 1) * dedekind_fast(p - q, p)
            )
            assert cv._chi_value(spec, terms) == chi_closed
            c2_closed = (
                3 * p
                + Fraction((1 - p) * r * (5 - r), 2)
                + Fraction((r - 1) * (r - 2) * (p - 1), 2)
                + (r - 1) * ncf_length(q, p)
            )
            assert cv._c2_from_terms(spec, terms) == c2_closed
            if q == r - 1:  # the honest cover case: all integral
                assert 12 * cv.chi(spec) == cv.c1_sq(spec) + cv.c2(spec)


def test_integrality_randomized():
    rnd = random.Random(99)
    arrangements = [
        ar.gen_general_lines(3),
        ar.gen_general_lines(4),
        ar.gen_ceva(2),
        ar.gen_ceva(3),
    ]
    primes = [p for p in primes_between(5, 200)]
    for _ in range(120):
        a = rnd.choice(arrangements)
        p = rnd.choice(primes)
        ra = ar.resolve(a)
        sysd = pt.system_for(a, p)
        if pt.count_solutions(sysd) == 0:
            continue
        sol = pt.sample_uniform(sysd, rnd.randrange(1 << 30))
        try:
            ma = pt.assign(ra, sol)
        except Exception:
            continue
        rep = cv.report(cv.CoverSpec(p, ra, ma))
        assert 12 * rep.chi == rep.c1_sq + rep.c2


def test_nonintegral_signals_bug_for_invalid_nu():
    # multiplicities that solve no block system break integrality; the
    # engine flags that instead of rounding
    tri = ar.gen_general_lines(3)
    rt = ar.resolve(tri)
    ma = pt.MultiplicityAssignment(7, {"L1": 1, "L2": 2, "L3": 3})
    spec = cv.CoverSpec(7, rt, ma)
    with pytest.raises(NonIntegral):
        cv.chi(spec)


def test_floor_sum_identities():
    # sum i [a i / p] in closed form through S(a, a; p); the S term carries
    # a plus sign (expand sum (a i - [a i/p] p)^2 to see it)
    for p in (7, 13, 101):
        for a in (1, 2, 3, 5):
            lhs = cv.weighted_floor_sum(a, p)
            rhs = Fraction((a * a - 1) * (p - 1) * (2 * p - 1), 12 * a) + Fraction(
                p * cv.floor_sum_S(a, a, p), 2 * a
            )
            assert lhs == rhs


def test_floor_sum_combination_identity():
    # -(a/b) S(b,b) - (b/a) S(a,a) + 2 S(a,b) recovers the Dedekind sum of
    # the twisted residue a' b
    for p in (11, 61):
        for a in range(1, 7):
            for b in range(1, 7):
                comb_val = (
                    -Fraction(a, b) * cv.floor_sum_S(b, b, p)
                    - Fraction(b, a) * cv.floor_sum_S(a, a, p)
                    + 2 * cv.floor_sum_S(a, b, p)
                )
                closed = Fraction(
                    (1 - p)
                    * (a * a * (2 * p - 1) + b * b * (2 * p - 1) - 3 * a * b * p),
                    6 * a * b * p,
                )
                s_ab = dedekind_fast(pow(a, -1, p) * b % p, p)
                assert comb_val == closed + 2 * s_ab, (a, b, p)


def test_floor_sum_oracle_matches_engine():
    rnd = random.Random(5)
    for a in (ar.gen_general_lines(3), ar.gen_general_lines(4)):
        ra = ar.resolve(a)
        for p in (7, 31, 101):
            sysd = pt.system_for(a, p)
            for _ in range(5):
                sol = pt.sample_uniform(sysd, rnd.randrange(1 << 30))
                ma = pt.assign(ra, sol)
                spec = cv.CoverSpec(p, ra, ma)
                chi_o, scf_o = cv.floor_sum_oracle(spec)
                assert chi_o == cv.chi(spec)
                assert scf_o == cv._error_terms(spec).scf


def test_floor_sum_oracle_invalid_nu_rational():
    tri = ar.gen_general_lines(3)
    rt = ar.resolve(tri)
    ma = pt.MultiplicityAssignment(7, {"L1": 1, "L2": 2, "L3": 3})
    spec = cv.CoverSpec(7, rt, ma)
    chi_o, scf_o = cv.floor_sum_oracle(spec)
    terms = cv._error_terms(spec)
    assert chi_o == cv._chi_value(spec, terms) == Fraction(5, 7)
    assert scf_o == terms.scf


def test_floor_sum_oracle_budget():
    spec = _dual_hesse_cover(61169, [1, 2, 3, 4, 5, 6, 7, 8, 61133])
    with pytest.raises(BudgetError):
        cv.floor_sum_oracle(spec)


def test_leading_term_scaling():
    # c1^2/p and c2/p approach the log Chern numbers (24, 9) along the
    # biggest published row
    p = 544109
    spec = _dual_hesse_cover(
        p, [1, 1709, 3539, 7639, 15629, 31649, 62219, 150559, 271165]
    )
    rep = cv.report(spec)
    assert abs(Fraction(rep.c1_sq, p) - 24) < Fraction(24, 100)
    assert abs(Fraction(rep.c2, p) - 9) < Fraction(9, 100)


def test_weighted_block_cover_end_to_end():
    # hand-written divisible arrangement: one conic (u = 2) and four lines
    # in general position on the plane; exercises non-unit weights all the
    # way through sampling, assignment, and the invariants
    conic = ar.CurveDecl("Q", 0, 4, 1, 2)
    lines = [ar.CurveDecl(f"L{i}", 0, 1, 1, 1) for i in range(1, 5)]
    points = []
    for i in range(1, 5):
        points.append(ar.PointDecl(("Q", f"L{i}")))
        points.append(ar.PointDecl(("Q", f"L{i}")))
    for i in range(1, 5):
        for j in range(i + 1, 5):
            points.append(ar.PointDecl((f"L{i}", f"L{j}")))
    a = ar.Arrangement(ar.P2, 1, (conic, *lines), tuple(points))
    assert ar.validate(a).t == {2: 14}
    assert ar.log_chern_direct(a) == ar.log_chern_resolved(ar.resolve(a))

    ra = ar.resolve(a)
    for p in (101, 977):
        sysd = pt.system_for(a, p)
        assert sysd.blocks[0].u == (2, 1, 1, 1, 1)
        for seed in range(5):
            sol = pt.sample_uniform(sysd, seed)
            pt.validate_solution(sysd, sol)
            rep = cv.report(cv.CoverSpec(p, ra, pt.assign(ra, sol)))
            assert 12 * rep.chi == rep.c1_sq + rep.c2
            chi_o, scf_o = cv.floor_sum_oracle(cv.CoverSpec(p, ra, pt.assign(ra, sol)))
            assert chi_o == rep.chi
            assert scf_o == rep.error_terms.scf


def test_convergence_scan_small():
    dh = ar.gen_ceva(3)
    result = cv.convergence_scan(dh, [61169], samples_per_prime=3, seed=5)
    assert result.log_ratio == Fraction(8, 3)
    assert len(result.summaries) == 1
    s = result.summaries[0]
    assert s.samples == 3
    assert s.ratio_min <= s.ratio_median <= s.ratio_max
    assert abs(s.ratio_median - Fraction(8, 3)) < Fraction(1, 10)
    # deterministic
    again = cv.convergence_scan(dh, [61169], samples_per_prime=3, seed=5)
    assert again.summaries == result.summaries


def test_convergence_scan_skips_exhausted_primes():
    dh = ar.gen_ceva(3)
    result = cv.convergence_scan(dh, [17, 61169], samples_per_prime=2, seed=5, max_tries=5)
    assert result.skipped and result.skipped[0][0] == 17
    assert [s.p for s in result.summaries] == [61169]


def test_convergence_scan_rejects_degenerate():
    with pytest.raises(ValueError):
        cv.convergence_scan(ar.gen_general_lines(3), [61169], 1, seed=1)


def test_truncate_decimal():
    assert cv.truncate_decimal(Fraction(1441949, 733435), 3) == "1.966"
    assert cv.truncate_decimal(Fraction(542627, 199408), 5) == "2.72118"
    assert cv.truncate_decimal(Fraction(8, 3), 3) == "2.666"
    assert cv.truncate_decimal(Fraction(-8, 3), 2) == "-2.66"
    assert cv.truncate_decimal(Fraction(5), 3) == "5.000"
