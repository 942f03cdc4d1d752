"""Counting, exact-uniform sampling, multiplicities, goodness."""

import random
from fractions import Fraction
from itertools import product
from math import comb, gcd

import pytest

from rootcovers import arrangements as ar
from rootcovers import partitions as pt
from rootcovers.errors import (
    BudgetError,
    EmptySolutionSetError,
    ExceptionalVanishes,
    ExhaustedTries,
    FileFormatError,
    ValidationError,
)
from rootcovers.numth import primes_between


def _ones_system(p, k):
    return pt.DiophSystem(p, (pt.DiophBlock(tuple(f"c{i}" for i in range(k)), (1,) * k),))


def _brute_count(u, p):
    # pruned depth-first enumeration; shares no code with the suffix tables
    if len(u) == 1:
        return 1 if p >= u[0] and p % u[0] == 0 else 0
    return sum(
        _brute_count(u[1:], p - u[0] * x) for x in range(1, p // u[0] + 1)
    )


def test_count_stars_and_bars():
    assert pt.count_solutions(_ones_system(7, 3)) == comb(6, 2) == 15
    assert pt.count_solutions(_ones_system(61169, 9)) == comb(61168, 8)


def test_count_weighted_example():
    sys2 = pt.DiophSystem(5, (pt.DiophBlock(("a", "b"), (1, 2)),))
    assert pt.count_solutions(sys2) == 2  # (1,2) and (3,1)


def test_count_multi_block_product():
    block = pt.DiophBlock(("a", "b", "c"), (1, 1, 1))
    sys3 = pt.DiophSystem(
        11, (block, pt.DiophBlock(("d", "e", "f"), (1, 2, 3)),)
    )
    expected = comb(10, 2) * _brute_count((1, 2, 3), 11)
    assert pt.count_solutions(sys3) == expected


def test_count_vs_brute_enumeration():
    checked = 0
    for p in primes_between(3, 60):
        for d in (3, 4):
            for u in product((1, 2, 3), repeat=d):
                g = 0
                for w in u:
                    g = gcd(g, w)
                if g != 1:
                    continue
                block = pt.DiophBlock(tuple(f"x{i}" for i in range(d)), u)
                sysd = pt.DiophSystem(p, (block,))
                assert pt.count_solutions(sysd) == _brute_count(u, p), (p, u)
                checked += 1
    assert checked > 1000


def test_count_asymptotic_leading_term():
    # count * (d-1)! * prod(u) / p^(d-1) tends to 1
    u = (1, 2, 3)
    last = None
    for p in (1009, 10007, 100003):
        sysd = pt.DiophSystem(p, (pt.DiophBlock(("a", "b", "c"), u),))
        count = pt.count_solutions(sysd)
        scaled = Fraction(count * 2 * 6, p ** 2)
        err = abs(scaled - 1)
        if last is not None:
            assert err < last
        last = err
    assert last < Fraction(1, 100)


def test_count_budget_error():
    sysd = pt.DiophSystem(10007, (pt.DiophBlock(("a", "b", "c"), (1, 2, 3)),))
    with pytest.raises(BudgetError):
        pt.count_solutions(sysd, cell_budget=1000)


def test_sampling_membership_and_determinism():
    sysd = _ones_system(7, 3)
    seen = set()
    for seed in range(40):
        sol = pt.sample_uniform(sysd, seed)
        pt.validate_solution(sysd, sol)
        seen.add(tuple(sol.mu.values()))
    assert pt.sample_uniform(sysd, 5) == pt.sample_uniform(sysd, 5)
    assert len(seen) > 5


def test_sampling_weighted_membership():
    block = pt.DiophBlock(("a", "b", "c"), (1, 2, 3))
    sysd = pt.DiophSystem(61, (block,))
    for seed in range(25):
        sol = pt.sample_uniform(sysd, seed)
        pt.validate_solution(sysd, sol)


def test_sampling_three_blocks_big_prime():
    a = ar.gen_underline_ceva(5)
    sysd = pt.system_for(a, 61169)
    sol = pt.sample_uniform(sysd, 99)
    pt.validate_solution(sysd, sol)
    assert len(sol.mu) == 15


def test_sampling_empty_set():
    sysd = _ones_system(3, 5)  # 5 positive parts cannot sum to 3
    with pytest.raises(EmptySolutionSetError):
        pt.sample_uniform(sysd, 1)


def _chi_square_uniform(counts, draws, n_outcomes):
    expected = draws / n_outcomes
    return sum((c - expected) ** 2 / expected for c in counts.values())


def test_exact_uniformity_chi_square_ones():
    # p = 13, three unit weights: 66 outcomes, 66_000 draws, alpha = 1e-3
    from scipy.stats import chi2

    sysd = _ones_system(13, 3)
    outcomes = [
        (a, b, 13 - a - b)
        for a in range(1, 12)
        for b in range(1, 12)
        if 13 - a - b >= 1
    ]
    assert len(outcomes) == 66 == pt.count_solutions(sysd)
    rng = random.Random(17)
    counts = {o: 0 for o in outcomes}
    for _ in range(66_000):
        sol = pt._sample(sysd, rng, pt.DEFAULT_CELL_BUDGET)
        counts[tuple(sol.mu.values())] += 1
    stat = _chi_square_uniform(counts, 66_000, 66)
    assert stat <= chi2.ppf(1 - 1e-3, 65)


def test_exact_uniformity_chi_square_weighted():
    # force the dynamic-programming path through a non-unit weight vector
    from scipy.stats import chi2

    block = pt.DiophBlock(("a", "b", "c"), (1, 2, 1))
    sysd = pt.DiophSystem(13, (block,))
    count = pt.count_solutions(sysd)
    solutions = [
        x
        for x in product(range(1, 13), repeat=3)
        if x[0] + 2 * x[1] + x[2] == 13
    ]
    assert len(solutions) == count
    draws = 1000 * count
    rng = random.Random(4321)
    counts = {s: 0 for s in solutions}
    for _ in range(draws):
        sol = pt._sample(sysd, rng, pt.DEFAULT_CELL_BUDGET)
        counts[tuple(sol.mu.values())] += 1
    stat = _chi_square_uniform(counts, draws, count)
    assert stat <= chi2.ppf(1 - 1e-3, count - 1)


def test_assign_dual_hesse_example():
    dh = ar.gen_ceva(3)
    ra = ar.resolve(dh)
    sysd = pt.system_for(dh, 61169)
    sol = pt.solution_from_parts(sysd, [[1, 2, 3, 4, 5, 6, 7, 8, 61133]])
    ma = pt.assign(ra, sol)
    heavy = [p_ for p_ in dh.points if len(p_.curves) >= 3]
    for k, point in enumerate(heavy):
        if set(point.curves) == {"A0", "A1", "A2"}:
            assert ma.nu[f"E{k + 1}"] == 6
            break
    else:
        pytest.fail("pencil point not found")
    for div in ra.divisors:
        assert 0 < ma.nu[div.id] < 61169


def test_assign_exceptional_vanishes():
    dh = ar.gen_ceva(3)
    ra = ar.resolve(dh)
    # a pencil of parts summing to exactly p kills its blow-up divisor
    parts = {c.id: 1 for c in dh.curves}
    parts["A0"], parts["A1"], parts["A2"] = 1, 2, 10  # 13 = p
    sol = pt.PartitionSolution(13, parts)
    with pytest.raises(ExceptionalVanishes):
        pt.assign(ra, sol)


def test_assign_triangle_identity():
    tri = ar.gen_general_lines(3)
    ra = ar.resolve(tri)
    sysd = pt.system_for(tri, 11)
    sol = pt.solution_from_parts(sysd, [[2, 4, 5]])
    ma = pt.assign(ra, sol)
    assert ma.nu == sol.mu


def test_node_residue_examples():
    tri = ar.gen_general_lines(3)
    ra = ar.resolve(tri)
    ma = pt.MultiplicityAssignment(7, {"L1": 2, "L2": 3, "L3": 1})
    residues = {n.pair: n.q for n in pt.node_residues(ra, ma)}
    # nu_i = nu_j = 1 would give p - 1; here (2,3): 2' = 4, 4*3 = 12 = 5, q = 2
    assert residues[("L1", "L2")] == 2
    # orientation swap gives the modular inverse
    q = residues[("L1", "L2")]
    qt = 7 - pow(3, -1, 7) * 2 % 7
    assert qt == 4 and q * qt % 7 == 1


def test_node_residues_all_ones():
    tri = ar.gen_general_lines(4)
    ra = ar.resolve(tri)
    ma = pt.MultiplicityAssignment(11, {f"L{i}": 1 for i in range(1, 5)})
    for node in pt.node_residues(ra, ma):
        assert node.q == 10  # p - 1


def test_goodness_table_partitions():
    dh = ar.gen_ceva(3)
    ra = ar.resolve(dh)
    sysd = pt.system_for(dh, 61169)
    # 1 + 29 + 89 = 119 <= sqrt(61169): the first pencil sum parks a node
    # residue within the d = 1 neighbourhood of p, so the strict filter
    # rejects even this random-looking row.
    sol = pt.solution_from_parts(
        sysd, [[1, 29, 89, 269, 1019, 3469, 7919, 15859, 32515]]
    )
    rep = pt.is_good(ra, pt.assign(ra, sol))
    assert not rep.good
    assert any(q == 61169 - 119 for _, q in rep.offending)
    # the all-but-one-trivial partition is far from good
    sol = pt.solution_from_parts(sysd, [[1] * 8 + [61161]])
    rep = pt.is_good(ra, pt.assign(ra, sol))
    assert not rep.good
    assert len(rep.offending) > 10


def test_goodness_tiny_p_everything_bad():
    tri = ar.gen_general_lines(3)
    ra = ar.resolve(tri)
    sysd = pt.system_for(tri, 7)
    sol = pt.solution_from_parts(sysd, [[1, 2, 4]])
    rep = pt.is_good(ra, pt.assign(ra, sol))
    assert not rep.good  # at p = 7 the bad set covers every residue


def test_sample_good_succeeds_at_large_p():
    dh = ar.gen_ceva(3)
    ra = ar.resolve(dh)
    sysd = pt.system_for(dh, 61169)
    good = pt.sample_good(sysd, ra, seed=7, max_tries=100)
    assert 1 <= good.tries <= 100
    assert pt.is_good(ra, good.assignment).good
    pt.validate_solution(sysd, good.solution)
    # determinism
    again = pt.sample_good(sysd, ra, seed=7, max_tries=100)
    assert again.solution == good.solution and again.tries == good.tries


def test_sample_good_exhausts_at_tiny_p():
    tri = ar.gen_general_lines(3)
    ra = ar.resolve(tri)
    sysd = pt.system_for(tri, 17)
    with pytest.raises(ExhaustedTries):
        pt.sample_good(sysd, ra, seed=1, max_tries=8)


def test_empirical_bad_fraction_envelope():
    # union-bound envelope: 10 sqrt(p) log(4p) C(d+k, 2) / p, against the
    # observed bad fraction over 200 uniform draws (statistical, seeded)
    import math

    dh = ar.gen_ceva(3)
    ra = ar.resolve(dh)
    n_pairs = comb(9 + 12, 2)
    for p in (1009, 10103, 61169):
        sysd = pt.system_for(dh, p)
        rng = random.Random(2024)
        bad = 0
        for _ in range(200):
            sol = pt._sample(sysd, rng, pt.DEFAULT_CELL_BUDGET)
            try:
                ma = pt.assign(ra, sol)
            except ExceptionalVanishes:
                bad += 1
                continue
            if not pt.is_good(ra, ma).good:
                bad += 1
        fraction = Fraction(bad, 200)
        envelope = 10 * math.sqrt(p) * math.log(4 * p) * n_pairs / p
        assert float(fraction) <= envelope


def test_partition_file_round_trip():
    dh = ar.gen_ceva(3)
    sysd = pt.system_for(dh, 61169)
    sol = pt.solution_from_parts(sysd, [[1, 2, 3, 4, 5, 6, 7, 8, 61133]])
    text = pt.solution_to_text(sysd, sol)
    assert pt.solution_from_text(sysd, text) == sol
    assert text == "p 61169\nblock 1 2 3 4 5 6 7 8 61133\n"


def test_partition_file_errors():
    dh = ar.gen_ceva(3)
    sysd = pt.system_for(dh, 61169)
    with pytest.raises(FileFormatError):
        pt.solution_from_text(sysd, "block 1 2 3\n")  # missing p
    with pytest.raises(FileFormatError) as err:
        pt.solution_from_text(sysd, "p 61169\nblock 1 2 x\n")
    assert "line 2" in str(err.value)
    with pytest.raises(ValidationError):
        pt.solution_from_text(sysd, "p 13\nblock 1 2 3 4 5 6 7 8 9\n")
    with pytest.raises(ValidationError):  # wrong sum
        pt.solution_from_text(sysd, "p 61169\nblock 1 2 3 4 5 6 7 8 9\n")


def test_solution_validation_errors():
    sysd = _ones_system(7, 3)
    with pytest.raises(ValidationError):
        pt.solution_from_parts(sysd, [[1, 2, 3]])  # sums to 6
    with pytest.raises(ValidationError):
        pt.solution_from_parts(sysd, [[1, 2], [4]])  # wrong shapes
    with pytest.raises(ValidationError):
        pt.PartitionSolution(7, {"a": 0})
    with pytest.raises(ValidationError):
        pt.PartitionSolution(7, {"a": 7})
