#!/usr/bin/env python3
"""From a partition of a prime to the exact Chern numbers of a cover.

The dual Hesse arrangement has nine lines in one block, so a degree-61169
cover needs a nine-part partition of 61169.  Each partition induces
multiplicities on the 21 divisors of the log resolution; the node residues
p - nu_i' nu_j then drive three exact invariants, tied by Noether's
relation 12 chi = c1^2 + c2.
"""

from rootcovers import arrangements as ar, covers as cv, partitions as pt

p = 61169
dh = ar.gen_ceva(3)
ra = ar.resolve(dh)
sysd = pt.system_for(dh, p)

print(f"solutions of the block system at p={p}: {pt.count_solutions(sysd)}")
print()

rows = {
    "arithmetic-looking": [1, 2, 3, 4, 5, 6, 7, 8, 61133],
    "random-looking": [1, 29, 89, 269, 1019, 3469, 7919, 15859, 32515],
    "nearly constant": [6790, 6791, 6792, 6793, 6794, 6795, 6796, 6797, 6821],
    "all ones": [1, 1, 1, 1, 1, 1, 1, 1, 61161],
}
for label, parts in rows.items():
    sol = pt.solution_from_parts(sysd, [parts])
    rep = cv.report(cv.CoverSpec(p, ra, pt.assign(ra, sol)))
    assert 12 * rep.chi == rep.c1_sq + rep.c2
    print(
        f"{label:20s} c1^2={rep.c1_sq}  c2={rep.c2}  "
        f"ratio={cv.truncate_decimal(rep.ratio_c, 3)}...  "
        f"bounded error terms: {rep.bounds_ok}"
    )

print()
print("the log Chern ratio of the arrangement is 8/3 = 2.666...; only the")
print("random-looking rows get close, and structured rows fall well short.")
print()

print("== sampling competitively random partitions ==")
good = pt.sample_good(sysd, ra, seed=42, max_tries=100)
parts = [good.solution.mu[c.id] for c in dh.curves]
rep = cv.report(cv.CoverSpec(p, ra, good.assignment))
print(f"seed 42 found a good partition after {good.tries} tries:")
print("  " + " + ".join(str(x) for x in parts) + f" = {p}")
print(
    f"  c1^2={rep.c1_sq}  c2={rep.c2}  ratio={cv.truncate_decimal(rep.ratio_c, 3)}..."
)
assert rep.good

print()
print("== why strict goodness is conservative ==")
sol = pt.solution_from_parts(sysd, [rows["random-looking"]])
goodness = pt.is_good(ra, pt.assign(ra, sol))
pair, q = goodness.offending[0]
print(f"the random-looking row is rejected: node {pair} has residue {q},")
print(f"and {q} sits within sqrt(p) of p itself (1+29+89 = 119 <= 247).")
print("its error terms are still bounded; the filter only certifies, never")
print("forgives.")
