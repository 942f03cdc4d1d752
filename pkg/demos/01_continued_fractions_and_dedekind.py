#!/usr/bin/env python3
"""Tour of the exact kernels: continued fractions and Dedekind sums.

Every quantity here is an exact integer or fraction; nothing is floated.
"""

from fractions import Fraction

from rootcovers import numth as nt

print("== negative-regular continued fractions ==")
for q, p in ((3, 5), (5, 7), (4, 5), (1, 7)):
    exp = nt.ncf_expand(q, p)
    print(f"{p}/{q} = {list(exp.e)}   remainder chain {list(exp.b)}")
    assert nt.ncf_eval(exp.e) == Fraction(p, q)

print()
print("p/(p-1) is all 2's, the longest possible expansion:")
print(f"  17/16 -> {list(nt.ncf_expand(16, 17).e)}")

print()
print("reversing the expansion inverts the residue mod p:")
q, p = 5, 7
q2 = nt.mod_inverse(q, p)
print(f"  7/5 = {list(nt.ncf_expand(q, p).e)},  7/{q2} = {list(nt.ncf_expand(q2, p).e)}")

print()
print("== Dedekind sums, three independent ways ==")
for q, p in ((1, 5), (5, 7), (60000, 61169)):
    brute = nt.dedekind_brute(q, p)
    fast = nt.dedekind_fast(q, p)
    chain = nt.dedekind_from_ncf(q, p)
    assert brute == fast == chain
    print(f"  s({q}, {p}) = {fast}")

print()
print("the closed form s(1, p) = (p-1)(p-2)/12p:")
p = 61169
print(f"  s(1, {p}) = {nt.dedekind_fast(1, p)}")

print()
print("symmetries: s(p-q) = -s(q), s(q') = s(q)")
p = 139
for q in (2, 17, 100):
    s = nt.dedekind_fast(q, p)
    assert nt.dedekind_fast(p - q, p) == -s
    assert nt.dedekind_fast(nt.mod_inverse(q, p), p) == s
    print(f"  q={q}: s = {s}")

print()
print("== the defining identity tying s, the quotients, and the length ==")
print("12 s(q,p) - sum(e_i) + 3 l(q,p) = (q + q')/p")
p = 1009
for q in (2, 123, 1008):
    exp = nt.ncf_expand(q, p)
    q2 = nt.mod_inverse(q, p)
    lhs = 12 * nt.dedekind_fast(q, p) - sum(exp.e) + 3 * exp.length
    print(f"  q={q}: {lhs} == {Fraction(q + q2, p)}")
    assert lhs == Fraction(q + q2, p)
