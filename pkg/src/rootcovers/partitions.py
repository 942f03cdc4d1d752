"""Weighted partitions of a prime and the multiplicities they induce.

A divisible arrangement turns into one linear equation per block,

    u_1 mu_1 + ... + u_k mu_k = p,        mu_i >= 1,

and a solution assigns multiplicities to every divisor of the log
resolution: proper transforms inherit their mu, each blow-up divisor gets
the sum of the mu over its point, reduced mod p into (0, p).  Sampling is
exactly uniform over all positive solutions (sequential conditional
sampling against suffix counts), and a solution is "good" when none of its
node residues p - nu_i' nu_j falls in the Farey bad set.
"""

from __future__ import annotations

import random
from dataclasses import dataclass
from functools import lru_cache
from math import comb, gcd

from .arrangements import Arrangement, ResolvedArrangement
from .errors import (
    BudgetError,
    EmptySolutionSetError,
    ExceptionalVanishes,
    ExhaustedTries,
    FileFormatError,
    ValidationError,
)
from .numth import DEFAULT_FAREY, FareyConfig, is_farey_neighbour, is_prime

__all__ = [
    "DiophBlock",
    "DiophSystem",
    "PartitionSolution",
    "MultiplicityAssignment",
    "NodeResidue",
    "GoodnessReport",
    "GoodSample",
    "system_for",
    "count_solutions",
    "sample_uniform",
    "validate_solution",
    "solution_from_parts",
    "assign",
    "node_residues",
    "is_good",
    "sample_good",
    "solution_to_text",
    "solution_from_text",
]

DEFAULT_CELL_BUDGET = 50_000_000


@dataclass(frozen=True)
class DiophBlock:
    curve_ids: tuple[str, ...]
    u: tuple[int, ...]

    def __post_init__(self):
        if len(self.curve_ids) != len(self.u):
            raise ValidationError("block-shape", "curve ids and u lengths differ")
        if any(w < 1 for w in self.u):
            raise ValidationError("block-u", "u weights must be positive")
        g = 0
        for w in self.u:
            g = gcd(g, w)
        if g != 1:
            raise ValidationError("block-gcd", f"block u-gcd is {g}, must be 1")


@dataclass(frozen=True)
class DiophSystem:
    p: int
    blocks: tuple[DiophBlock, ...]

    def __post_init__(self):
        if not is_prime(self.p):
            raise ValidationError("p-prime", f"target {self.p} is not prime")
        if not self.blocks:
            raise ValidationError("no-blocks", "system has no blocks")


def system_for(a: Arrangement, p: int) -> DiophSystem:
    """One equation per block, curves in arrangement order."""
    blocks = []
    for b in range(1, a.blocks + 1):
        members = a.block_members(b)
        blocks.append(
            DiophBlock(
                tuple(c.id for c in members), tuple(c.u for c in members)
            )
        )
    return DiophSystem(p, tuple(blocks))


# ---------------------------------------------------------------------------
# Exact counting


@lru_cache(maxsize=32)
def _suffix_counts(u: tuple[int, ...], target: int) -> tuple[tuple[int, ...], ...]:
    """S[j][t] = number of positive solutions of u_j x_j + ... + u_k x_k = t.

    Built back to front with S[j][t] = S[j+1][t - u_j] + S[j][t - u_j]
    (take x_j = 1, or reduce x_j by one).
    """
    k = len(u)
    levels: list[tuple[int, ...]] = [()] * k
    nxt: list[int] = []
    for j in range(k - 1, -1, -1):
        w = u[j]
        cur = [0] * (target + 1)
        if j == k - 1:
            for t in range(w, target + 1, w):
                cur[t] = 1
        else:
            for t in range(w, target + 1):
                cur[t] = cur[t - w] + nxt[t - w]
        levels[j] = tuple(cur)
        nxt = cur
    return tuple(levels)


def _block_count(block: DiophBlock, p: int, cell_budget: int) -> int:
    k = len(block.u)
    if p < sum(block.u):
        return 0
    if all(w == 1 for w in block.u):
        return comb(p - 1, k - 1)
    if k * (p + 1) > cell_budget:
        raise BudgetError(
            f"suffix table of {k}x{p + 1} cells exceeds the budget {cell_budget}"
        )
    return _suffix_counts(block.u, p)[0][p]


def count_solutions(sys: DiophSystem, cell_budget: int = DEFAULT_CELL_BUDGET) -> int:
    """Exact number of positive solutions (product over blocks).

    All-ones blocks use the closed form C(p-1, k-1); general weights go
    through the suffix-count dynamic program, whose table size is checked
    against `cell_budget`.
    """
    total = 1
    for block in sys.blocks:
        total *= _block_count(block, sys.p, cell_budget)
    return total


# ---------------------------------------------------------------------------
# Exact-uniform sampling


def _sample_ones_block(k: int, target: int, rng: random.Random) -> list[int]:
    """Uniform positive composition of `target` into k parts.

    Sequential sampling: mu_1 is drawn from its exact marginal
    P(mu_1 = M) = C(target - M - 1, k - 2)/C(target - 1, k - 1) by
    bisecting the closed-form prefix sums, then recurse on the remainder.
    """
    parts = []
    rem = target
    for left in range(k, 1, -1):
        total = comb(rem - 1, left - 1)
        r = rng.randrange(total)
        # prefix(M) = number of solutions with mu <= M
        #           = C(rem-1, left-1) - C(rem-M-1, left-1)
        lo, hi = 1, rem - (left - 1)
        while lo < hi:
            mid = (lo + hi) // 2
            if total - comb(rem - mid - 1, left - 1) > r:
                hi = mid
            else:
                lo = mid + 1
        parts.append(lo)
        rem -= lo
    parts.append(rem)
    return parts


def _sample_dp_block(
    u: tuple[int, ...], target: int, rng: random.Random, cell_budget: int
) -> list[int]:
    """Uniform solution of a general weighted block via suffix counts."""
    k = len(u)
    if k * (target + 1) > cell_budget:
        raise BudgetError(
            f"suffix table of {k}x{target + 1} cells exceeds the budget {cell_budget}"
        )
    S = _suffix_counts(u, target)
    if S[0][target] == 0:
        raise EmptySolutionSetError(f"no positive solution of {u} . mu = {target}")
    parts = []
    rem = target
    for j in range(k - 1):
        r = rng.randrange(S[j][rem])
        acc = 0
        mu = 0
        while True:
            mu += 1
            t = rem - u[j] * mu
            if t < 0:
                raise AssertionError("ran past the support; counts inconsistent")
            acc += S[j + 1][t]
            if acc > r:
                break
        parts.append(mu)
        rem -= u[j] * mu
    if rem % u[-1] or rem < u[-1]:
        raise AssertionError("remainder not attainable; counts inconsistent")
    parts.append(rem // u[-1])
    return parts


@dataclass(frozen=True)
class PartitionSolution:
    """mu weights per curve id; per-block sums are checked by the samplers
    and by validate_solution, not here (tests build raw assignments too)."""

    p: int
    mu: dict[str, int]

    def __post_init__(self):
        for cid, value in self.mu.items():
            if not 0 < value < self.p:
                raise ValidationError(
                    "mu-range", f"mu[{cid}] = {value} is outside (0, {self.p})"
                )

    def block_values(self, block: DiophBlock) -> list[int]:
        return [self.mu[cid] for cid in block.curve_ids]


def validate_solution(sys: DiophSystem, sol: PartitionSolution) -> None:
    """Check that sol solves every block equation of sys exactly."""
    if sol.p != sys.p:
        raise ValidationError("p-mismatch", f"solution p={sol.p}, system p={sys.p}")
    seen = set()
    for bi, block in enumerate(sys.blocks, start=1):
        for cid in block.curve_ids:
            if cid not in sol.mu:
                raise ValidationError("mu-missing", f"no mu for curve {cid!r}")
            seen.add(cid)
        total = sum(w * sol.mu[cid] for w, cid in zip(block.u, block.curve_ids))
        if total != sys.p:
            raise ValidationError(
                "block-sum", f"block {bi} weighted sum is {total}, expected {sys.p}"
            )
    extra = set(sol.mu) - seen
    if extra:
        raise ValidationError("mu-extra", f"solution names unknown curves {sorted(extra)}")


def solution_from_parts(sys: DiophSystem, parts_per_block) -> PartitionSolution:
    """Build and validate a solution from explicit per-block part lists."""
    mu: dict[str, int] = {}
    if len(parts_per_block) != len(sys.blocks):
        raise ValidationError(
            "block-count",
            f"got {len(parts_per_block)} part lists for {len(sys.blocks)} blocks",
        )
    for block, parts in zip(sys.blocks, parts_per_block):
        if len(parts) != len(block.curve_ids):
            raise ValidationError(
                "block-shape",
                f"got {len(parts)} parts for {len(block.curve_ids)} curves",
            )
        for cid, value in zip(block.curve_ids, parts):
            mu[cid] = value
    sol = PartitionSolution(sys.p, mu)
    validate_solution(sys, sol)
    return sol


def _sample(sys: DiophSystem, rng: random.Random, cell_budget: int) -> PartitionSolution:
    mu: dict[str, int] = {}
    for block in sys.blocks:
        if sys.p < sum(block.u):
            raise EmptySolutionSetError(
                f"p={sys.p} is below the minimal block sum {sum(block.u)}"
            )
        if all(w == 1 for w in block.u):
            parts = _sample_ones_block(len(block.u), sys.p, rng)
        else:
            parts = _sample_dp_block(block.u, sys.p, rng, cell_budget)
        for cid, value in zip(block.curve_ids, parts):
            mu[cid] = value
    return PartitionSolution(sys.p, mu)


def sample_uniform(
    sys: DiophSystem, seed: int, cell_budget: int = DEFAULT_CELL_BUDGET
) -> PartitionSolution:
    """Exactly uniform positive solution; deterministic for a given seed."""
    return _sample(sys, random.Random(seed), cell_budget)


# ---------------------------------------------------------------------------
# Multiplicities on the log resolution


@dataclass(frozen=True)
class MultiplicityAssignment:
    p: int
    nu: dict[str, int]

    def __post_init__(self):
        for did, value in self.nu.items():
            if not 0 < value < self.p:
                raise ValidationError(
                    "nu-range", f"nu[{did}] = {value} is outside (0, {self.p})"
                )


def assign(
    resolved: ResolvedArrangement, sol: PartitionSolution
) -> MultiplicityAssignment:
    """Push mu down to every divisor of the log resolution.

    Proper transforms keep their mu; a blow-up divisor over a point gets
    the sum of the incident mu mod p.  A zero sum makes the cover data
    invalid, so the solution must be rejected (ExceptionalVanishes).
    """
    p = sol.p
    heavy = [pt for pt in resolved.arrangement.points if len(pt.curves) >= 3]
    nu: dict[str, int] = {}
    for div in resolved.divisors:
        if div.kind == "proper":
            if div.source not in sol.mu:
                raise ValidationError(
                    "mu-missing", f"solution has no mu for curve {div.source!r}"
                )
            nu[div.id] = sol.mu[div.source]
        else:
            point = heavy[int(div.source.split(":")[1]) - 1]
            total = sum(sol.mu[cid] for cid in point.curves) % p
            if total == 0:
                raise ExceptionalVanishes(
                    f"blow-up divisor {div.id} over {point.curves} "
                    f"gets multiplicity 0 mod {p}"
                )
            nu[div.id] = total
    return MultiplicityAssignment(p, nu)


@dataclass(frozen=True)
class NodeResidue:
    pair: tuple[str, str]
    q: int
    count: int


def node_residues(
    resolved: ResolvedArrangement, ma: MultiplicityAssignment
) -> list[NodeResidue]:
    """q = p - nu_i' nu_j for every intersecting divisor pair, i < j in
    divisor order.  Swapping the orientation replaces q by its inverse mod
    p, which leaves every downstream quantity unchanged."""
    p = ma.p
    out = []
    divisors = resolved.divisors
    for (i, j), count in sorted(resolved.nodes.items()):
        ni = ma.nu[divisors[i].id]
        nj = ma.nu[divisors[j].id]
        q = p - pow(ni, -1, p) * nj % p
        out.append(NodeResidue((divisors[i].id, divisors[j].id), q, count))
    return out


@dataclass(frozen=True)
class GoodnessReport:
    good: bool
    offending: tuple[tuple[tuple[str, str], int], ...]


def is_good(
    resolved: ResolvedArrangement,
    ma: MultiplicityAssignment,
    config: FareyConfig = DEFAULT_FAREY,
) -> GoodnessReport:
    """Good iff no node residue is a Farey neighbour."""
    offending = []
    for node in node_residues(resolved, ma):
        if is_farey_neighbour(node.q, ma.p, config):
            offending.append((node.pair, node.q))
    return GoodnessReport(not offending, tuple(offending))


@dataclass(frozen=True)
class GoodSample:
    solution: PartitionSolution
    assignment: MultiplicityAssignment
    tries: int


def sample_good(
    sys: DiophSystem,
    resolved: ResolvedArrangement,
    seed: int,
    max_tries: int = 100,
    config: FareyConfig = DEFAULT_FAREY,
    cell_budget: int = DEFAULT_CELL_BUDGET,
) -> GoodSample:
    """Rejection-sample until a good solution appears.

    Solutions whose blow-up multiplicity vanishes mod p count as bad tries.
    The try count is an empirical estimate of the bad fraction.  For
    parallel work, split seeds as seed + worker index; a single call is
    fully deterministic in `seed`.
    """
    if max_tries < 1:
        raise ValueError("max_tries must be >= 1")
    rng = random.Random(seed)
    for tries in range(1, max_tries + 1):
        sol = _sample(sys, rng, cell_budget)
        try:
            ma = assign(resolved, sol)
        except ExceptionalVanishes:
            continue
        if is_good(resolved, ma, config).good:
            return GoodSample(sol, ma, tries)
    raise ExhaustedTries(max_tries)


# ---------------------------------------------------------------------------
# Partition file format


def solution_to_text(sys: DiophSystem, sol: PartitionSolution) -> str:
    """Canonical text form: `p <prime>` then one `block ...` line per block."""
    lines = [f"p {sys.p}"]
    for block in sys.blocks:
        parts = " ".join(str(sol.mu[cid]) for cid in block.curve_ids)
        lines.append(f"block {parts}")
    return "\n".join(lines) + "\n"


def solution_from_text(sys: DiophSystem, text: str) -> PartitionSolution:
    """Parse the partition format against a system; errors carry line numbers."""
    p = None
    rows: list[list[int]] = []
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.strip()
        if not line or line.startswith("#"):
            continue
        fields = line.split()
        if fields[0] == "p":
            if p is not None:
                raise FileFormatError(f"line {lineno}: duplicate p line")
            if len(fields) != 2 or not fields[1].isdigit():
                raise FileFormatError(f"line {lineno}: expected `p <integer>`")
            p = int(fields[1])
        elif fields[0] == "block":
            try:
                rows.append([int(x) for x in fields[1:]])
            except ValueError:
                raise FileFormatError(f"line {lineno}: block entries must be integers")
        else:
            raise FileFormatError(f"line {lineno}: unknown directive {fields[0]!r}")
    if p is None:
        raise FileFormatError("missing `p <integer>` line")
    if p != sys.p:
        raise ValidationError("p-mismatch", f"file has p={p}, expected {sys.p}")
    return solution_from_parts(sys, rows)
