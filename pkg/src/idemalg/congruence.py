"""Congruences, tolerances, abelianness and the related decision procedures.

Congruences are canonical partitions of 0..n-1.  Principal congruences are
generated by union-find saturation over the unary polynomial slices of the
basic operations (closure under those slices implies closure under all
polynomials, one coordinate at a time).  The full lattice is the join
closure of the principal congruences; joins of congruences are transitive
closures of unions.

Abelianness is decided by the diagonal test on A^2: the algebra is abelian
iff the diagonal is a block of the congruence of A^2 generated by all pairs
of diagonal elements.  Tests cross-validate this against the brute-force
term condition at arity <= 3.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import cached_property
from itertools import combinations, product
from typing import Iterable, Optional, Sequence

from .algebra import (
    MAX_ANALYSIS_SIZE,
    FiniteAlgebra,
    product_algebra,
    quotient,
    table_index,
)
from .errors import CapExceededError, ProjectionNotFull, TooLarge
from .generate import term_operations

SET = "set"
MODULE = "module"
OTHER = "other"


@dataclass(frozen=True)
class Congruence:
    """A compatible partition, stored canonically: blocks sorted internally
    and by leader, covering 0..size-1."""

    size: int
    blocks: tuple[tuple[int, ...], ...]

    @staticmethod
    def from_blocks(size: int, blocks: Iterable[Iterable[int]]) -> "Congruence":
        canon = tuple(sorted(tuple(sorted(b)) for b in blocks))
        return Congruence(size, canon)

    @staticmethod
    def from_parent(parent: Sequence[int]) -> "Congruence":
        groups: dict[int, list[int]] = {}
        for x, p in enumerate(parent):
            groups.setdefault(p, []).append(x)
        return Congruence.from_blocks(len(parent), groups.values())

    @staticmethod
    def equality(size: int) -> "Congruence":
        return Congruence(size, tuple((x,) for x in range(size)))

    @staticmethod
    def total(size: int) -> "Congruence":
        return Congruence(size, (tuple(range(size)),))

    @cached_property
    def block_index(self) -> tuple[int, ...]:
        idx = [0] * self.size
        for bi, blk in enumerate(self.blocks):
            for x in blk:
                idx[x] = bi
        return tuple(idx)

    def together(self, x: int, y: int) -> bool:
        return self.block_index[x] == self.block_index[y]

    def block_of(self, x: int) -> tuple[int, ...]:
        return self.blocks[self.block_index[x]]

    @property
    def is_equality(self) -> bool:
        return len(self.blocks) == self.size

    @property
    def is_total(self) -> bool:
        return len(self.blocks) == 1

    def refines(self, other: "Congruence") -> bool:
        """Every block of self is inside a block of other."""
        return all(len({other.block_index[x] for x in blk}) == 1
                   for blk in self.blocks)

    def __str__(self) -> str:
        return "{" + "|".join(",".join(str(x) for x in blk)
                              for blk in self.blocks) + "}"

    def pairs(self) -> list[tuple[int, int]]:
        out = []
        for blk in self.blocks:
            out.extend((x, y) for x, y in combinations(blk, 2))
        return out


def is_compatible(algebra: FiniteAlgebra, part: Congruence) -> bool:
    """Exhaustive compatibility check of a partition."""
    bi = part.block_index
    for op in algebra.operations:
        r = op.arity
        for args in product(range(algebra.size), repeat=r):
            v = op.apply(args, algebra.size)
            rep = tuple(part.blocks[bi[x]][0] for x in args)
            if bi[v] != bi[op.apply(rep, algebra.size)]:
                return False
    return True


class _UnionFind:
    def __init__(self, n: int):
        self.parent = list(range(n))

    def find(self, x: int) -> int:
        while self.parent[x] != x:
            self.parent[x] = self.parent[self.parent[x]]
            x = self.parent[x]
        return x

    def union(self, x: int, y: int) -> bool:
        rx, ry = self.find(x), self.find(y)
        if rx == ry:
            return False
        if ry < rx:
            rx, ry = ry, rx
        self.parent[ry] = rx
        return True


def cg(algebra: FiniteAlgebra, pairs: Iterable[tuple[int, int]]) -> Congruence:
    """Least congruence containing the pairs: union-find saturated with the
    unary polynomial slices of the basic operations."""
    n = algebra.size
    uf = _UnionFind(n)
    queue = [(x, y) for x, y in pairs if uf.union(x, y)]
    while queue:
        x, y = queue.pop()
        for op in algebra.operations:
            r = op.arity
            for pos in range(r):
                for fill in product(range(n), repeat=r - 1):
                    ax = fill[:pos] + (x,) + fill[pos:]
                    ay = fill[:pos] + (y,) + fill[pos:]
                    vx = op.apply(ax, n)
                    vy = op.apply(ay, n)
                    if uf.union(vx, vy):
                        queue.append((vx, vy))
    return Congruence.from_parent([uf.find(x) for x in range(n)])


def join(a: Congruence, b: Congruence) -> Congruence:
    """Join in the congruence lattice: the transitive closure of the union."""
    uf = _UnionFind(a.size)
    for part in (a, b):
        for blk in part.blocks:
            for x in blk[1:]:
                uf.union(blk[0], x)
    return Congruence.from_parent([uf.find(x) for x in range(a.size)])


def meet(a: Congruence, b: Congruence) -> Congruence:
    keys = {x: (a.block_index[x], b.block_index[x]) for x in range(a.size)}
    groups: dict[tuple[int, int], list[int]] = {}
    for x, k in keys.items():
        groups.setdefault(k, []).append(x)
    return Congruence.from_blocks(a.size, groups.values())


def congruence_lattice(algebra: FiniteAlgebra, bound: int = MAX_ANALYSIS_SIZE,
                       force: bool = False) -> list[Congruence]:
    """All congruences: the join closure of the principal ones plus
    equality, sorted canonically."""
    if algebra.size > bound and not force:
        raise TooLarge(algebra.size, bound)
    n = algebra.size
    found = {Congruence.equality(n)}
    principal = set()
    for x in range(n):
        for y in range(x + 1, n):
            principal.add(cg(algebra, [(x, y)]))
    found |= principal
    frontier = list(principal)
    while frontier:
        theta = frontier.pop()
        for eta in principal:
            j = join(theta, eta)
            if j not in found:
                found.add(j)
                frontier.append(j)
    return sorted(found, key=lambda c: c.blocks)


def maximal_congruences(algebra: FiniteAlgebra,
                        lattice: Optional[list[Congruence]] = None) -> list[Congruence]:
    """Proper congruences with nothing strictly between them and the total
    one; equivalently those with a simple quotient."""
    if lattice is None:
        lattice = congruence_lattice(algebra)
    proper = [c for c in lattice if not c.is_total]
    out = []
    for theta in proper:
        if not any(theta is not eta and theta.refines(eta) for eta in proper):
            out.append(theta)
    return sorted(out, key=lambda c: c.blocks)


# --------------------------------------------------------------------------
# tolerances
# --------------------------------------------------------------------------


@dataclass(frozen=True)
class Tolerance:
    """A reflexive symmetric compatible relation, stored as a frozenset of
    ordered pairs (both orders present)."""

    size: int
    pairs: frozenset[tuple[int, int]]

    def related(self, x: int, y: int) -> bool:
        return (x, y) in self.pairs

    @property
    def is_equality(self) -> bool:
        return all(x == y for x, y in self.pairs)

    @property
    def is_total(self) -> bool:
        return len(self.pairs) == self.size * self.size

    def transitive_closure(self) -> Congruence:
        uf = _UnionFind(self.size)
        for x, y in self.pairs:
            uf.union(x, y)
        return Congruence.from_parent([uf.find(x) for x in range(self.size)])

    def classes(self) -> list[tuple[int, ...]]:
        """Maximal cliques of the relation graph, by brute force."""
        n = self.size
        cliques: list[frozenset[int]] = []
        for mask in range(1, 1 << n):
            members = [x for x in range(n) if mask & (1 << x)]
            if all(self.related(x, y) for x, y in combinations(members, 2)):
                s = frozenset(members)
                cliques.append(s)
        maximal = [c for c in cliques
                   if not any(c < d for d in cliques)]
        return sorted(tuple(sorted(c)) for c in set(maximal))


def tolerance_generated(algebra: FiniteAlgebra,
                        pairs: Iterable[tuple[int, int]]) -> Tolerance:
    """Least compatible reflexive symmetric relation containing the pairs:
    saturate by applying every operation to related tuples."""
    n = algebra.size
    rel: set[tuple[int, int]] = {(x, x) for x in range(n)}
    for x, y in pairs:
        rel.add((x, y))
        rel.add((y, x))
    changed = True
    while changed:
        changed = False
        current = sorted(rel)
        for op in algebra.operations:
            for combo in product(current, repeat=op.arity):
                u = op.apply([p[0] for p in combo], n)
                v = op.apply([p[1] for p in combo], n)
                if (u, v) not in rel:
                    rel.add((u, v))
                    rel.add((v, u))
                    changed = True
    return Tolerance(n, frozenset(rel))


def tolerance_ops(algebra: FiniteAlgebra, pairs: Iterable[tuple[int, int]]
                  ) -> tuple[Tolerance, list[tuple[int, ...]]]:
    tol = tolerance_generated(algebra, pairs)
    return tol, tol.classes()


def link_tolerance(algebra: FiniteAlgebra, relation: Iterable[Sequence[int]],
                   coordinate: int) -> Tolerance:
    """The i-th link tolerance of a relation with full projections: two
    elements are related when some fixing of the other coordinates puts both
    tuples into the relation."""
    tuples = [tuple(t) for t in relation]
    if not tuples:
        raise ValueError("empty relation")
    k = len(tuples[0])
    for j in range(k):
        if {t[j] for t in tuples} != set(range(algebra.size)):
            raise ProjectionNotFull(j)
    groups: dict[tuple[int, ...], list[int]] = {}
    for t in tuples:
        key = t[:coordinate] + t[coordinate + 1:]
        groups.setdefault(key, []).append(t[coordinate])
    rel: set[tuple[int, int]] = {(x, x) for x in range(algebra.size)}
    for vals in groups.values():
        for x in vals:
            for y in vals:
                rel.add((x, y))
    tol = Tolerance(algebra.size, frozenset(rel))
    assert _tolerance_compatible(algebra, tol), \
        "link relation of a compatible relation must be a tolerance"
    return tol


def _tolerance_compatible(algebra: FiniteAlgebra, tol: Tolerance) -> bool:
    current = sorted(tol.pairs)
    for op in algebra.operations:
        for combo in product(current, repeat=op.arity):
            u = op.apply([p[0] for p in combo], algebra.size)
            v = op.apply([p[1] for p in combo], algebra.size)
            if (u, v) not in tol.pairs:
                return False
    return True


# --------------------------------------------------------------------------
# abelianness and simple-quotient classification
# --------------------------------------------------------------------------


def is_abelian(algebra: FiniteAlgebra, bound: int = MAX_ANALYSIS_SIZE ** 2,
               force: bool = False) -> bool:
    """Diagonal test on A^2: abelian iff the diagonal is a block of the
    congruence of A^2 generated by all pairs of diagonal elements."""
    n = algebra.size
    if n * n > bound and not force:
        raise TooLarge(n * n, bound)
    square = product_algebra(algebra, algebra)
    diag = [x * n + x for x in range(n)]
    theta = cg(square, [(diag[0], d) for d in diag[1:]] or [(diag[0], diag[0])])
    return set(theta.block_of(diag[0])) == set(diag)


def is_abelian_brute(algebra: FiniteAlgebra, max_arity: int = 3,
                     cap: int = 20000) -> bool:
    """Brute-force term condition at arity <= max_arity: for every term t
    and all u, v, a-bar, b-bar:
    t(u, a-bar) = t(u, b-bar)  implies  t(v, a-bar) = t(v, b-bar).

    This is the reference implementation used to cross-check is_abelian on
    small fixtures; the true condition quantifies over all arities."""
    n = algebra.size
    for arity in range(2, max_arity + 1):
        for table, _ in term_operations(algebra, arity, cap):
            m = arity - 1
            for abar in product(range(n), repeat=m):
                for bbar in product(range(n), repeat=m):
                    if abar == bbar:
                        continue
                    ok = [table[table_index((u,) + abar, n)]
                          == table[table_index((u,) + bbar, n)] for u in range(n)]
                    if any(ok) and not all(ok):
                        return False
    return True


def classify_simple_quotient(algebra: FiniteAlgebra) -> str:
    """For a simple idempotent algebra: SET if all basic operations are
    projections, MODULE if abelian but not a set, OTHER otherwise.  The
    caller guarantees simplicity; on simple idempotent algebras abelian and
    not-a-set means the full idempotent reduct of a module."""
    from .algebra import is_set
    if is_set(algebra):
        return SET
    if is_abelian(algebra):
        return MODULE
    return OTHER


def absorbing_elements(algebra: FiniteAlgebra, max_arity: int = 3,
                       cap: int = 20000) -> tuple[list[int], int]:
    """Elements a such that every term operation (up to the reported arity)
    depending on a variable maps a there to a, whatever the companions.

    Returns (elements, arity_reached): the search walks arities upward and
    stops early when the term enumeration exceeds the cap, so the result is
    'absorbing up to arity_reached'."""
    n = algebra.size
    candidates = set(range(n))
    reached = 0
    for arity in range(1, max_arity + 1):
        try:
            tops = term_operations(algebra, arity, cap)
        except CapExceededError:
            break
        reached = arity
        for table, _ in tops:
            for pos in range(arity):
                if not _table_depends_on(table, pos, n, arity):
                    continue
                dead = set()
                for a in candidates:
                    for fill in product(range(n), repeat=arity - 1):
                        args = fill[:pos] + (a,) + fill[pos:]
                        if table[table_index(args, n)] != a:
                            dead.add(a)
                            break
                candidates -= dead
                if not candidates:
                    return [], reached
    return sorted(candidates), reached


def _table_depends_on(table: Sequence[int], pos: int, n: int, arity: int) -> bool:
    for args in product(range(n), repeat=arity):
        base = table[table_index(args, n)]
        for v in range(n):
            if v != args[pos]:
                other = args[:pos] + (v,) + args[pos + 1:]
                if table[table_index(other, n)] != base:
                    return True
    return False


def quotient_by(algebra: FiniteAlgebra, theta: Congruence,
                name: Optional[str] = None) -> tuple[FiniteAlgebra, tuple[int, ...]]:
    """Factor algebra modulo a Congruence (wrapper over algebra.quotient)."""
    return quotient(algebra, theta.blocks, name)
