"""Generation with provenance and the subpower membership oracle.

Two closure engines live here.  Element generation inside one algebra is a
plain breadth-first closure with provenance (deterministic: rounds, then
operations in declaration order, then argument tuples in lexicographic
order).  Subpower queries close a set of tuples under the coordinatewise
operations; that engine is vectorized with numpy and deduplicates the
partial applications of each operation by the signature of the unary maps
they induce per coordinate, which is what makes desk-scale instances with
ternary operations tractable.  Coordinates may live in different algebras of
one signature, so queries over products of quotients need no product
algebras.

Every Found answer is re-evaluated against its target before being
returned.
"""

from __future__ import annotations

from dataclasses import dataclass
from itertools import product
from typing import Optional, Sequence, Union

import numpy as np

from .algebra import MAX_ANALYSIS_SIZE, FiniteAlgebra, index_args, table_index
from .errors import CapExceededError, ElementNotGenerated, TooLarge
from . import terms
from .terms import Term

DEFAULT_CAP = 1_000_000

_CHUNK = 1 << 19   # prefix combinations processed per numpy batch


# --------------------------------------------------------------------------
# element generation inside one algebra
# --------------------------------------------------------------------------

Provenance = Union[tuple[str, int], tuple[str, str, tuple[int, ...]]]
# ("gen", i)  or  ("step", op name, arguments)


@dataclass(frozen=True)
class GenerationTrace:
    """The subuniverse generated by a set, with one provenance entry per
    element: a generator index, or the first operation application that
    produced it (arguments are elements, which precede it in discovery
    order)."""

    algebra: FiniteAlgebra
    generators: tuple[int, ...]
    elements: tuple[int, ...]          # discovery order, generators first
    provenance: dict[int, Provenance]

    @property
    def subuniverse(self) -> frozenset[int]:
        return frozenset(self.elements)

    def replay(self) -> bool:
        """Re-derive every element from its provenance."""
        for e in self.elements:
            p = self.provenance[e]
            if p[0] == "gen":
                if self.generators[p[1]] != e:
                    return False
            else:
                _, op, args = p
                if self.algebra.apply(op, args) != e:
                    return False
        return True


def generate_subalgebra(algebra: FiniteAlgebra, seeds: Sequence[int]) -> GenerationTrace:
    """Least subuniverse containing seeds, breadth first."""
    if not seeds:
        raise ValueError("generation needs at least one seed element")
    gens = tuple(dict.fromkeys(seeds))
    elements = list(gens)
    prov: dict[int, Provenance] = {e: ("gen", i) for i, e in enumerate(gens)}
    known = set(gens)
    frontier_done = 0
    while frontier_done != len(elements):
        frontier_done = len(elements)
        snapshot = sorted(known)
        for op in algebra.operations:
            for args in product(snapshot, repeat=op.arity):
                v = op.apply(args, algebra.size)
                if v not in known:
                    known.add(v)
                    elements.append(v)
                    prov[v] = ("step", op.name, args)
    return GenerationTrace(algebra, gens, tuple(elements), prov)


def witness_term(trace: GenerationTrace, element: int) -> Term:
    """A term over the generators that evaluates to the element."""
    if element not in trace.provenance:
        raise ElementNotGenerated(element)
    m = len(trace.generators)
    memo: dict[int, Term] = {}

    def build(e: int) -> Term:
        t = memo.get(e)
        if t is not None:
            return t
        p = trace.provenance[e]
        if p[0] == "gen":
            t = terms.proj(p[1], m)
        else:
            _, op, args = p
            t = terms.app(op, [build(a) for a in args])
        memo[e] = t
        return t

    return build(element)


def subuniverse(algebra: FiniteAlgebra, seeds: Sequence[int]) -> frozenset[int]:
    return generate_subalgebra(algebra, seeds).subuniverse


def all_subalgebras(algebra: FiniteAlgebra, bound: int = MAX_ANALYSIS_SIZE,
                    force: bool = False) -> frozenset[frozenset[int]]:
    """Every subuniverse, as the closure system saturated from singletons."""
    if algebra.size > bound and not force:
        raise TooLarge(algebra.size, bound)
    found: set[frozenset[int]] = set()
    queue = [subuniverse(algebra, [x]) for x in algebra.elements()]
    for s in queue:
        found.add(s)
    while queue:
        s = queue.pop()
        for x in algebra.elements():
            if x in s:
                continue
            bigger = subuniverse(algebra, sorted(s | {x}))
            if bigger not in found:
                found.add(bigger)
                queue.append(bigger)
    found.add(frozenset(algebra.elements()))
    return frozenset(found)


# --------------------------------------------------------------------------
# subpower closure
# --------------------------------------------------------------------------


@dataclass(frozen=True)
class SubpowerQuery:
    """Does some term send the generator tuples to the target,
    coordinatewise?

    `columns` assigns an algebra to every coordinate; all must share one
    signature.  The homogeneous case (a power of a single algebra) passes
    the same algebra at every coordinate."""

    columns: tuple[FiniteAlgebra, ...]
    generators: tuple[tuple[int, ...], ...]
    target: tuple[int, ...]
    cap: int = DEFAULT_CAP

    def __post_init__(self) -> None:
        k = len(self.columns)
        for g in self.generators + (self.target,):
            if len(g) != k:
                raise ValueError("tuple length does not match coordinate count")
            for c, v in enumerate(g):
                if not 0 <= v < self.columns[c].size:
                    raise ValueError(f"entry {v} out of range at coordinate {c}")


@dataclass(frozen=True)
class Found:
    witness: Term
    closure_size: int


@dataclass(frozen=True)
class Absent:
    closure_size: int


@dataclass(frozen=True)
class CapExceeded:
    cap: int


SubpowerAnswer = Union[Found, Absent, CapExceeded]


class TupleClosure:
    """Closure of generator tuples under the shared signature, acting
    coordinatewise.

    Rows live in a growing uint8 matrix, deduplicated by row bytes.  For
    operations of arity >= 2 the last argument axis is swept vectorized;
    leading-argument combinations are registered once each and deduplicated
    by the signature of the per-coordinate unary maps they induce.  The
    discovery order is deterministic: rounds, operations in declaration
    order, signatures in first-registration order (combination blocks old
    before new, indices in C order), last argument ascending.
    """

    def __init__(self, columns: Sequence[FiniteAlgebra],
                 generators: Sequence[Sequence[int]], cap: int = DEFAULT_CAP):
        self.columns = tuple(columns)
        self.k = len(self.columns)
        self.cap = cap
        sig = self.columns[0].signature
        for alg in self.columns:
            if alg.signature != sig:
                raise ValueError("all coordinate algebras must share one signature")
        self.signature = sig
        self.n = 0
        self._buf = np.zeros((256, self.k), dtype=np.uint8)
        # rows pack into int64 keys when they fit, else into raw bytes
        self._w256 = (256 ** np.arange(self.k)).astype(np.int64) if self.k <= 7 else None
        self.index: dict = {}
        self.provenance: list[Provenance] = []
        self.complete = False
        self._build_op_tables()
        # per op: registered partial-application signatures
        self._sig_ids: list[dict[bytes, np.ndarray]] = [dict() for _ in sig]
        self._sig_combo: list[dict[bytes, tuple[int, ...]]] = [dict() for _ in sig]
        self._sig_swept: list[dict[bytes, int]] = [dict() for _ in sig]
        self._unary_done: dict[int, int] = {}
        self._registered = 0     # rows whose prefix combinations are registered
        self.n_generators = len(generators)
        for i, g in enumerate(generators):
            self._append(np.asarray(g, dtype=np.uint8), ("gen", i))
        self._run()

    def _build_op_tables(self) -> None:
        distinct: list[FiniteAlgebra] = []
        pos: dict[int, int] = {}
        for alg in self.columns:
            if id(alg) not in pos:
                pos[id(alg)] = len(distinct)
                distinct.append(alg)
        self._col_alg = [pos[id(alg)] for alg in self.columns]
        nmax = max(alg.size for alg in distinct)
        self._ops = []
        for name, arity in self.signature:
            if arity == 1:
                col_tab = np.zeros((self.k, nmax), dtype=np.uint8)
                for c, alg in enumerate(self.columns):
                    col_tab[c, :alg.size] = alg.op(name).table
                self._ops.append((name, 1, None, None, col_tab))
                continue
            stacked = []
            lut_per_alg = {}
            offset = 0
            for ai, alg in enumerate(distinct):
                n = alg.size
                flat = np.asarray(alg.op(name).table, dtype=np.uint8)
                maps = flat.reshape(n ** (arity - 1), n)
                uniq, inv = np.unique(maps, axis=0, return_inverse=True)
                padded = np.zeros((len(uniq), nmax), dtype=np.uint8)
                padded[:, :n] = uniq
                stacked.append(padded)
                lut_per_alg[ai] = inv.reshape(-1).astype(np.int32) + offset
                offset += len(uniq)
            allmaps = np.vstack(stacked)
            col_lut = [lut_per_alg[self._col_alg[c]] for c in range(self.k)]
            self._ops.append((name, arity, allmaps, col_lut, None))

    # -- row storage --

    @property
    def rows(self) -> np.ndarray:
        return self._buf[:self.n]

    def _key_of(self, row: np.ndarray):
        if self._w256 is not None:
            return int(row.astype(np.int64) @ self._w256)
        return row.tobytes()

    def _keys_of(self, batch: np.ndarray) -> list:
        if self._w256 is not None:
            return (batch.astype(np.int64) @ self._w256).tolist()
        return [row.tobytes() for row in batch]

    def _append(self, row: np.ndarray, prov: Provenance) -> bool:
        key = self._key_of(row)
        if key in self.index:
            return False
        if self.n == len(self._buf):
            grown = np.zeros((2 * len(self._buf), self.k), dtype=np.uint8)
            grown[:self.n] = self._buf
            self._buf = grown
        self._buf[self.n] = row
        self.index[key] = self.n
        self.provenance.append(prov)
        self.n += 1
        return True

    def _append_batch(self, out: np.ndarray, mk_prov) -> bool:
        """Deduplicate a candidate batch in bulk; mk_prov maps the batch
        position of each genuinely new row to its provenance."""
        # first occurrence of each distinct row, in batch order
        if self._w256 is not None:
            keys = out.astype(np.int64) @ self._w256
            _, first = np.unique(keys, return_index=True)
        else:
            _, first = np.unique(out, axis=0, return_index=True)
        added = False
        for j in sorted(first.tolist()):
            if self._append(out[j], mk_prov(j)):
                added = True
                if self.n > self.cap:
                    return added
        return added

    def __len__(self) -> int:
        return self.n

    def lookup(self, tup: Sequence[int]) -> Optional[int]:
        return self.index.get(self._key_of(np.asarray(tup, dtype=np.uint8)))

    # -- signatures --

    def _register_prefixes(self, opi: int, idx_arrays: list[np.ndarray]) -> None:
        """Compute per-coordinate unary-map signatures for the given prefix
        combinations and register the first combination of each new one."""
        name, arity, allmaps, col_lut, _ = self._ops[opi]
        rows = self.rows
        nmaps = len(allmaps)
        packw = (nmaps ** np.arange(self.k)).astype(np.int64) \
            if nmaps ** self.k < (1 << 62) else None
        ids_dict = self._sig_ids[opi]
        combo_dict = self._sig_combo[opi]
        chunk = idx_arrays
        m = len(chunk[0])
        sig = np.empty((m, self.k), dtype=np.int32)
        for c in range(self.k):
            n = self.columns[c].size
            packed = rows[chunk[0], c].astype(np.int64)
            for arr in chunk[1:]:
                packed = packed * n + rows[arr, c]
            sig[:, c] = col_lut[c][packed]
        if packw is not None:
            _, first = np.unique(sig @ packw, return_index=True)
        else:
            _, first = np.unique(sig, axis=0, return_index=True)
        for j in sorted(first.tolist()):
            key = sig[j].tobytes()
            if key not in ids_dict:
                ids_dict[key] = sig[j].copy()
                combo_dict[key] = tuple(int(arr[j]) for arr in chunk)

    def _iter_prefix_chunks(self, pr: int, old: int, cur: int):
        """Yield bounded-size index-array lists covering exactly the prefix
        combinations that touch rows[old:cur] (everything when old = 0)."""
        if pr == 1:
            r = np.arange(old, cur)
            for lo in range(0, len(r), _CHUNK):
                yield [r[lo:lo + _CHUNK]]
            return
        if pr == 2:
            pieces = ((np.arange(old), np.arange(old, cur)),
                      (np.arange(old, cur), np.arange(cur)))
            for r1, r2 in pieces:
                if not (len(r1) and len(r2)):
                    continue
                per = max(1, _CHUNK // len(r2))
                for lo in range(0, len(r1), per):
                    part = r1[lo:lo + per]
                    yield [np.repeat(part, len(r2)), np.tile(r2, len(part))]
            return
        # arity beyond 3: re-enumerate all combinations each round (the
        # registration dictionary absorbs repeats); desk scale only
        total = cur ** pr
        for lo in range(0, total, _CHUNK):
            flat = np.arange(lo, min(total, lo + _CHUNK))
            yield [(flat // (cur ** p)) % cur for p in range(pr - 1, -1, -1)]

    # -- main loop --

    def _run(self) -> None:
        while not self.complete:
            n_cur = self.n
            for opi, (name, arity, allmaps, col_lut, col_tab) in enumerate(self._ops):
                if arity == 1:
                    done = self._unary_done.get(opi, 0)
                    if done < n_cur:
                        out = col_tab[np.arange(self.k)[None, :], self.rows[done:n_cur]]
                        self._unary_done[opi] = n_cur
                        self._append_batch(out, lambda j: ("step", name, (done + j,)))
                        if self.n > self.cap:
                            return
                    continue
                for blk in self._iter_prefix_chunks(arity - 1, self._registered, n_cur):
                    if len(blk[0]):
                        self._register_prefixes(opi, blk)
                # sweep every signature over its unswept tail, batched by
                # shared sweep start so one fancy index covers many sigs
                swept = self._sig_swept[opi]
                groups: dict[int, list[bytes]] = {}
                for key in self._sig_ids[opi]:
                    z0 = swept.get(key, 0)
                    if z0 < n_cur:
                        swept[key] = n_cur
                        groups.setdefault(z0, []).append(key)
                for z0 in sorted(groups):
                    keys = groups[z0]
                    zs = self.rows[z0:n_cur].copy()
                    m = len(zs)
                    per = max(1, _CHUNK // max(1, m))
                    for lo in range(0, len(keys), per):
                        part = keys[lo:lo + per]
                        ids = np.stack([self._sig_ids[opi][kk] for kk in part])
                        combos = [self._sig_combo[opi][kk] for kk in part]
                        out = allmaps[ids[:, None, :], zs[None, :, :]]
                        out = out.reshape(len(part) * m, self.k)
                        self._append_batch(
                            out, lambda q: ("step", name,
                                            combos[q // m] + (z0 + q % m,)))
                        if self.n > self.cap:
                            return
            self._registered = n_cur
            if self.n == n_cur:
                self.complete = True

    # -- witnesses --

    def witness(self, row_index: int) -> Term:
        m = self.n_generators
        memo: dict[int, Term] = {}

        def build(i: int) -> Term:
            t = memo.get(i)
            if t is not None:
                return t
            p = self.provenance[i]
            if p[0] == "gen":
                t = terms.proj(p[1], m)
            else:
                _, op, combo = p
                t = terms.app(op, [build(c) for c in combo])
            memo[i] = t
            return t

        return build(row_index)


def subpower_membership(query: SubpowerQuery) -> SubpowerAnswer:
    """Close the generators under the coordinatewise operations and look for
    the target.  Found answers carry a re-verified witness term."""
    cl = TupleClosure(query.columns, query.generators, query.cap)
    hit = cl.lookup(query.target)
    if hit is not None:
        w = cl.witness(hit)
        for c, alg in enumerate(query.columns):
            value = terms.evaluate(w, alg, [g[c] for g in query.generators])
            assert value == query.target[c], "witness failed re-evaluation"
        return Found(w, len(cl))
    if cl.complete:
        return Absent(len(cl))
    return CapExceeded(query.cap)


def naive_subpower_membership(query: SubpowerQuery) -> SubpowerAnswer:
    """Independent reference closure: plain dict of tuples, nested loops, no
    vectorization and no signature sharing.  Used as the test oracle."""
    cols = query.columns
    k = len(cols)
    ops = [(name, arity, [alg.op(name).table for alg in cols])
           for name, arity in cols[0].signature]
    sizes = [alg.size for alg in cols]
    known: dict[tuple[int, ...], int] = {}
    rows: list[tuple[int, ...]] = []
    for g in query.generators:
        t = tuple(g)
        if t not in known:
            known[t] = len(rows)
            rows.append(t)
    old = 0
    while True:
        cur = len(rows)
        if cur == old:
            break
        for name, arity, tables in ops:
            for combo in product(range(cur), repeat=arity):
                if all(c < old for c in combo):
                    continue
                args = [rows[c] for c in combo]
                res = tuple(tables[c][table_index([a[c] for a in args], sizes[c])]
                            for c in range(k))
                if res not in known:
                    known[res] = len(rows)
                    rows.append(res)
                    if len(rows) > query.cap:
                        return CapExceeded(query.cap)
        old = cur
    if tuple(query.target) in known:
        # no witness tracking on purpose; the fast engine provides terms
        return Found(terms.proj(0, max(1, len(query.generators))), len(rows))
    return Absent(len(rows))


# --------------------------------------------------------------------------
# derived queries
# --------------------------------------------------------------------------

SEMILATTICE = "semilattice"
MAJORITY = "majority"
MALTSEV = "maltsev"


@dataclass(frozen=True)
class PairWitness:
    kind: str
    term: Term
    absorber: Optional[int] = None   # semilattice only: the absorbing element
    closure_size: int = 0


def majority_query(algebra: FiniteAlgebra, a: int, b: int,
                   cap: int = DEFAULT_CAP) -> SubpowerQuery:
    """Coordinates are the six non-constant triples over {a, b}; the target
    takes the repeated element at each."""
    cols = sorted(t for t in product((a, b), repeat=3) if len(set(t)) > 1)
    gens = tuple(tuple(c[i] for c in cols) for i in range(3))
    target = tuple(max(set(c), key=c.count) for c in cols)
    return SubpowerQuery((algebra,) * len(cols), gens, target, cap)


def maltsev_query(algebra: FiniteAlgebra, cap: int = DEFAULT_CAP) -> SubpowerQuery:
    """Coordinates are all (x,x,y) and (y,x,x) inputs for ordered pairs
    x != y; idempotency covers the diagonal, so a hit is a Mal'tsev term."""
    pairs = [(x, y) for x in algebra.elements() for y in algebra.elements() if x != y]
    cols = [(x, x, y) for x, y in pairs] + [(y, x, x) for x, y in pairs]
    gens = tuple(tuple(c[i] for c in cols) for i in range(3))
    target = tuple(y for x, y in pairs) * 2
    return SubpowerQuery((algebra,) * len(cols), gens, target, cap)


def find_pair_witness(algebra: FiniteAlgebra, kind: str, a: int = 0, b: int = 0,
                      cap: int = DEFAULT_CAP
                      ) -> Union[PairWitness, Absent, CapExceeded]:
    """Search for a term that is a semilattice (resp. majority) operation on
    the pair {a, b}, or a Mal'tsev term on the whole algebra.

    Semilattice tries both absorbers, b first.  Absent answers always come
    from complete closures; a cap hit is CapExceeded, never absence."""
    if kind == SEMILATTICE:
        if a == b:
            raise ValueError("need two distinct elements")
        cl = TupleClosure((algebra, algebra), ((a, b), (b, a)), cap)
        for absorber in (b, a):
            hit = cl.lookup((absorber, absorber))
            if hit is not None:
                w = cl.witness(hit)
                assert terms.evaluate(w, algebra, (a, b)) == absorber
                assert terms.evaluate(w, algebra, (b, a)) == absorber
                return PairWitness(SEMILATTICE, w, absorber, len(cl))
        return Absent(len(cl)) if cl.complete else CapExceeded(cap)
    if kind == MAJORITY:
        if a == b:
            raise ValueError("need two distinct elements")
        q = majority_query(algebra, a, b, cap)
    elif kind == MALTSEV:
        if algebra.size < 2:
            return PairWitness(MALTSEV, terms.proj(0, 3), None, 0)
        q = maltsev_query(algebra, cap)
    else:
        raise ValueError(f"unknown witness kind {kind!r}")
    ans = subpower_membership(q)
    if isinstance(ans, Found):
        return PairWitness(kind, ans.witness, None, ans.closure_size)
    return ans


def term_operations(algebra: FiniteAlgebra, arity: int, cap: int = DEFAULT_CAP
                    ) -> list[tuple[tuple[int, ...], Term]]:
    """All term operations of the given arity, as (table, witness) pairs in
    discovery order: the closure of the projections inside A^(A^arity).

    Raises CapExceededError when the clone is larger than the cap; a partial
    enumeration would be unusable."""
    n = algebra.size
    k = n ** arity
    args_of = [index_args(i, n, arity) for i in range(k)]
    gens = tuple(tuple(args_of[i][p] for i in range(k)) for p in range(arity))
    cl = TupleClosure((algebra,) * k, gens, cap)
    if not cl.complete:
        raise CapExceededError(cap, f"arity-{arity} term enumeration on {algebra.name}")
    return [(tuple(int(v) for v in cl.rows[i]), cl.witness(i))
            for i in range(len(cl))]
