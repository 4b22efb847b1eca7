"""Generation, subpower membership, and the pair-witness queries."""

import random
from itertools import combinations, product

from idemalg import terms
from idemalg.algebra import restrict
from idemalg.generate import (
    Absent,
    CapExceeded,
    MAJORITY,
    MALTSEV,
    PairWitness,
    SEMILATTICE,
    SubpowerQuery,
    all_subalgebras,
    find_pair_witness,
    generate_subalgebra,
    naive_subpower_membership,
    subpower_membership,
    subuniverse,
    term_operations,
    witness_term,
)


def test_generate_no_edge_pair(a_ne):
    trace = generate_subalgebra(a_ne, [0, 1])
    assert trace.subuniverse == frozenset({0, 1, 2})
    assert trace.provenance[2] == ("step", "f", (0, 1))
    assert trace.replay()
    w = witness_term(trace, 2)
    assert w.text() == "f(p0, p1)"
    assert terms.evaluate(w, a_ne, (0, 1)) == 2


def test_generate_singleton_idempotency(a_ne):
    for x in range(3):
        assert subuniverse(a_ne, [x]) == frozenset({x})


def test_generate_z3_pair_replays(z3a):
    trace = generate_subalgebra(z3a, [0, 1])
    assert trace.subuniverse == frozenset({0, 1, 2})
    w = witness_term(trace, 2)
    assert terms.evaluate(w, z3a, (0, 1)) == 2


def test_generation_monotone_seeded(a_ne, a_nms, c_nef):
    rng = random.Random(20240817)
    for alg in (a_ne, a_nms, c_nef):
        for _ in range(20):
            small = rng.sample(range(alg.size), rng.randint(1, alg.size))
            extra = rng.sample(range(alg.size), rng.randint(0, alg.size - 1))
            big = list(dict.fromkeys(small + extra))
            assert subuniverse(alg, small) <= subuniverse(alg, big)


def test_all_subalgebras_no_edge(a_ne):
    subs = {tuple(sorted(s)) for s in all_subalgebras(a_ne)}
    assert subs == {(0,), (1,), (2,), (0, 2), (1, 2), (0, 1, 2)}


def test_all_subalgebras_small(mj2, trivial):
    assert {tuple(sorted(s)) for s in all_subalgebras(mj2)} == \
        {(0,), (1,), (0, 1)}
    assert {tuple(sorted(s)) for s in all_subalgebras(trivial)} == {(0,)}


def test_subalgebras_closed_under_intersection(a_ne, a_nms, c_nef):
    for alg in (a_ne, a_nms, c_nef):
        subs = all_subalgebras(alg)
        for s, t in combinations(subs, 2):
            meet = s & t
            if meet:
                assert meet in subs


def test_subpower_semilattice_query(a_ne):
    q = SubpowerQuery((a_ne, a_ne), ((0, 2), (2, 0)), (2, 2))
    ans = subpower_membership(q)
    assert ans.witness.text() == "f(p0, p1)"


def test_subpower_generator_target_is_projection(a_ne):
    q = SubpowerQuery((a_ne, a_ne), ((0, 2), (2, 0)), (2, 0))
    ans = subpower_membership(q)
    assert ans.witness is terms.proj(1, 2)


def test_subpower_cap_exceeded_is_reported(a_nms):
    q = SubpowerQuery((a_nms,) * 6,
                      ((0, 0, 0, 1, 1, 1), (0, 1, 1, 0, 0, 1),
                       (1, 0, 1, 0, 1, 0)),
                      (0, 0, 1, 0, 1, 1), cap=5)
    ans = subpower_membership(q)
    assert isinstance(ans, CapExceeded)


def test_find_pair_witness_examples(a_ne, a_nms, z3a):
    sub, _ = restrict(a_ne, [0, 2])
    got = find_pair_witness(sub, SEMILATTICE, 0, 1)
    assert isinstance(got, PairWitness) and got.absorber == 1
    assert isinstance(find_pair_witness(a_nms, MAJORITY, 0, 1), Absent)
    mal = find_pair_witness(z3a, MALTSEV)
    assert mal.term.text() == "h(p0, p1, p2)"


def test_witnesses_reevaluate_on_random_targets(a_ne):
    # soundness: whatever the query, a Found witness reproduces its target
    rng = random.Random(7)
    for _ in range(30):
        k = rng.randint(1, 4)
        gens = tuple(tuple(rng.randrange(3) for _ in range(k))
                     for _ in range(rng.randint(1, 3)))
        target = tuple(rng.randrange(3) for _ in range(k))
        ans = subpower_membership(SubpowerQuery((a_ne,) * k, gens, target))
        if hasattr(ans, "witness"):
            for c in range(k):
                assert terms.evaluate(ans.witness, a_ne,
                                      [g[c] for g in gens]) == target[c]


def test_heterogeneous_columns(sl2, z3a):
    from idemalg.algebra import align_signatures
    s, z = align_signatures([sl2, z3a])
    # one coordinate in each algebra; look for a term that meets in the
    # first and averages in the second: h(x,y,z) works coordinatewise
    q = SubpowerQuery((s, z, z), ((0, 0, 1), (1, 1, 0), (1, 2, 2)),
                      (0, 1, 0))
    ans = subpower_membership(q)
    assert hasattr(ans, "witness")
    w = ans.witness
    assert terms.evaluate(w, s, (0, 1, 1)) == 0
    assert terms.evaluate(w, z, (0, 1, 2)) == 1
    assert terms.evaluate(w, z, (1, 0, 2)) == 0


def test_term_operations_counts_and_witnesses(a_ne, z3a):
    # the idempotent affine clone of the 3-element cyclic group has exactly
    # nine ternary members: x - y + z scaled combinations
    z3_terms = term_operations(z3a, 3)
    assert len(z3_terms) == 9
    for table, witness in z3_terms:
        tab = terms.realize_table(witness, z3a)
        assert tab.table == table
    ne2 = term_operations(a_ne, 2)
    naive = _naive_binary_clone(a_ne)
    assert {t for t, _ in ne2} == naive


def _naive_binary_clone(alg):
    """Independent binary-term enumeration: close the two projection tables
    under pointwise application of the basic operations."""
    n = alg.size
    args = list(product(range(n), repeat=2))
    tables = {tuple(a[0] for a in args), tuple(a[1] for a in args)}
    changed = True
    while changed:
        changed = False
        for op in alg.operations:
            for combo in product(sorted(tables), repeat=op.arity):
                new = tuple(op.apply([c[i] for c in combo], n)
                            for i in range(len(args)))
                if new not in tables:
                    tables.add(new)
                    changed = True
    return tables


def test_unary_term_operations_identity_only(a_ne, a_nms):
    for alg in (a_ne, a_nms):
        tops = term_operations(alg, 1)
        assert len(tops) == 1
        assert tops[0][0] == tuple(range(alg.size))


def test_naive_oracle_agrees_on_small_queries(a_ne, sl2, mj2, z3a):
    for alg in (sl2, mj2, z3a, a_ne):
        for a in range(alg.size):
            for b in range(alg.size):
                if a == b:
                    continue
                q_sl = SubpowerQuery((alg, alg), ((a, b), (b, a)), (b, b))
                fast = subpower_membership(q_sl)
                slow = naive_subpower_membership(q_sl)
                assert isinstance(fast, Absent) == isinstance(slow, Absent)
                if isinstance(fast, Absent):
                    assert fast.closure_size == slow.closure_size


def test_naive_oracle_agrees_on_heterogeneous_queries(sl2, z3a, mj2):
    from idemalg.algebra import align_signatures
    rng = random.Random(31)
    aligned = align_signatures([sl2, z3a, mj2])
    for _ in range(25):
        cols = tuple(rng.choice(aligned) for _ in range(rng.randint(2, 5)))
        gens = tuple(tuple(rng.randrange(c.size) for c in cols)
                     for _ in range(rng.randint(1, 3)))
        target = tuple(rng.randrange(c.size) for c in cols)
        q = SubpowerQuery(cols, gens, target)
        fast = subpower_membership(q)
        slow = naive_subpower_membership(q)
        assert isinstance(fast, Absent) == isinstance(slow, Absent)
        if isinstance(fast, Absent):
            assert fast.closure_size == slow.closure_size
