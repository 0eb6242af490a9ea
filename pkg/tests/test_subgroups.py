from __future__ import annotations

import itertools
import random

import pytest

from coxflat.cayley import CoxeterGroup
from coxflat.diagram import INF, dihedral, named, triangle
from coxflat.errors import UncertifiedError
from coxflat.subgroups import (
    LINE, NOT_A_CHAIN, SEGMENT, chain_kind, is_euclidean_triangle, order_of_product, parabolic_closure,
    reflection_subgroup, satisfies_dyer_criterion,
)
from coxflat.walls import Wall

from conftest import dinf_square


def wall(g, word):
    return Wall.from_reflection(g, g.element(word))


def generated_size(g, reflections, cap=5000):
    """Closure of a set of elements under right multiplication by the generators."""
    gens = [g.element(w) for w in reflections]
    seen = {g.identity()}
    frontier = [g.identity()]
    while frontier:
        nxt = []
        for x in frontier:
            for r in gens:
                y = x * r
                if y not in seen:
                    seen.add(y)
                    nxt.append(y)
        frontier = nxt
        assert len(seen) < cap
    return len(seen)


def test_order_examples(groups):
    g = groups["A2"]
    assert order_of_product(Wall.simple(g, "s1"), Wall.simple(g, "s2")) == 3
    t = groups["333"]
    assert order_of_product(Wall.simple(t, "a"), wall(t, "b c b")) == INF
    d = groups["DD"]
    assert order_of_product(Wall.simple(d, "s"), Wall.simple(d, "u")) == 2


def test_subgroup_examples(groups):
    g = groups["A2"]
    S = reflection_subgroup([Wall.simple(g, "s1"), Wall.simple(g, "s2")])
    assert S.certified and S.matrix.orders == ((1, 3), (3, 1))
    assert [m.to_json() for m in S.canonical] == [["s1"], ["s2"]]
    t = groups["333"]
    S = reflection_subgroup([Wall.simple(t, "a"), wall(t, "b c b")])
    assert S.certified and S.rank == 2 and S.matrix.order(0, 1) == INF
    assert set(S.canonical) == {Wall.simple(t, "a"), wall(t, "b c b")}
    S = reflection_subgroup([Wall.simple(t, x) for x in "abc"])
    assert S.matrix.orders == ((1, 3, 3), (3, 1, 3), (3, 3, 1))


def test_redundant_generators_reduce(groups):
    t = groups["333"]
    S = reflection_subgroup([Wall.simple(t, "a"), Wall.simple(t, "b"), wall(t, "a b a")])
    assert S.rank == 2 and S.matrix.order(0, 1) == 3


@pytest.mark.parametrize("name", ["A3", "B3", "H3"])
def test_subgroup_order_matches_brute_force(name):
    # oracle: closure under multiplication in the finite group, against the order of the induced group
    g = CoxeterGroup(named(name), max_radius=16)
    refl = [g.reflection(r) for r in g.reflections_up_to(20)]
    rng = random.Random(len(name))
    certified = 0
    for _ in range(12):
        pick = rng.sample(refl, rng.randrange(1, 4))
        S = reflection_subgroup([Wall.from_reflection(g, r) for r in pick])
        # interval arithmetic (label 5) cannot certify an exactly orthogonal pair
        assert S.certified or not g.exact
        if not S.certified:
            continue
        certified += 1
        sub = CoxeterGroup(S.matrix, max_radius=16).enumerate_ball(16)
        assert sub.complete
        assert len(sub) == generated_size(g, [r.word for r in pick])
    assert certified >= 4


def test_random_triangle_subgroups_certify(groups):
    t = groups["244"]
    refl = [t.reflection(r) for r in t.reflections_up_to(4)]
    rng = random.Random(2)
    for _ in range(15):
        S = reflection_subgroup([Wall.from_reflection(t, r) for r in rng.sample(refl, 3)])
        assert S.certified
        # canonical generators pairwise meet at angles pi/m or are parallel: pairing <= 0
        for a, b in itertools.combinations(S.canonical, 2):
            assert t.field.sign(t.pairing(a.root, b.root)) <= 0
        assert satisfies_dyer_criterion(S, t.reflections_up_to(3))
        for m in S.canonical:
            assert S.contains_wall(m) is not None


def test_conjugate_triangle_is_euclidean(groups):
    t = groups["333"]
    w = t.element("a b")
    walls = [Wall.simple(t, x).translate(w) for x in "abc"]
    flag, tag = is_euclidean_triangle(reflection_subgroup(walls))
    assert flag and tag == "A~2"


def test_triangle_examples(groups):
    assert is_euclidean_triangle(reflection_subgroup([Wall.simple(groups["333"], x) for x in "abc"])) == (True, "A~2")
    g = groups["A2"]
    assert is_euclidean_triangle(reflection_subgroup([Wall.simple(g, "s1"), Wall.simple(g, "s2")]))[0] is False
    d = CoxeterGroup(dihedral(INF))
    assert is_euclidean_triangle(reflection_subgroup([Wall.simple(d, "s"), Wall.simple(d, "t")]))[0] is False


def test_triangle_refuses_uncertified(groups):
    t = groups["333"]
    S = reflection_subgroup([Wall.simple(t, "a"), wall(t, "b c a c b")], depth=0)
    assert not S.certified and S.certification == "depth-exhausted"
    with pytest.raises(UncertifiedError):
        is_euclidean_triangle(S)


def test_chain_examples(groups):
    t = groups["333"]
    a = Wall.simple(t, "a")
    assert chain_kind([a]).kind == SEGMENT
    res = chain_kind([a, wall(t, "b c b")])
    assert res.kind == SEGMENT and len(res.order) == 2
    g = groups["A2"]
    res = chain_kind([Wall.simple(g, "s1"), Wall.simple(g, "s2")])
    assert res.kind == NOT_A_CHAIN and res.witness == (Wall.simple(g, "s1"), Wall.simple(g, "s2"))


def test_chain_orders_dinf_walls():
    d = CoxeterGroup(dihedral(INF))
    # walls of D_inf along the line: ... tst, t, s, sts, ststs ...
    line = [wall(d, w) for w in ("t s t", "t", "s", "s t s", "s t s t s")]
    shuffled = [line[i] for i in (2, 4, 0, 3, 1)]
    res = chain_kind(shuffled)
    assert res.kind == SEGMENT
    assert res.order in (line, line[::-1])
    assert chain_kind(line, indexing="line").kind == LINE
    assert chain_kind(shuffled, indexing="line").kind == NOT_A_CHAIN


def test_chain_rejects_three_parallel_without_betweenness():
    # three pairwise disjoint walls of a triangle group that bound a common region
    t = CoxeterGroup(triangle(INF, INF, INF))
    res = chain_kind([Wall.simple(t, x) for x in "abc"])
    assert res.kind == NOT_A_CHAIN and len(res.witness) == 3


def test_parabolic_closure_examples(groups):
    t = groups["333"]
    ball = t.enumerate_ball(4)
    pc = parabolic_closure([Wall.simple(t, "a")], ball)
    assert pc.base.word == () and pc.T == ("a",)
    pc = parabolic_closure([Wall.simple(t, "a"), wall(t, "b c b")], ball)
    assert pc.base.word == () and set(pc.T) == {"a", "b", "c"}
    d = CoxeterGroup(dinf_square())
    pc = parabolic_closure([Wall.simple(d, "s"), Wall.simple(d, "t")], d.enumerate_ball(3))
    assert set(pc.T) == {"s", "t"}


def test_parabolic_closure_of_conjugate(groups):
    t = groups["333"]
    m = wall(t, "b c a c b")
    pc = parabolic_closure([m], t.enumerate_ball(4))
    assert len(pc.T) == 1
    # r_m = w s w^-1 with s in T
    s = t.generator(pc.T[0])
    assert t.conjugate(pc.base, s) == m.reflection


def test_subgroup_json_shape(groups):
    t = groups["333"]
    doc = reflection_subgroup([Wall.simple(t, "a"), wall(t, "b c b")]).to_json()
    assert set(doc) == {"canonical_generators", "labels", "matrix", "certification", "inputs"}
    assert doc["labels"] == ["r1", "r2"] and doc["matrix"]["orders"] == [[1, 0], [0, 1]]
