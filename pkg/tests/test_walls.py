from __future__ import annotations

import random

import pytest

from coxflat.cayley import CoxeterGroup
from coxflat.diagram import INF, dihedral, named
from coxflat.errors import ContractViolation, PreconditionError
from coxflat.walls import (
    INSIDE, ON_WALL, OUTSIDE, Coset, HalfSpace, Wall, convex_hull, gallery_distance, separating_walls,
    side_of, split_convex,
)
from oracles import TitsOracle, a2_table, perm_of_word, reflections_up_to_length, separating_reflections

from conftest import orders


def test_side_of_examples(groups):
    g = groups["A2"]
    h = HalfSpace(Wall.simple(g, "s1"))
    assert side_of(h, g.identity()) == INSIDE
    assert side_of(h, g.element("s1")) == OUTSIDE
    assert side_of(h.opposite(), g.element("s1")) == INSIDE
    # s2 s1 inverts the root a_2 + a_1, not a_1: it stays on the base side of the s1-wall
    assert side_of(h, g.element("s2 s1")) == INSIDE
    assert side_of(h, Coset(g.identity(), (0,))) == ON_WALL
    assert side_of(h, Coset(g.identity(), (1,))) == INSIDE


def test_side_against_permutation_table(groups):
    # oracle: u is beyond the wall of reflection t exactly when l(t u) < l(u)
    g = groups["A2"]
    table = a2_table()
    lengths = {p: len(w) for p, w in table.items()}
    for w in table.values():
        u = g.element(w)
        for t in ((0,), (1,), (0, 1, 0)):
            beyond = lengths[perm_of_word(t + w, 2)] < len(w)
            h = HalfSpace(Wall.from_reflection(g, g.element(t)))
            assert side_of(h, u) == (OUTSIDE if beyond else INSIDE)


def test_separating_walls_examples(groups):
    g = groups["333"]
    u = g.element("a b c")
    assert separating_walls(u, u) == frozenset()
    ws = separating_walls(g.identity(), u)
    assert len(ws) == 3 and {m.root for m in ws} == g.inversion_set(u)
    # gallery a -> 1 -> b crosses the a-wall then the b-wall
    assert separating_walls(g.element("a"), g.element("b")).to_json() == [["a"], ["b"]]


@pytest.mark.parametrize("key", ["A2", "333", "244", "DD"])
def test_separating_walls_against_oracle(groups, key):
    g = groups[key]
    oracle = TitsOracle(orders(g.M))
    refl = reflections_up_to_length(oracle, 4)
    ball = list(g.enumerate_ball(3))
    rng = random.Random(7)
    for _ in range(60):
        u, v = rng.choice(ball), rng.choice(ball)
        mine = {m.reflection.word for m in separating_walls(u, v)}
        assert mine == separating_reflections(oracle, u.word, v.word, refl)


def test_gallery_distance_examples(groups):
    g = groups["A2"]
    assert gallery_distance(g.identity(), g.element("s1 s2 s1")) == 3
    d = CoxeterGroup(dihedral(INF))
    u = d.element("s")
    assert gallery_distance(u, u) == 0
    for k in range(1, 6):
        assert gallery_distance(d.identity(), d.element(["s", "t"] * k)) == 2 * k


def test_walls_along_galleries(groups):
    # every separating wall is crossed an odd number of times along any gallery, the others evenly
    g = groups["244"]
    rng = random.Random(3)
    for _ in range(40):
        word = tuple(rng.randrange(3) for _ in range(rng.randrange(1, 9)))
        counts = {}
        for i, s in enumerate(word):
            m = Wall.from_reflection(g, g.normal_form(word[:i] + (s,) + tuple(reversed(word[:i]))))
            counts[m] = counts.get(m, 0) + 1
        odd = {m for m, c in counts.items() if c % 2}
        assert odd == set(separating_walls(g.identity(), g.normal_form(word)))


def brute_hull(g, oracle, C, ball, refl):
    out = set()
    for w in ball:
        ok = True
        for t in refl:
            sides = {oracle.length(t + c.word) < len(c.word) for c in C}
            if len(sides) == 1 and (oracle.length(t + w.word) < len(w.word)) not in sides:
                ok = False
                break
        if ok:
            out.add(w)
    return out


def test_hull_examples(groups):
    g = groups["A2"]
    ball = g.enumerate_ball(3)
    hull = convex_hull([g.identity(), g.element("s1 s2 s1")], ball)
    assert len(hull) == 6 and not hull.ball_relative
    assert set(convex_hull([g.element("s1")], ball)) == {g.element("s1")}
    assert set(convex_hull([g.identity(), g.element("s1")], ball)) == {g.identity(), g.element("s1")}


@pytest.mark.parametrize("key", ["333", "DD"])
def test_hull_against_brute_force(groups, key):
    g = groups[key]
    oracle = TitsOracle(orders(g.M))
    ball = g.enumerate_ball(3)
    refl = reflections_up_to_length(oracle, 3)
    elems = list(ball)
    rng = random.Random(11)
    for _ in range(8):
        C = rng.sample(elems, rng.randrange(1, 4))
        hull = convex_hull(C, ball)
        assert hull.ball_relative
        assert set(hull) == brute_hull(g, oracle, C, elems, refl)


def test_hull_requires_ball(groups):
    g = groups["333"]
    with pytest.raises(ContractViolation):
        convex_hull([g.element("a b c a")], g.enumerate_ball(2))


def test_split_examples(groups):
    g = groups["DD"]
    x, y = g.identity(), g.element("s u")
    assert split_convex(x, y, [Wall.simple(g, "s")]) == g.element("u")
    assert split_convex(x, y, []) == y
    assert split_convex(x, y, separating_walls(x, y)) == x


def components_of_noncommuting(g, walls):
    walls = list(walls)
    parent = list(range(len(walls)))

    def find(i):
        while parent[i] != i:
            i = parent[i]
        return i
    for i in range(len(walls)):
        for j in range(i):
            a, b = walls[i].reflection, walls[j].reflection
            if a * b != b * a:
                parent[find(i)] = find(j)
    comps = {}
    for i, m in enumerate(walls):
        comps.setdefault(find(i), []).append(m)
    return list(comps.values())


def test_split_invalid_witness(groups):
    g = groups["A2"]
    x, y = g.identity(), g.element("s1 s2")
    with pytest.raises(PreconditionError) as exc:
        split_convex(x, y, [Wall.simple(g, "s1")])
    m, mu = exc.value.witness
    assert m == Wall.simple(g, "s1") and mu.reflection.labels() == ["s1", "s2", "s1"]
    with pytest.raises(PreconditionError) as exc:
        split_convex(x, y, [Wall.simple(g, "s2")])
    assert exc.value.witness == (Wall.simple(g, "s2"),)


def test_split_random_small(groups):
    g = groups["244"]
    ball = list(g.enumerate_ball(6))
    rng = random.Random(5)
    for _ in range(50):
        x, y = rng.choice(ball), rng.choice(ball)
        comps = components_of_noncommuting(g, separating_walls(x, y))
        M = {m for c in comps if rng.random() < 0.5 for m in c}
        z = split_convex(x, y, M)
        assert separating_walls(y, z) == M
        assert separating_walls(x, z) == separating_walls(x, y) - M
