from __future__ import annotations

import itertools
import math

import numpy as np
import pytest

from coxflat.cayley import CoxeterGroup
from coxflat.diagram import INF, dihedral, direct_sum, named, triangle
from coxflat.errors import ContractViolation
from coxflat.flats import (
    StandardFlat, dichotomy, exact_rank, extract_free_abelian, f_parallel, flat_walls, m_eucl,
    parallel_class, rank_witness,
)
from coxflat.walls import Wall

from conftest import dinf_square

AFFINE_TYPES = ["A~1", "A~2", "A~3", "B~3", "B~4", "C~2", "C~3", "D~4", "D~5", "E~6", "E~7", "E~8", "F~4", "G~2"]


def full_flat(M):
    g = CoxeterGroup(M)
    return StandardFlat.of(g, M.generators)


def wall(g, word):
    return Wall.from_reflection(g, g.element(word))


def gram_det(M, nodes):
    """Float determinant of 2B on a node subset: an oracle independent of the integer matrix."""
    A = np.array([[2.0 if i == j else (-2.0 if M.order(i, j) == INF else -2 * math.cos(math.pi / M.order(i, j)))
                   for j in nodes] for i in nodes])
    return abs(np.linalg.det(A))


def test_flat_requires_affine_components():
    g = CoxeterGroup(named("A2"))
    with pytest.raises(ContractViolation):
        StandardFlat.of(g, ["s1", "s2"])
    g = CoxeterGroup(triangle(2, 3, 7))
    with pytest.raises(ContractViolation):
        StandardFlat.of(g, "abc")


def test_flat_walls_examples():
    g = CoxeterGroup(triangle(3, 3, 3))
    F = StandardFlat.of(g, "abc")
    walls = flat_walls(F, 2)
    assert {m.root for m in walls} == set(g.reflections_up_to(1))
    d = CoxeterGroup(dinf_square())
    F = StandardFlat.of(d, ["u", "v"])
    walls = flat_walls(F, 3)
    assert len(walls) == 6
    for m in walls:
        assert set(m.reflection.labels()) <= {"u", "v"}
    assert flat_walls(StandardFlat.of(d, ["s", "t"]), 1).to_json() == [["s"], ["t"]]


def test_flat_walls_of_translated_flat():
    g = CoxeterGroup(dinf_square())
    F = StandardFlat.of(g, ["s", "t"], base="u")
    for m in flat_walls(F, 3):
        assert F.contains_wall(m)
        # the wall of u r u^-1 with r in <s, t>; u commutes with s, t so the reflection is unchanged
        assert set(m.reflection.labels()) <= {"s", "t"}


def test_f_parallel_examples():
    g = CoxeterGroup(triangle(3, 3, 3))
    F = StandardFlat.of(g, "abc")
    a = Wall.simple(g, "a")
    assert f_parallel(F, a, a)
    assert f_parallel(F, a, wall(g, "b c b"))
    assert not f_parallel(F, a, Wall.simple(g, "b"))
    M = direct_sum(triangle(3, 3, 3), dihedral(INF, ("u", "v")))
    h = CoxeterGroup(M)
    F = StandardFlat.of(h, M.generators)
    assert not f_parallel(F, Wall.simple(h, "a"), Wall.simple(h, "u"))


def test_f_parallel_rejects_foreign_wall():
    g = CoxeterGroup(dinf_square())
    F = StandardFlat.of(g, ["s", "t"])
    with pytest.raises(ContractViolation):
        f_parallel(F, Wall.simple(g, "s"), Wall.simple(g, "u"))


def test_parallel_class_examples():
    d = CoxeterGroup(dihedral(INF, ("u", "v")))
    F = StandardFlat.of(d, ["u", "v"])
    rep = parallel_class(F, Wall.simple(d, "u"), 3)
    assert len(rep.members) == 6
    # a D_inf line: consecutive walls along the chain differ by one reflection
    lengths = [len(m.reflection) for m in rep.members]
    assert sorted(lengths) == [1, 1, 3, 3, 5, 5]
    g = CoxeterGroup(triangle(3, 3, 3))
    F = StandardFlat.of(g, "abc")
    assert wall(g, "b c b") in parallel_class(F, Wall.simple(g, "a"), 2).members
    assert parallel_class(F, Wall.simple(g, "a"), 1).members == [Wall.simple(g, "a")]


def test_parallel_classes_are_chains_and_pairwise_parallel():
    g = CoxeterGroup(triangle(2, 4, 4))
    F = StandardFlat.of(g, "abc")
    walls = flat_walls(F, 5)
    for mu in list(walls.sorted())[:6]:
        members = parallel_class(F, mu, 5, walls).members
        for m, m2 in itertools.combinations(members, 2):
            assert f_parallel(F, m, m2)


def test_m_eucl_examples():
    F = full_flat(triangle(3, 3, 3))
    assert m_eucl(F, 4) == flat_walls(F, 4)
    F = full_flat(dihedral(INF, ("u", "v")))
    assert m_eucl(F, 4) == frozenset()
    M = direct_sum(triangle(3, 3, 3), dihedral(INF, ("u", "v")))
    F = full_flat(M)
    me = m_eucl(F, 4)
    assert me == {m for m in flat_walls(F, 4) if set(m.reflection.labels()) <= set("abc")}
    assert len(me) == 12


@pytest.mark.parametrize("M, case", [
    (triangle(3, 3, 3), "ii"), (triangle(2, 4, 4), "ii"), (triangle(2, 3, 6), "ii"),
    (direct_sum(triangle(3, 3, 3), dihedral(INF, ("u", "v"))), "i"),
    (dinf_square(), "i"), (dihedral(INF, ("u", "v")), "i"),
])
def test_dichotomy_cases(M, case):
    rep = dichotomy(full_flat(M), 4)
    assert rep.case == case
    if case == "ii":
        assert rep.subgroup.certified
    else:
        assert rep.M and rep.M <= rep.flat_walls and not (rep.M & rep.m_eucl)


def test_dichotomy_case_i_M_is_the_line():
    M = direct_sum(triangle(3, 3, 3), dihedral(INF, ("u", "v")))
    rep = dichotomy(full_flat(M), 4)
    assert {tuple(m.reflection.labels()) for m in rep.M} == {
        ("u",), ("v",), ("u", "v", "u"), ("v", "u", "v"), ("u", "v", "u", "v", "u"), ("v", "u", "v", "u", "v"),
        ("u", "v", "u", "v", "u", "v", "u"), ("v", "u", "v", "u", "v", "u", "v")}


def test_witness_examples():
    W = extract_free_abelian(full_flat(dihedral(INF, ("u", "v"))))
    assert W.rank == 1 and W.verified
    assert [u.labels() for u in W.generators] in ([["u", "v"]], [["v", "u"]])
    W = extract_free_abelian(full_flat(triangle(3, 3, 3)))
    assert W.rank == 2 and W.verified and W.translation_matrix == [[2, -1], [-1, 2]]
    W = extract_free_abelian(full_flat(direct_sum(triangle(3, 3, 3), triangle(3, 3, 3))))
    assert W.rank == 4 and W.verified


@pytest.mark.parametrize("name", AFFINE_TYPES)
def test_translation_lattice(name):
    M = named(name)
    F = full_flat(M)
    W = extract_free_abelian(F)
    g = F.group
    assert W.rank == M.rank - 1 and W.verified
    # commutators, independently of the witness's own check
    for u, v in itertools.combinations(W.generators, 2):
        assert g.normal_form(u.word + v.word + u.inverse().word + v.inverse().word).word == ()
    # integer matrix similar to 2B on the finite part: equal determinants
    det = round(abs(np.linalg.det(np.array(W.translation_matrix, dtype=float))))
    assert det == round(gram_det(M, range(M.rank - 1)))
    assert exact_rank(W.translation_matrix) == M.rank - 1


def test_generators_have_infinite_order():
    W = extract_free_abelian(full_flat(triangle(2, 3, 6)))
    g = W.generators[0].group
    for u in W.generators:
        x = u
        for k in range(1, 6):
            assert len(x) > 0
            x = x * u
        # translations grow linearly in length
        assert len(g.normal_form(u.word * 4)) == 4 * len(u)


def test_rank_witness_indefinite():
    W = rank_witness(CoxeterGroup(triangle(2, 3, 7)))
    assert W.rank == 1 and W.verified
    W = rank_witness(CoxeterGroup(direct_sum(triangle(3, 3, 3), named("A~1"))))
    assert W.rank == 3 and W.verified


def test_exact_rank():
    assert exact_rank([[1, 2], [2, 4]]) == 1
    assert exact_rank([[2, -1, 0], [-1, 2, -1], [0, -1, 2]]) == 3
    assert exact_rank([[0, 0]]) == 0
