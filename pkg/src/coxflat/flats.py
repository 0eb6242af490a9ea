"""Standard flats ``w.|W_T|``, their walls, parallel classes and free abelian witnesses.

A flat is represented by a base element ``w`` and a subset ``T`` whose diagram
components are all affine. Its walls are the ``w``-translates of the walls of
``W_T``. Two walls of the flat are F-parallel when they are equal or belong to
the same affine component with an infinite-order product: inside one affine
component the walls are the hyperplanes of a discrete Euclidean reflection
group, and distinct hyperplanes there are parallel iff the product has
infinite order. Walls of different components always cross.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from typing import Iterable, Sequence

from .cayley import CoxeterGroup, Element, Root
from .diagram import AFFINE, INDEFINITE, SPHERICAL, INF, classify, components, flat_rank
from .errors import ContractViolation, NotFoundError, VerificationError
from .numbers import Surd, to_rational
from .subgroups import (
    SEGMENT, chain_kind, is_euclidean_triangle, order_of_product, reflection_subgroup,
    root_product_order,
)
from .walls import Wall, WallSet

PARTNER_SEARCH_LEVELS = 64


@dataclass(frozen=True)
class StandardFlat:
    group: CoxeterGroup
    base: Element
    T: tuple  # generator indices, sorted

    def __post_init__(self):
        M = self.group.M
        T = tuple(sorted(set(self.T)))
        object.__setattr__(self, "T", T)
        if not T:
            raise ContractViolation("StandardFlat: T must be nonempty")
        for part in self.components():
            c = classify(M, part)
            if c.kind != AFFINE:
                raise ContractViolation(
                    f"StandardFlat: component {M.labels(part)} of T is {c.kind}, not Affine")

    @classmethod
    def of(cls, group: CoxeterGroup, T: Iterable, base=()) -> "StandardFlat":
        base = base if isinstance(base, Element) else group.element(base)
        return cls(group, base, group.M.indices(T))

    def components(self) -> list:
        M = self.group.M
        return [M.indices(part) for part in components(M, M.labels(self.T))]

    @property
    def dimension(self) -> int:
        return sum(len(c) - 1 for c in self.components())

    def labels(self) -> list:
        return self.group.M.labels(self.T)

    def local_letters(self, m: Wall) -> set:
        """Letters of ``w^-1 r_m w``; a subset of ``T`` exactly when ``m`` is a wall of F."""
        g = self.group
        inv = tuple(reversed(self.base.word))
        return set(g.normal_form(inv + m.reflection.word + self.base.word).word)

    def contains_wall(self, m: Wall) -> bool:
        return self.local_letters(m) <= set(self.T)

    def component_of(self, m: Wall) -> tuple:
        letters = self.local_letters(m)
        for part in self.components():
            if letters <= set(part):
                return part
        raise ContractViolation(f"wall {m.reflection} is not a wall of the flat {self.labels()}")

    def to_json(self) -> dict:
        return {"base": self.base.labels(), "T": self.labels(), "dimension": self.dimension}


def _subsystem_roots(g: CoxeterGroup, T: Sequence[int], levels: int) -> list:
    """Positive roots of ``W_T`` reached from its simple roots in fewer than ``levels`` steps."""
    out = [g.simple_root(t) for t in T]
    seen = set(out)
    frontier = list(out)
    for _ in range(levels - 1):
        nxt = []
        for r in frontier:
            v = list(r.coords)
            for s in T:
                w = g._make_root(g._apply_simple(s, v))
                if w in seen or not g.is_positive(w):
                    continue
                seen.add(w)
                nxt.append(w)
        if not nxt:
            break
        out.extend(nxt)
        frontier = nxt
    return out


def flat_walls(F: StandardFlat, window: int) -> WallSet:
    """Walls of F in the window: base-translates of ``W_T`` roots within ``window`` levels."""
    if window < 1:
        raise ContractViolation("flat_walls: window must be >= 1")
    g = F.group
    return WallSet(Wall(g, g.act(F.base, r)) for r in _subsystem_roots(g, F.T, window))


def f_parallel(F: StandardFlat, m: Wall, m2: Wall) -> bool:
    if m == m2:
        F.component_of(m)
        return True
    if F.component_of(m) != F.component_of(m2):
        return False
    return order_of_product(m, m2) == INF


@dataclass
class ParallelClassReport:
    pivot: Wall
    members: list
    component: tuple

    def to_json(self, M=None) -> dict:
        return {
            "pivot": self.pivot.to_json(),
            "members": [m.to_json() for m in self.members],
            "component": list(self.component),
        }


def parallel_class(F: StandardFlat, mu: Wall, window: int, walls: WallSet | None = None) -> ParallelClassReport:
    walls = flat_walls(F, window) if walls is None else walls
    if mu not in walls:
        raise ContractViolation(f"parallel_class: {mu.reflection} is not a wall of F in window {window}")
    comp = F.component_of(mu)
    members = [m for m in walls.sorted() if m == mu or f_parallel(F, m, mu)]
    ck = chain_kind(members)
    if ck.kind != SEGMENT:
        raise VerificationError(
            f"parallel class of {mu.reflection} is not a chain", counterexample=ck.witness)
    return ParallelClassReport(mu, ck.order, tuple(F.group.M.labels(comp)))


def _parallel_classes(F: StandardFlat, walls: WallSet) -> list:
    classes = []
    for m in walls.sorted():
        for cl in classes:
            if f_parallel(F, cl[0], m):
                cl.append(m)
                break
        else:
            classes.append([m])
    return classes


@dataclass
class MEuclReport:
    walls: WallSet
    triangles: dict  # class pivot -> (transversal wall, tag)
    uncertified: bool = False


def m_eucl_report(F: StandardFlat, window: int) -> MEuclReport:
    """Walls of the window whose parallel class meets a transversal wall in a Euclidean triangle.

    Parallel partners and transversals are any walls of F, so they are searched
    in a window twice as deep; only walls of the original window are reported.
    """
    if window < 2:
        raise ContractViolation("m_eucl: window must be >= 2")
    walls = flat_walls(F, window)
    wide = flat_walls(F, 2 * window)
    ordered = wide.sorted()
    out = set()
    triangles = {}
    uncertified = False
    # P_F(mu) only depends on the class of mu, so one search per class
    for cl in _parallel_classes(F, wide):
        if not any(m in walls for m in cl):
            continue
        base_sub = reflection_subgroup(cl)
        if not base_sub.certified:
            uncertified = True
        canon = base_sub.canonical
        members = set(cl)
        for mu2 in ordered:
            if mu2 in members:
                continue
            S = reflection_subgroup(list(canon) + [mu2])
            if not S.certified:
                uncertified = True
                continue
            flag, tag = is_euclidean_triangle(S)
            if flag:
                out.update(m for m in cl if m in walls)
                triangles[cl[0]] = (mu2, tag)
                break
    return MEuclReport(WallSet(out), triangles, uncertified)


def m_eucl(F: StandardFlat, window: int) -> WallSet:
    return m_eucl_report(F, window).walls


@dataclass
class DichotomyReport:
    case: str  # "i" or "ii"
    M: WallSet | None
    flat_walls: WallSet
    m_eucl: WallSet
    subgroup: object = None
    window: int = 0

    def to_json(self) -> dict:
        out = {
            "case": self.case,
            "window": self.window,
            "window_relative": True,
            "flat_walls": len(self.flat_walls),
            "m_eucl": len(self.m_eucl),
        }
        if self.M is not None:
            out["M"] = self.M.to_json()
        if self.subgroup is not None:
            out["subgroup"] = self.subgroup.to_json()
        return out


def _commute(g: CoxeterGroup, a: Element, b: Element) -> bool:
    return not g.normal_form(a.word + b.word + a.word + b.word).word


def dichotomy(F: StandardFlat, window: int) -> DichotomyReport:
    g = F.group
    walls = flat_walls(F, window)
    me = m_eucl(F, window)
    if me == walls:
        S = reflection_subgroup(walls)
        if not S.certified:
            raise VerificationError("dichotomy (ii): reflection subgroup of M(F) is not certified")
        for part in components(S.matrix):
            c = classify(S.matrix, part)
            if c.kind != AFFINE:
                raise VerificationError(
                    f"dichotomy (ii): component {part} of W(M(F)) is {c.kind}",
                    counterexample=S.matrix.to_json())
        return DichotomyReport("ii", None, walls, me, S, window)
    first = next(m for m in walls.sorted() if m not in me)
    M = WallSet(m for m in walls if f_parallel(F, first, m))
    for m in M:
        for mu in walls:
            if mu in M:
                continue
            if not _commute(g, m.reflection, mu.reflection):
                raise VerificationError(
                    f"dichotomy (i): r_{m.reflection} and r_{mu.reflection} do not commute",
                    counterexample=(m, mu))
    return DichotomyReport("i", M, walls, me, None, window)


# -- free abelian witnesses ---------------------------------------------

@dataclass
class ZnWitness:
    generators: list
    rank: int
    translation_matrix: list
    commutators_checked: int
    commutators_trivial: bool
    matrix_rank: int
    components: list = field(default_factory=list)

    @property
    def verified(self) -> bool:
        return self.commutators_trivial and self.matrix_rank == self.rank == len(self.generators)

    def to_json(self) -> dict:
        return {
            "generators": [u.labels() for u in self.generators],
            "rank": self.rank,
            "commutators": {"pairs_checked": self.commutators_checked,
                            "all_trivial": self.commutators_trivial},
            "translation_matrix": [[int(x) for x in row] for row in self.translation_matrix],
            "matrix_rank": self.matrix_rank,
            "verified": self.verified,
            "components": self.components,
        }


def exact_rank(rows: list) -> int:
    """Rank of a rational matrix by fraction-exact elimination."""
    A = [[Fraction(x) for x in row] for row in rows]
    rank = 0
    ncols = len(A[0]) if A else 0
    for col in range(ncols):
        piv = next((r for r in range(rank, len(A)) if A[r][col] != 0), None)
        if piv is None:
            continue
        A[rank], A[piv] = A[piv], A[rank]
        for r in range(len(A)):
            if r != rank and A[r][col] != 0:
                f = A[r][col] / A[rank][col]
                A[r] = [x - f * y for x, y in zip(A[r], A[rank])]
        rank += 1
    return rank


def _scalar_ratio(g: CoxeterGroup, u: Root, v: Root):
    """``u / v`` for proportional vectors."""
    for x, y in zip(u.coords, v.coords):
        if g.field.sign(y) != 0:
            q = g.field.div(x, y)
            for x2, y2 in zip(u.coords, v.coords):
                if g.field.sign(x2 - q * y2) != 0:
                    raise VerificationError("imaginary directions are not proportional")
            return q
    raise VerificationError("zero imaginary direction")


def _as_integer(x) -> int:
    if not isinstance(x, (Surd, int, Fraction)):
        # interval carrier: accept only an enclosure of a single integer
        k = round(float(x.mid))
        if not (x.a <= k <= x.b) or float(x.delta) > 1e-6:
            raise VerificationError(f"translation coordinate {x} is not an integer")
        return k
    q = to_rational(x)
    if isinstance(q, Fraction) and q.denominator != 1:
        raise VerificationError(f"translation coordinate {q} is not an integer")
    return int(q)


def _affine_translations(g: CoxeterGroup, comp: tuple):
    """Translations ``r_a r_b`` for ``k`` independent directions of an affine component.

    The last node is dropped; each remaining simple root ``a_j`` is paired with
    the lowest root ``b_j`` of the component with ``2B(a_j, b_j) = -2``.
    Returns (elements in the component, integer coordinate matrix).
    """
    two = g.field.from_int(2)
    keep = comp[:-1]
    roots = _subsystem_roots(g, comp, PARTNER_SEARCH_LEVELS)
    partners = []
    for a in keep:
        alpha = g.simple_root(a)
        beta = next((r for r in roots if g.field.sign(g.pairing(alpha, r) + two) == 0), None)
        if beta is None:
            raise NotFoundError(f"no parallel partner for generator {g.M.generators[a]}")
        partners.append((alpha, beta))
    deltas = [g._make_root(tuple(x + y for x, y in zip(a.coords, b.coords))) for a, b in partners]
    ratios = [_scalar_ratio(g, d, deltas[0]) for d in deltas]
    elems = []
    for (alpha, beta), a in zip(partners, keep):
        elems.append(g.normal_form((a,) + g.reflection_word(beta)))
    # t_i(a_j) = a_j + 2B(a_i, a_j) c_i delta = a_j + n_ij delta_j
    rows = []
    for i, (ai, _) in enumerate(partners):
        row = []
        for j, (aj, _) in enumerate(partners):
            val = g.field.div(g.pairing(ai, aj) * ratios[i], ratios[j])
            row.append(_as_integer(val))
        rows.append(row)
    return elems, rows


def _infinite_order_element(g: CoxeterGroup, comp: tuple):
    """``r_a r_b`` for the first root pair of the component with ``|2B(a, b)| >= 2``."""
    two = g.field.from_int(2)
    for levels in (1, 2, 4, 8, 16):
        roots = _subsystem_roots(g, comp, levels)
        for i, a in enumerate(roots):
            for b in roots[i + 1:]:
                c = g.pairing(a, b)
                if g.field.sign(c - two) > 0 or g.field.sign(c + two) < 0:
                    return g.normal_form(g.reflection_word(a) + g.reflection_word(b))
    raise NotFoundError(f"no infinite-order product found in component {g.M.labels(comp)}")


def _conj(g: CoxeterGroup, w: Element, u: Element) -> Element:
    return g.normal_form(w.word + u.word + tuple(reversed(w.word)))


def _assemble(g: CoxeterGroup, blocks: list, comps_json: list) -> ZnWitness:
    gens = [u for elems, _ in blocks for u in elems]
    n = len(gens)
    matrix = [[0] * n for _ in range(n)]
    off = 0
    for elems, rows in blocks:
        for i, row in enumerate(rows):
            for j, x in enumerate(row):
                matrix[off + i][off + j] = x
        off += len(elems)
    checked, trivial = 0, True
    for i in range(n):
        for j in range(i + 1, n):
            checked += 1
            a, b = gens[i], gens[j]
            comm = g.normal_form(a.word + b.word + tuple(reversed(a.word)) + tuple(reversed(b.word)))
            if comm.word:
                trivial = False
    mrank = exact_rank(matrix) if n else 0
    return ZnWitness(gens, n, matrix, checked, trivial, mrank, comps_json)


def extract_free_abelian(F: StandardFlat) -> ZnWitness:
    """``dim F`` commuting translations of the flat with an exact independence certificate."""
    if F.dimension < 1:
        raise ContractViolation("extract_free_abelian: flat dimension must be >= 1")
    g = F.group
    blocks, comps_json = [], []
    for comp in F.components():
        if classify(g.M, comp).kind != AFFINE:
            raise ContractViolation(f"component {g.M.labels(comp)} is not affine")
        elems, rows = _affine_translations(g, comp)
        elems = [_conj(g, F.base, u) for u in elems]
        blocks.append((elems, rows))
        comps_json.append({"generators": g.M.labels(comp), "kind": AFFINE, "rank": len(elems)})
    return _assemble(g, blocks, comps_json)


def rank_witness(g: CoxeterGroup) -> ZnWitness:
    """Witness for the flat rank of the whole group.

    Uses the maximizing subset of the rank formula: each affine component
    gives its translations, each indefinite component one infinite-order
    element ``r_a r_b`` with ``|B(a, b)| > 1``, certified by that inequality.
    """
    report = flat_rank(g.M)
    blocks, comps_json = [], []
    for part in components(g.M, report.witness):
        comp = g.M.indices(part)
        kind = classify(g.M, comp).kind
        if kind == SPHERICAL:
            continue
        if kind == AFFINE:
            elems, rows = _affine_translations(g, comp)
        else:
            elems, rows = [_infinite_order_element(g, comp)], [[1]]
        blocks.append((elems, rows))
        comps_json.append({"generators": list(part), "kind": kind, "rank": len(elems)})
    return _assemble(g, blocks, comps_json)


__all__ = [
    "StandardFlat", "flat_walls", "f_parallel", "ParallelClassReport", "parallel_class",
    "m_eucl", "m_eucl_report", "MEuclReport", "DichotomyReport", "dichotomy", "ZnWitness",
    "extract_free_abelian", "rank_witness", "exact_rank",
]
