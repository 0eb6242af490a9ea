"""Reflection subgroups: canonical generators, induced matrices, triangles, chains, closures.

Canonical generators are found by pairwise reduction. A set of positive roots
in which every pair ``(a, b)`` has ``2B(a, b) = -2cos(pi/n)`` or
``2B(a, b) <= -2`` is the canonical simple system of the subgroup it generates
(the Deodhar-Dyer criterion). Any violating pair is replaced by the canonical
pair of the rank-2 subgroup it generates, which keeps the subgroup and lowers
the roots, so the loop terminates.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from typing import Iterable, Sequence

from .cayley import Ball, CoxeterGroup, Element, Root
from .diagram import AFFINE, INF, CoxeterMatrix, classify, components
from .errors import NotFoundError, UncertifiedError
from .walls import Wall, WallSet, chamber_side

ORDER_CAP = 10_000
DEFAULT_DEPTH = 256

EUCLIDEAN_TRIANGLES = {
    (3, 3, 3): "A~2",
    (2, 4, 4): "C~2",
    (2, 3, 6): "G~2",
}


# -- order of products ---------------------------------------------------

def _root_of(x):
    return x.root if isinstance(x, Wall) else x


def _is_infinite_pairing(g: CoxeterGroup, c) -> bool:
    two = g.field.from_int(2)
    return g.field.sign(c - two) >= 0 or g.field.sign(c + two) <= 0


def root_product_order(g: CoxeterGroup, a: Root, b: Root):
    if a == b:
        return 1
    c = g.pairing(a, b)
    if _is_infinite_pairing(g, c):
        return INF
    x, y = a, b
    for k in range(1, ORDER_CAP + 1):
        # apply r_a r_b
        x = g.reflect(a, g.reflect(b, x))
        y = g.reflect(a, g.reflect(b, y))
        if x == a and y == b:
            return k
    raise RuntimeError(
        f"order_of_product: no return after {ORDER_CAP} steps although |B| < 1 (arithmetic bug)")


def order_of_product(m, m2):
    """Order of ``r_m r_m'``; ``INF`` exactly when ``|B(a, b)| >= 1``."""
    g = m.group
    return root_product_order(g, _root_of(m), _root_of(m2))


# -- rank-2 canonical pairs ---------------------------------------------

def _dihedral_orbit(g: CoxeterGroup, a: Root, b: Root) -> list:
    seen = {a: None, b: None}
    frontier = [a, b]
    while frontier:
        nxt = []
        for r in frontier:
            for s in (a, b):
                v = g.positive(g.reflect(s, r))
                if v not in seen:
                    seen[v] = None
                    nxt.append(v)
                    if len(seen) > ORDER_CAP:
                        raise RuntimeError("dihedral orbit did not close")
        frontier = nxt
    return list(seen)


def _farther(g: CoxeterGroup, a: Root, b: Root) -> bool:
    """True when the wall of ``b`` lies beyond the wall of ``a`` as seen from the base chamber."""
    wb = Wall(g, b)
    rep = wb.adjacent_chambers()[0]
    return g.root_sign(g.act_inverse(rep, a)) < 0


def dihedral_canonical_pair(g: CoxeterGroup, a: Root, b: Root) -> tuple:
    """Canonical simple roots of the subgroup generated by ``r_a`` and ``r_b``."""
    two = g.field.from_int(2)
    for _ in range(ORDER_CAP):
        c = g.pairing(a, b)
        if g.field.sign(c + two) <= 0:
            return a, b
        if g.field.sign(c - two) < 0:
            orbit = _dihedral_orbit(g, a, b)
            canon = [r for r in orbit
                     if all(g.is_positive(g.reflect(r, q)) for q in orbit if q != r)]
            if len(canon) != 2:
                raise RuntimeError(f"finite dihedral subsystem with {len(canon)} canonical roots")
            return tuple(canon)
        # nested parallel walls: reflect the farther one through the nearer one
        if _farther(g, a, b):
            b = g.positive(g.reflect(a, b))
        else:
            a = g.positive(g.reflect(b, a))
    raise RuntimeError("dihedral reduction did not terminate")


# -- reflection subgroups --------------------------------------------------

@dataclass
class ReflectionSubgroup:
    group: CoxeterGroup
    inputs: WallSet
    canonical: list
    matrix: CoxeterMatrix
    certified: bool
    expressions: dict = field(default_factory=dict)
    note: str = ""

    @property
    def certification(self) -> str:
        return "certified" if self.certified else "depth-exhausted"

    @property
    def rank(self) -> int:
        return len(self.canonical)

    def contains_wall(self, m: Wall, depth: int = DEFAULT_DEPTH):
        """Word in canonical generators for ``r_m``, or ``None`` if ``r_m`` is not in the subgroup."""
        return _express(self.group, [w.root for w in self.canonical], m.root, depth)

    def to_json(self) -> dict:
        return {
            "canonical_generators": [m.to_json() for m in self.canonical],
            "labels": list(self.matrix.generators),
            "matrix": self.matrix.to_json(),
            "certification": self.certification,
            "inputs": self.inputs.to_json(),
        }


def _express(g: CoxeterGroup, simple: Sequence[Root], gamma: Root, depth: int):
    """Descend ``gamma`` inside the subsystem; returns the index word of ``r_gamma``."""
    gamma = g.positive(gamma)
    path = []
    for _ in range(depth):
        for i, p in enumerate(simple):
            if p == gamma:
                return path + [i] + path[::-1]
        for i, p in enumerate(simple):
            if g.field.sign(g.pairing(p, gamma)) > 0:
                nxt = g.reflect(p, gamma)
                if not g.is_positive(nxt):
                    return None
                path.append(i)
                gamma = nxt
                break
        else:
            return None
    return None


def reflection_subgroup(M: Iterable[Wall], depth: int = DEFAULT_DEPTH) -> ReflectionSubgroup:
    """Canonical generators and induced matrix of ``W(M)``.

    ``depth`` caps the reduction steps and the verification descents; running
    out leaves the result flagged depth-exhausted.
    """
    walls = list(dict.fromkeys(M))
    if not walls:
        raise ValueError("reflection_subgroup: M must be nonempty")
    g = walls[0].group
    ambiguous0 = getattr(g.field, "ambiguous", 0)
    roots = [m.root for m in walls]
    exhausted = False
    simple_idx = [g.simple_index(r) for r in roots]
    if all(i is not None for i in simple_idx):
        canon = roots
    else:
        canon = list(dict.fromkeys(roots))
        steps = 0
        while True:
            bad = None
            for i, j in itertools.combinations(range(len(canon)), 2):
                pair = dihedral_canonical_pair(g, canon[i], canon[j])
                if set(pair) != {canon[i], canon[j]}:
                    bad = (i, j, pair)
                    break
            if bad is None:
                break
            steps += 1
            if steps > depth * max(1, len(canon)):
                exhausted = True
                break
            i, j, pair = bad
            rest = [r for k, r in enumerate(canon) if k not in (i, j)]
            canon = list(dict.fromkeys(rest + list(pair)))
    canon_walls = sorted((Wall(g, r) for r in canon), key=Wall.sort_key)
    canon = [m.root for m in canon_walls]
    k = len(canon)
    labels = tuple(f"r{i + 1}" for i in range(k))
    orders = tuple(tuple(1 if i == j else root_product_order(g, canon[i], canon[j])
                         for j in range(k)) for i in range(k))
    matrix = CoxeterMatrix(labels, orders)
    expressions = {}
    verified = not exhausted
    for m in walls:
        word = _express(g, canon, m.root, depth)
        if word is None:
            verified = False
            continue
        flat = tuple(x for i in word for x in canon_walls[i].reflection.word)
        if g.normal_form(flat) != m.reflection:
            verified = False
            continue
        expressions[m] = word
    # interval signs that straddled zero during this computation void the certificate
    certified = verified and getattr(g.field, "ambiguous", 0) == ambiguous0
    return ReflectionSubgroup(g, WallSet(walls), canon_walls, matrix, certified, expressions)


def satisfies_dyer_criterion(G: ReflectionSubgroup, window_roots: Iterable[Root]) -> bool:
    """Each canonical reflection keeps every other positive subsystem root in the window positive."""
    g = G.group
    canon = [m.root for m in G.canonical]
    for r in window_roots:
        if _express(g, canon, r, DEFAULT_DEPTH) is None:
            continue
        for p in canon:
            if p != r and not g.is_positive(g.reflect(p, r)):
                return False
    return True


# -- Euclidean triangles -------------------------------------------------

def euclidean_triangle_tag(M: CoxeterMatrix):
    """``A~2`` / ``C~2`` / ``G~2`` for the three affine rank-3 matrices, else ``None``."""
    if M.rank != 3:
        return None
    labels = tuple(sorted(M.orders[i][j] for i, j in ((0, 1), (1, 2), (0, 2))))
    tag = EUCLIDEAN_TRIANGLES.get(labels)
    connected = len(components(M)) == 1
    if connected:
        kind = classify(M).kind
        if (kind == AFFINE) != (tag is not None):
            raise AssertionError(f"triangle table and classify disagree on {labels}")
    elif tag is not None:
        raise AssertionError(f"Euclidean triangle {labels} reported disconnected")
    return tag


def is_euclidean_triangle(G: ReflectionSubgroup) -> tuple:
    """``(flag, tag)``; refuses subgroups whose canonical generators are not certified."""
    if not G.certified:
        raise UncertifiedError(
            "is_euclidean_triangle: reflection subgroup is not certified (depth-exhausted)")
    tag = euclidean_triangle_tag(G.matrix)
    return tag is not None, tag


# -- chains of walls -------------------------------------------------------

SEGMENT = "Segment"
RAY = "Ray"
LINE = "Line"
NOT_A_CHAIN = "NotAChain"


@dataclass
class ChainKind:
    kind: str
    order: list = field(default_factory=list)
    witness: tuple = ()
    window_only: bool = False

    @property
    def is_chain(self) -> bool:
        return self.kind != NOT_A_CHAIN

    def to_json(self) -> dict:
        return {
            "kind": self.kind,
            "order": [m.to_json() for m in self.order],
            "witness": [m.to_json() for m in self.witness],
            "window_only": self.window_only,
        }


def chain_kind(P: Sequence[Wall], indexing: str | None = None) -> ChainKind:
    """Decide whether pairwise distinct walls form a chain and order them.

    With ``indexing`` of ``"ray"`` or ``"line"`` the input is a window of an
    indexed family and must already be listed in chain order; the verdict is
    certified for that window only.
    """
    P = list(P)
    if len(set(P)) != len(P):
        raise ValueError("chain_kind: walls must be pairwise distinct")
    if not P:
        return ChainKind(SEGMENT)
    for a, b in itertools.combinations(P, 2):
        if order_of_product(a, b) != INF:
            return ChainKind(NOT_A_CHAIN, witness=(a, b))
    reps = [m.adjacent_chambers()[0] for m in P]
    n = len(P)
    side = [[chamber_side(P[i], reps[j]) for j in range(n)] for i in range(n)]

    def between(k, i, j):
        return side[k][i] != side[k][j]

    for i, j, k in itertools.combinations(range(n), 3):
        mids = [x for x, (a, b) in ((i, (j, k)), (j, (i, k)), (k, (i, j))) if between(x, a, b)]
        if len(mids) != 1:
            return ChainKind(NOT_A_CHAIN, witness=(P[i], P[j], P[k]))
    ends = [x for x in range(n)
            if not any(between(x, a, b) for a, b in itertools.combinations(range(n), 2)
                       if x not in (a, b))]
    if indexing is None:
        end = min(ends, key=lambda x: P[x].sort_key())
    else:
        end = 0 if 0 in ends else ends[0]
    dist = {x: sum(1 for k in range(n) if k not in (x, end) and between(k, end, x)) for x in range(n)}
    order = sorted(range(n), key=lambda x: (x != end, dist[x]))
    if indexing is None:
        return ChainKind(SEGMENT, [P[x] for x in order])
    kind = {"ray": RAY, "line": LINE}[indexing]
    if order != list(range(n)) and order[::-1] != list(range(n)):
        return ChainKind(NOT_A_CHAIN, [P[x] for x in order], witness=tuple(P[:3]), window_only=True)
    return ChainKind(kind, list(P), window_only=True)


# -- parabolic closure ---------------------------------------------------

@dataclass
class ParabolicClosure:
    base: Element
    T: tuple
    ball_relative: bool = True

    def to_json(self) -> dict:
        return {"base": self.base.labels(), "T": list(self.T), "ball_relative": self.ball_relative}


def parabolic_closure(R: Iterable[Wall], ball: Ball) -> ParabolicClosure:
    """Smallest ``w W_T w^-1`` with ``w`` in the ball containing every ``r_m``.

    Ties are broken by the ShortLex order of ``w``.
    """
    R = list(R)
    if not R:
        raise ValueError("parabolic_closure: R must be nonempty")
    g = ball.group
    best = None
    for w in ball.elements:
        inv = tuple(reversed(w.word))
        letters = set()
        for m in R:
            letters |= set(g.normal_form(inv + m.reflection.word + w.word).word)
        if best is None or len(letters) < len(best[1]):
            best = (w, letters)
            if len(letters) == 1:
                break
    if best is None:
        raise NotFoundError("parabolic_closure: no containing parabolic within the ball")
    w, letters = best
    return ParabolicClosure(w, tuple(g.M.generators[i] for i in sorted(letters)), True)


__all__ = [
    "order_of_product", "root_product_order", "dihedral_canonical_pair", "ReflectionSubgroup",
    "reflection_subgroup", "satisfies_dyer_criterion", "is_euclidean_triangle",
    "euclidean_triangle_tag", "ChainKind", "chain_kind", "ParabolicClosure", "parabolic_closure",
    "SEGMENT", "RAY", "LINE", "NOT_A_CHAIN", "EUCLIDEAN_TRIANGLES",
]
