"""Walls, half-spaces, separation sets, convex hulls and the splitting construction."""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable

from .cayley import Ball, CoxeterGroup, Element, Root
from .errors import ContractViolation, PreconditionError

INSIDE = "inside"
OUTSIDE = "outside"
ON_WALL = "on-wall"


class Wall:
    """Wall of the reflection ``r_m``, identified by its positive root.

    Equality and hashing use the canonical word of ``r_m``.
    """

    __slots__ = ("group", "root", "reflection", "_chamber")

    def __init__(self, group: CoxeterGroup, root: Root):
        root = group.positive(root)
        w, t = group.descend(root)
        self.group = group
        self.root = root
        self.reflection = group.normal_form(w + (t,) + tuple(reversed(w)))
        self._chamber = (w, t)

    @classmethod
    def simple(cls, group: CoxeterGroup, s) -> "Wall":
        return cls(group, group.simple_root(s))

    @classmethod
    def from_reflection(cls, group: CoxeterGroup, r: Element) -> "Wall":
        return cls(group, group.root_of_reflection(r))

    @property
    def key(self) -> tuple:
        return self.reflection.word

    def sort_key(self):
        return (len(self.key), self.key)

    def __eq__(self, other):
        return isinstance(other, Wall) and self.key == other.key

    def __hash__(self):
        return hash(self.key)

    def __lt__(self, other):
        return self.sort_key() < other.sort_key()

    def adjacent_chambers(self) -> tuple:
        """Two chambers ``w`` and ``wt`` separated by this wall alone."""
        w, t = self._chamber
        g = self.group
        return g.normal_form(w), g.normal_form(w + (t,))

    def translate(self, u: Element) -> "Wall":
        """The wall ``u.m``."""
        return Wall(self.group, self.group.act(u, self.root))

    def to_json(self) -> list:
        return self.reflection.labels()

    def __repr__(self):
        return f"Wall({self.reflection})"


class WallSet(frozenset):
    """Set of walls; serialises as the sorted list of canonical reflection words."""

    def sorted(self) -> list:
        return sorted(self, key=Wall.sort_key)

    def to_json(self) -> list:
        return [m.to_json() for m in self.sorted()]


@dataclass(frozen=True)
class HalfSpace:
    wall: Wall
    side: int = 1  # +1 is the side of the base chamber

    def boundary(self) -> Wall:
        return self.wall

    def opposite(self) -> "HalfSpace":
        return HalfSpace(self.wall, -self.side)


@dataclass(frozen=True)
class Coset:
    """Residue ``u W_U`` of chambers; ``U`` holds generator indices."""

    rep: Element
    U: tuple

    def chambers(self) -> list:
        """Elements of the coset; ``W_U`` must be finite."""
        g = self.rep.group
        out, seen, frontier = [self.rep], {self.rep.word}, [self.rep]
        while frontier:
            nxt = []
            for x in frontier:
                for s in self.U:
                    y = g.normal_form(x.word + (s,))
                    if y.word not in seen:
                        seen.add(y.word)
                        out.append(y)
                        nxt.append(y)
            frontier = nxt
        return out


def chamber_side(wall: Wall, u: Element) -> int:
    """+1 when ``u.c0`` lies on the base side of ``wall``, else -1."""
    g = wall.group
    return g.root_sign(g.act_inverse(u, wall.root))


def side_of(h: HalfSpace, q) -> str:
    """Position of a chamber (Element) or residue (Coset) relative to ``h``."""
    g = h.wall.group
    if isinstance(q, Coset):
        u = q.rep
        conj = g.normal_form(tuple(reversed(u.word)) + h.wall.reflection.word + u.word)
        if set(conj.word) <= set(q.U):
            return ON_WALL
    else:
        u = q
    return INSIDE if chamber_side(h.wall, u) == h.side else OUTSIDE


def _crossed_roots(g: CoxeterGroup, x: Element, word: tuple) -> list:
    """Positive roots of the walls crossed by the gallery ``x, x a1, x a1 a2, ...``."""
    out = []
    for i, s in enumerate(word):
        out.append(g.positive(g.apply_word(x.word + word[:i], g.simple_root(s))))
    return out


def separating_walls(u: Element, v: Element) -> WallSet:
    """``M(u.c0, v.c0) = u . N(u^-1 v)``."""
    g = u.group
    d = g.normal_form(tuple(reversed(u.word)) + v.word)
    return WallSet(Wall(g, r) for r in _crossed_roots(g, u, d.word))


def gallery_distance(u: Element, v: Element) -> int:
    return len(u.group.normal_form(tuple(reversed(u.word)) + v.word).word)


@dataclass(frozen=True)
class HullResult:
    elements: frozenset
    ball_relative: bool

    def __contains__(self, u):
        return u in self.elements

    def __iter__(self):
        return iter(sorted(self.elements, key=lambda e: (len(e.word), e.word)))

    def __len__(self):
        return len(self.elements)

    def to_json(self) -> dict:
        return {"elements": [e.labels() for e in self], "ball_relative": self.ball_relative}


def convex_hull(C: Iterable[Element], ball: Ball) -> HullResult:
    """Chambers of the ball lying in every half-space that contains ``C``.

    ``w`` is excluded exactly when some wall separates ``w`` from all of ``C``;
    such a wall separates ``w`` from the first chamber of ``C``.
    """
    C = list(dict.fromkeys(C))
    if not C:
        raise ContractViolation("convex_hull: C must be nonempty")
    for c in C:
        if c not in ball:
            raise ContractViolation(f"convex_hull: chamber {c} is outside the ball of radius {ball.radius}")
    g = ball.group
    c0 = C[0]
    rest = C[1:]
    out = set()
    for w in ball:
        d = g.normal_form(tuple(reversed(w.word)) + c0.word)
        keep = True
        for r in _crossed_roots(g, w, d.word):
            side0 = g.root_sign(g.act_inverse(c0, r))
            if all(g.root_sign(g.act_inverse(c, r)) == side0 for c in rest):
                keep = False
                break
        if keep:
            out.add(w)
    return HullResult(frozenset(out), not ball.complete)


def split_convex(x: Element, y: Element, M: Iterable[Wall]) -> Element:
    """Chamber ``z`` with ``M(y, z) = M`` and ``M(x, z) = M(x, y) \\ M``.

    Walk the ShortLex geodesic from ``x`` to ``y`` and peel its last letter. A
    last wall in ``M`` is dropped and the recursion continues on the prefix. A
    last wall outside ``M`` is swapped past the latest ``M`` letter; each swap
    exchanges two commuting reflections, so the two letters commute.
    """
    g = x.group
    M = set(M)
    d = g.normal_form(tuple(reversed(x.word)) + y.word)
    word = list(d.word)
    roots = _crossed_roots(g, x, d.word)
    walls = [Wall(g, r) for r in roots]
    all_walls = set(walls)
    extra = M - all_walls
    if extra:
        m = min(extra, key=Wall.sort_key)
        raise PreconditionError(
            f"split_convex: wall {m.reflection} does not separate {x} from {y}", witness=(m,))
    in_M = [m in M for m in walls]
    for i, m in enumerate(walls):
        if not in_M[i]:
            continue
        for j, mu in enumerate(walls):
            if in_M[j]:
                continue
            if g.field.sign(g.pairing(roots[i], roots[j])) != 0:
                raise PreconditionError(
                    f"split_convex: reflections of {m.reflection} (in M) and {mu.reflection} "
                    f"(not in M) do not commute", witness=(m, mu))

    # labels travel with their letters
    letters = list(zip(word, in_M))
    kept = []
    while letters:
        s, marked = letters.pop()
        if marked:
            continue
        k = max((i for i, (_, mk) in enumerate(letters) if mk), default=None)
        if k is None:
            kept = letters + [(s, marked)]
            break
        # move the M letter at k past the unmarked ones that follow it
        moved = letters.pop(k)
        letters.append((s, marked))
        letters.append(moved)
        a = moved[0]
        for b, _ in letters[k:-1]:
            if g.M.order(a, b) != 2:
                raise AssertionError("split_convex: swap of non-commuting letters")
    return g.normal_form(x.word + tuple(s for s, _ in kept))


__all__ = [
    "Wall", "WallSet", "HalfSpace", "Coset", "HullResult", "INSIDE", "OUTSIDE", "ON_WALL",
    "side_of", "chamber_side", "separating_walls", "gallery_distance", "convex_hull", "split_convex",
]
