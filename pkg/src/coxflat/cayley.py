"""Root-system arithmetic, ShortLex normal forms and Cayley-ball enumeration.

Roots live in the geometric representation: the simple roots form a basis and
``s(v) = v - 2B(a_s, v) a_s``. All pairings below are the doubled form ``2B``,
whose entries ``-2cos(pi/m)`` are integers for m in {2, 3, inf}.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Iterable, Sequence

from .diagram import INF, CoxeterMatrix
from .errors import ContractViolation, ResourceCapError
from .numbers import field_for

DEFAULT_MAX_RADIUS = 12
DEFAULT_MAX_ELEMENTS = 2_000_000


class Root:
    """A root as its coordinate vector in the simple-root basis."""

    __slots__ = ("coords", "key")

    def __init__(self, coords: tuple, key: tuple):
        self.coords = coords
        self.key = key

    def __eq__(self, other):
        return isinstance(other, Root) and self.key == other.key

    def __hash__(self):
        return hash(self.key)

    def __repr__(self):
        return f"Root{self.coords!r}"


@dataclass(frozen=True)
class Element:
    """Group element stored as its ShortLex-least reduced word (generator indices)."""

    word: tuple
    group: "CoxeterGroup" = field(compare=False, repr=False, hash=False)

    def __mul__(self, other: "Element") -> "Element":
        return self.group.multiply(self, other)

    def inverse(self) -> "Element":
        return self.group.normal_form(tuple(reversed(self.word)))

    def __len__(self):
        return len(self.word)

    @property
    def length(self) -> int:
        return len(self.word)

    def labels(self) -> list:
        return [self.group.M.generators[i] for i in self.word]

    def to_json(self) -> list:
        return self.labels()

    def __str__(self):
        return " ".join(self.labels()) or "1"


class CoxeterGroup:
    """A Coxeter group given by its matrix, with exact or interval arithmetic."""

    def __init__(self, M: CoxeterMatrix, precision: int = 200,
                 max_radius: int = DEFAULT_MAX_RADIUS,
                 max_elements: int = DEFAULT_MAX_ELEMENTS):
        self.M = M
        self.n = M.rank
        self.field = field_for(M.label_set(), precision)
        self.max_radius = max_radius
        self.max_elements = max_elements
        f = self.field
        self.C = [[f.from_int(2) if i == j else f.coupling(M.orders[i][j])
                   for j in range(self.n)] for i in range(self.n)]
        # off-diagonal nonzero couplings per generator
        self._nbrs = [[(t, self.C[s][t]) for t in range(self.n)
                       if t != s and M.orders[s][t] != 2] for s in range(self.n)]
        self._zero = f.zero
        self._simple = [self._make_root(tuple(f.one if i == s else f.zero for i in range(self.n)))
                        for s in range(self.n)]

    # -- bookkeeping ------------------------------------------------------

    @property
    def exact(self) -> bool:
        return self.field.exact

    @property
    def uncertified(self) -> bool:
        """True once any sign decision was made on an interval containing zero."""
        return (not self.field.exact) and self.field.ambiguous > 0

    def gen(self, label) -> int:
        return self.M.index(label)

    def parse_word(self, word) -> tuple:
        """Accept a sequence of labels/indices or a string separated by spaces or commas.

        A string without separators is split into characters when every label is one character.
        """
        if isinstance(word, str):
            text = word.replace(",", " ").strip()
            if text in ("", "1", "e"):
                return ()
            tokens = text.split()
            if len(tokens) == 1 and tokens[0] not in self.M.generators \
                    and all(len(g) == 1 for g in self.M.generators):
                tokens = list(tokens[0])
            return tuple(self.gen(tok) for tok in tokens)
        return tuple(self.gen(x) for x in word)

    # -- roots ------------------------------------------------------------

    def _make_root(self, coords) -> Root:
        coords = tuple(coords)
        return Root(coords, tuple(self.field.key(x) for x in coords))

    def simple_root(self, s) -> Root:
        return self._simple[self.gen(s)]

    def _apply_simple(self, s: int, v: list) -> list:
        new = list(v)
        acc = -v[s]
        for t, c in self._nbrs[s]:
            acc = acc - c * v[t]
        new[s] = acc
        return new

    def apply_word(self, word: Sequence[int], root: Root) -> Root:
        """``w(root)`` for ``w`` = the product of the letters of ``word``."""
        v = list(root.coords)
        for s in reversed(word):
            v = self._apply_simple(s, v)
        return self._make_root(v)

    def act(self, u: Element, root: Root) -> Root:
        return self.apply_word(u.word, root)

    def act_inverse(self, u: Element, root: Root) -> Root:
        return self.apply_word(tuple(reversed(u.word)), root)

    def pairing(self, a: Root, b: Root):
        """Doubled bilinear form ``2B(a, b)``."""
        total = self._zero
        for i, x in enumerate(a.coords):
            if self.field.exact and self.field.sign(x) == 0:
                continue
            row = self.C[i]
            for j, y in enumerate(b.coords):
                if self.M.orders[i][j] != 2:
                    total = total + x * row[j] * y
        return total

    def root_sign(self, root: Root) -> int:
        return self._vec_sign(root.coords)

    def is_positive(self, root: Root) -> bool:
        return self.root_sign(root) > 0

    def negate(self, root: Root) -> Root:
        return self._make_root(tuple(-x for x in root.coords))

    def positive(self, root: Root) -> Root:
        return root if self.root_sign(root) > 0 else self.negate(root)

    def reflect(self, a: Root, v: Root) -> Root:
        """``r_a(v) = v - 2B(a, v) a``."""
        c = self.pairing(a, v)
        return self._make_root(tuple(y - c * x for x, y in zip(a.coords, v.coords)))

    def simple_index(self, root: Root):
        for s, r in enumerate(self._simple):
            if r == root:
                return s
        return None

    def descend(self, root: Root):
        """Write a positive root as ``w(a_t)``; returns ``(w word, t)``.

        Each step applies a simple reflection that lowers the height.
        """
        if not self.is_positive(root):
            raise ContractViolation("descend expects a positive root")
        path = []
        v = list(root.coords)
        while True:
            cur = self._make_root(v)
            t = self.simple_index(cur)
            if t is not None:
                return tuple(path), t
            for s in range(self.n):
                c = self._zero
                for j, y in enumerate(v):
                    if self.M.orders[s][j] != 2:
                        c = c + self.C[s][j] * y
                if self.field.sign(c) > 0:
                    path.append(s)
                    v = self._apply_simple(s, v)
                    break
            else:
                raise ContractViolation(f"{cur!r} is not a root of this system")

    def reflection_word(self, root: Root) -> tuple:
        """Unreduced word ``w t w^-1`` of the reflection in ``root``."""
        w, t = self.descend(self.positive(root))
        return w + (t,) + tuple(reversed(w))

    def reflection(self, root: Root) -> Element:
        return self.normal_form(self.reflection_word(root))

    def root_of_reflection(self, r: Element) -> Root:
        """Positive root of a reflection given as an element (odd length, involution)."""
        if len(r.word) % 2 == 0 or self.multiply(r, r).word:
            raise ContractViolation(f"{r} is not a reflection")
        # r = u t u^-1 with the word read as u t v; its root is u(a_t)
        word = r.word
        for k in range(len(word)):
            u, t = word[:k], word[k]
            if self.normal_form(u + (t,) + tuple(reversed(u))) == r:
                return self.positive(self.apply_word(u, self._simple[t]))
        raise ContractViolation(f"{r} is not a reflection")

    # -- word problem -----------------------------------------------------

    def _inverse_images(self, word: Sequence[int]) -> list:
        """Columns ``g^-1(a_t)`` for the element ``g`` spelled by ``word``."""
        f = self.field
        cols = [[f.one if i == t else f.zero for i in range(self.n)] for t in range(self.n)]
        for s in word:
            cols = [self._apply_simple(s, c) for c in cols]
        return cols

    def _vec_sign(self, v) -> int:
        # coordinates of a root share one sign, so any decisive one settles it
        for x in v:
            sg = self.field.decisive(x)
            if sg:
                return sg
        for x in v:
            self.field.sign(x)
        return 0

    def normal_form(self, word) -> Element:
        """ShortLex-least reduced word, by repeatedly stripping the smallest left descent."""
        word = self.parse_word(word) if not (isinstance(word, tuple) and all(
            isinstance(x, int) for x in word)) else word
        if len(word) <= 1:
            return Element(tuple(word), self)
        cols = self._inverse_images(word)
        out = []
        while True:
            for s in range(self.n):
                if self._vec_sign(cols[s]) < 0:
                    break
            else:
                return Element(tuple(out), self)
            out.append(s)
            cs = cols[s]
            for t, c in self._nbrs[s]:
                cols[t] = [x - c * y for x, y in zip(cols[t], cs)]
            cols[s] = [-x for x in cs]

    def element(self, word) -> Element:
        return self.normal_form(self.parse_word(word))

    def identity(self) -> Element:
        return Element((), self)

    def generator(self, s) -> Element:
        return Element((self.gen(s),), self)

    def multiply(self, u: Element, v: Element) -> Element:
        if not v.word:
            return u
        if not u.word:
            return v
        return self.normal_form(u.word + v.word)

    def inverse(self, u: Element) -> Element:
        return u.inverse()

    def conjugate(self, w: Element, r: Element) -> Element:
        """``w r w^-1``."""
        return self.normal_form(w.word + r.word + tuple(reversed(w.word)))

    def length(self, u: Element) -> int:
        return len(u.word)

    def element_key(self, word: Sequence[int]) -> tuple:
        """Faithful hashable key of the element spelled by ``word``."""
        cols = self._inverse_images(word)
        return tuple(self.field.key(x) for c in cols for x in c)

    # -- inversion sets and reflections ---------------------------------

    def inversion_roots(self, u: Element) -> list:
        """Roots ``s_1..s_{i-1}(a_{s_i})`` in gallery order."""
        out = []
        for i, s in enumerate(u.word):
            out.append(self.apply_word(u.word[:i], self._simple[s]))
        return out

    def inversion_set(self, u: Element) -> frozenset:
        return frozenset(self.inversion_roots(u))

    def reflections_up_to(self, depth: int) -> list:
        """Positive roots reached from the simple roots by at most ``depth`` simple reflections,
        keeping only positive intermediates; ordered by level, then discovery."""
        if depth < 0:
            raise ContractViolation("depth must be >= 0")
        return [r for r, _ in self.roots_with_depth(depth)]

    def roots_with_depth(self, depth: int) -> list:
        seen = {}
        level = list(self._simple)
        for r in level:
            seen[r] = 0
        out = [(r, 0) for r in level]
        for d in range(1, depth + 1):
            nxt = []
            for r in level:
                for s in range(self.n):
                    v = self._make_root(self._apply_simple(s, list(r.coords)))
                    if v in seen or not self.is_positive(v):
                        continue
                    seen[v] = d
                    nxt.append(v)
                    if len(seen) > self.max_elements:
                        raise ResourceCapError(
                            f"reflections_up_to: more than {self.max_elements} roots", attained=d - 1)
            if not nxt:
                break
            out.extend((r, d) for r in nxt)
            level = nxt
        return out

    # -- balls ------------------------------------------------------------

    def enumerate_ball(self, radius: int) -> "Ball":
        if radius < 0:
            raise ContractViolation("radius must be >= 0")
        if radius > self.max_radius:
            raise ResourceCapError(
                f"enumerate_ball: radius {radius} exceeds the cap {self.max_radius}",
                attained=self.max_radius)
        return Ball(self, radius)


class Ball:
    """All elements of length at most ``radius``, in ShortLex order.

    The first discovery of an element in breadth-first order, scanning the
    previous level in ShortLex order and generators in order, carries its
    ShortLex-least word.
    """

    def __init__(self, group: CoxeterGroup, radius: int):
        self.group = group
        self.radius = radius
        n = group.n
        f = group.field
        ident = [[f.one if i == t else f.zero for i in range(n)] for t in range(n)]
        keyof = lambda cols: tuple(f.key(x) for c in cols for x in c)
        self.words = [()]
        self.levels = [[0]]
        self._cols = [ident]
        seen = {keyof(ident): 0}
        self.neighbors = [[None] * n]
        self.complete = False
        for r in range(1, radius + 2):
            nxt = []
            escaped = False
            for i in self.levels[-1]:
                cols = self._cols[i]
                for s in range(n):
                    if self.neighbors[i][s] is not None:
                        continue
                    # (us)^-1 = s u^-1
                    new = [group._apply_simple(s, c) for c in cols]
                    k = keyof(new)
                    j = seen.get(k)
                    if j is None:
                        if r > radius:
                            escaped = True
                            continue
                        j = len(self.words)
                        seen[k] = j
                        self.words.append(self.words[i] + (s,))
                        self._cols.append(new)
                        self.neighbors.append([None] * n)
                        nxt.append(j)
                        if len(self.words) > group.max_elements:
                            raise ResourceCapError(
                                f"enumerate_ball: more than {group.max_elements} elements "
                                f"at radius {r}", attained=r - 1)
                    self.neighbors[i][s] = j
                    self.neighbors[j][s] = i
            if not nxt:
                # no element of length r exists: the whole group is in the ball
                self.complete = not escaped
                break
            self.levels.append(nxt)
        self.elements = [Element(w, group) for w in self.words]
        self.index = {w: i for i, w in enumerate(self.words)}
        self._cols = None

    def __len__(self):
        return len(self.words)

    def __iter__(self):
        return iter(self.elements)

    def __contains__(self, u: Element) -> bool:
        return u.word in self.index

    def level(self, r: int) -> list:
        return [self.elements[i] for i in self.levels[r]] if r < len(self.levels) else []

    def edges(self):
        """Undirected Cayley-graph edges ``(i, j, s)`` with ``i < j`` inside the ball."""
        out = []
        for i, row in enumerate(self.neighbors):
            for s, j in enumerate(row):
                if j is not None and i < j:
                    out.append((i, j, s))
        return out

    def to_json(self) -> dict:
        return {
            "radius": self.radius,
            "complete_group": self.complete,
            "size": len(self),
            "elements": [{"word": e.labels(), "length": e.length} for e in self.elements],
        }

    def to_dot(self, highlight: Iterable[Element] = ()) -> str:
        gens = self.group.M.generators
        marked = {u.word for u in highlight}
        lines = ["graph cayley {"]
        for i, e in enumerate(self.elements):
            attr = ", style=filled" if e.word in marked else ""
            lines.append(f'  n{i} [label="{e}"{attr}];')
        for i, j, s in self.edges():
            lines.append(f'  n{i} -- n{j} [label="{gens[s]}"];')
        lines.append("}")
        return "\n".join(lines) + "\n"


# -- module-level forms of the operations ---------------------------------

def multiply(u: Element, v: Element) -> Element:
    if u.group is not v.group and u.group.M != v.group.M:
        raise ContractViolation("multiply: elements of different groups")
    return u.group.multiply(u, v)


def normal_form(group: CoxeterGroup, word) -> Element:
    return group.element(word)


def length(u: Element) -> int:
    return len(u.word)


def inversion_set(u: Element) -> frozenset:
    return u.group.inversion_set(u)


def enumerate_ball(group: CoxeterGroup, radius: int) -> Ball:
    return group.enumerate_ball(radius)


def reflections_up_to(group: CoxeterGroup, depth: int) -> list:
    return group.reflections_up_to(depth)


__all__ = [
    "INF", "Root", "Element", "CoxeterGroup", "Ball", "multiply", "normal_form", "length",
    "inversion_set", "enumerate_ball", "reflections_up_to",
]
