"""Coxeter matrices, diagram components, classification and flat rank."""

from __future__ import annotations

import itertools
import json
import math
from dataclasses import dataclass, field
from functools import lru_cache
from typing import Iterable, Sequence

from .errors import ContractViolation, MatrixValidationError
from .numbers import SurdField, field_for

INF = math.inf

SPHERICAL = "Spherical"
AFFINE = "Affine"
INDEFINITE = "Indefinite"

MAX_FLAT_RANK_GENERATORS = 24


def _label_json(m) -> int:
    return 0 if m == INF else int(m)


@dataclass(frozen=True)
class CoxeterMatrix:
    """Symmetric order matrix of a Coxeter system; ``INF`` marks m_st = infinity."""

    generators: tuple
    orders: tuple

    def __post_init__(self):
        gens = tuple(self.generators)
        object.__setattr__(self, "generators", gens)
        n = len(gens)
        if len(set(gens)) != n:
            dup = next(g for g in gens if gens.count(g) > 1)
            raise MatrixValidationError(f"duplicate generator label {dup!r}")
        for g in gens:
            if not isinstance(g, str) or not g:
                raise MatrixValidationError(f"generator labels must be non-empty strings, got {g!r}")
        rows = tuple(tuple(row) for row in self.orders)
        if len(rows) != n or any(len(r) != n for r in rows):
            raise MatrixValidationError(f"orders must be a {n}x{n} array")
        for i, j in itertools.product(range(n), repeat=2):
            m = rows[i][j]
            where = f"cell ({gens[i]}, {gens[j]}) = {m!r}"
            if m != INF and (isinstance(m, bool) or not isinstance(m, int)):
                raise MatrixValidationError(f"{where}: orders must be integers or infinity")
            if i == j:
                if m != 1:
                    raise MatrixValidationError(f"{where}: diagonal must be 1")
            else:
                if m < 2:
                    raise MatrixValidationError(f"{where}: off-diagonal orders must be >= 2")
                if rows[j][i] != m:
                    raise MatrixValidationError(
                        f"{where}: matrix is not symmetric (({gens[j]}, {gens[i]}) = {rows[j][i]!r})")
        object.__setattr__(self, "orders", rows)

    @property
    def rank(self) -> int:
        return len(self.generators)

    def order(self, i: int, j: int):
        return self.orders[i][j]

    def index(self, label) -> int:
        if isinstance(label, int):
            if not 0 <= label < self.rank:
                raise ContractViolation(f"generator index {label} out of range")
            return label
        try:
            return self.generators.index(label)
        except ValueError:
            raise ContractViolation(f"unknown generator {label!r}") from None

    def indices(self, labels: Iterable) -> tuple:
        return tuple(sorted({self.index(x) for x in labels}))

    def labels(self, indices: Iterable[int]) -> list:
        return [self.generators[i] for i in indices]

    def restrict(self, subset: Iterable) -> "CoxeterMatrix":
        idx = self.indices(subset)
        return CoxeterMatrix(
            tuple(self.generators[i] for i in idx),
            tuple(tuple(self.orders[i][j] for j in idx) for i in idx),
        )

    def label_set(self) -> set:
        return {m for row in self.orders for m in row}

    def is_right_angled(self) -> bool:
        return self.label_set() <= {1, 2, INF}

    def to_json(self) -> dict:
        return {
            "generators": list(self.generators),
            "orders": [[_label_json(m) for m in row] for row in self.orders],
        }

    def __str__(self):
        return json.dumps(self.to_json())


def matrix_from_json(doc: dict) -> CoxeterMatrix:
    if not isinstance(doc, dict):
        raise MatrixValidationError("matrix document must be a JSON object")
    missing = {"generators", "orders"} - doc.keys()
    if missing:
        raise MatrixValidationError(f"matrix document lacks field(s) {sorted(missing)}")
    gens = doc["generators"]
    orders = doc["orders"]
    if not isinstance(gens, list) or not isinstance(orders, list):
        raise MatrixValidationError("'generators' and 'orders' must be arrays")
    rows = []
    for row in orders:
        if not isinstance(row, list):
            raise MatrixValidationError("'orders' must be an array of arrays")
        rows.append(tuple(INF if (m == 0 and not isinstance(m, bool)) else m for m in row))
    return CoxeterMatrix(tuple(gens), tuple(rows))


def parse_matrix(text: str) -> CoxeterMatrix:
    """Parse the JSON matrix format; ``0`` in ``orders`` encodes infinity."""
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as exc:
        raise MatrixValidationError(f"matrix is not valid JSON: {exc}") from None
    return matrix_from_json(doc)


# -- builders -------------------------------------------------------------

def from_edges(generators: Sequence[str], edges: dict) -> CoxeterMatrix:
    """Build a matrix from ``{(i, j): m}``; unlisted pairs commute."""
    n = len(generators)
    rows = [[1 if i == j else 2 for j in range(n)] for i in range(n)]
    for (i, j), m in edges.items():
        rows[i][j] = rows[j][i] = m
    return CoxeterMatrix(tuple(generators), tuple(map(tuple, rows)))


def triangle(p, q, r, labels=("a", "b", "c")) -> CoxeterMatrix:
    """Rank-3 matrix with m_ab = p, m_bc = q, m_ac = r."""
    return from_edges(labels, {(0, 1): p, (1, 2): q, (0, 2): r})


def dihedral(m, labels=("s", "t")) -> CoxeterMatrix:
    return from_edges(labels, {(0, 1): m})


def direct_sum(*matrices: CoxeterMatrix, prefixes: Sequence[str] | None = None) -> CoxeterMatrix:
    """Disjoint union of diagrams with all cross orders 2.

    Labels are kept when they are globally distinct, otherwise prefixed.
    """
    all_labels = [g for M in matrices for g in M.generators]
    if prefixes is None and len(set(all_labels)) != len(all_labels):
        prefixes = [f"{chr(ord('a') + k)}" for k in range(len(matrices))]
    gens = []
    for k, M in enumerate(matrices):
        for g in M.generators:
            gens.append(prefixes[k] + g if prefixes else g)
    n = len(gens)
    rows = [[1 if i == j else 2 for j in range(n)] for i in range(n)]
    off = 0
    for M in matrices:
        for i in range(M.rank):
            for j in range(M.rank):
                rows[off + i][off + j] = M.orders[i][j]
        off += M.rank
    return CoxeterMatrix(tuple(gens), tuple(map(tuple, rows)))


def _path(n, labels=None):
    labels = labels or [3] * (n - 1)
    return {(i, i + 1): m for i, m in enumerate(labels)}


def _arms(center, lengths):
    """Edges of a star with arms of the given lengths; nodes numbered from 0."""
    edges = {}
    nxt = 1
    for length in lengths:
        prev = center
        for _ in range(length):
            edges[(prev, nxt)] = 3
            prev = nxt
            nxt += 1
    return edges, nxt


def named(name: str) -> CoxeterMatrix:
    """Matrix of a classical type such as ``"A3"``, ``"I2(5)"``, ``"B~3"`` or ``"G~2"``.

    Finite types are labelled s1..sn, affine types s0..sn.
    """
    affine = "~" in name
    family = name[0].upper()
    if name.startswith("I2("):
        return dihedral(int(name[3:-1]), labels=("s1", "s2"))
    n = int(name.replace("~", "")[1:])
    if affine:
        k = n + 1
        if family == "A":
            edges = {(0, 1): INF} if n == 1 else {**_path(k), (0, n): 3}
        elif family == "B" and n >= 3:
            edges = {(0, 2): 3, (1, 2): 3, **{(i, i + 1): 3 for i in range(2, n)}}
            edges[(n - 1, n)] = 4
        elif family == "C" and n >= 2:
            edges = _path(k, [4] + [3] * (n - 2) + [4])
        elif family == "D" and n >= 4:
            edges = {(0, 2): 3, (1, 2): 3, **{(i, i + 1): 3 for i in range(2, n - 1)}, (n - 2, n): 3}
        elif family == "E" and n in (6, 7, 8):
            edges, _ = _arms(0, {6: (2, 2, 2), 7: (1, 3, 3), 8: (1, 2, 5)}[n])
        elif family == "F" and n == 4:
            edges = _path(5, [3, 3, 4, 3])
        elif family == "G" and n == 2:
            edges = _path(3, [3, 6])
        else:
            raise ValueError(f"unknown affine type {name!r}")
        return from_edges([f"s{i}" for i in range(k)], edges)
    if family == "A":
        edges = _path(n)
    elif family == "B" and n >= 2:
        edges = _path(n, [3] * (n - 2) + [4])
    elif family == "D" and n >= 4:
        edges = {**_path(n - 1), (n - 3, n - 1): 3}
    elif family == "E" and n in (6, 7, 8):
        edges, _ = _arms(0, {6: (1, 2, 2), 7: (1, 2, 3), 8: (1, 2, 4)}[n])
    elif family == "F" and n == 4:
        edges = _path(4, [3, 4, 3])
    elif family == "G" and n == 2:
        edges = _path(2, [6])
    elif family == "H" and n in (3, 4):
        edges = _path(n, [5] + [3] * (n - 2))
    else:
        raise ValueError(f"unknown finite type {name!r}")
    return from_edges([f"s{i + 1}" for i in range(n)], edges)


# -- components and classification ---------------------------------------

def _component_indices(M: CoxeterMatrix, T: Sequence[int]) -> list:
    remaining = set(T)
    parts = []
    for start in sorted(T):
        if start not in remaining:
            continue
        remaining.discard(start)
        part, stack = {start}, [start]
        while stack:
            i = stack.pop()
            for j in list(remaining):
                if M.orders[i][j] != 2:
                    remaining.discard(j)
                    part.add(j)
                    stack.append(j)
        parts.append(tuple(sorted(part)))
    return parts


def components(M: CoxeterMatrix, T: Iterable | None = None) -> list:
    """Connected components of the diagram restricted to ``T`` (labels), in generator order."""
    idx = M.indices(M.generators if T is None else T)
    return [M.labels(part) for part in _component_indices(M, idx)]


@dataclass(frozen=True)
class Classification:
    kind: str
    dimension: int | None = None
    type_name: str | None = None
    method: str = "gram+lookup"

    def to_json(self) -> dict:
        return {"kind": self.kind, "dimension": self.dimension, "type": self.type_name,
                "method": self.method}


def gram_kind(M: CoxeterMatrix, component: Sequence[int]):
    """Signature test on the doubled Gram form, exact; ``None`` for inexact labels.

    Returns (kind, corank).
    """
    sub = [[M.orders[i][j] for j in component] for i in component]
    labels = {m for row in sub for m in row}
    fld = field_for(labels)
    if not fld.exact:
        return None
    fld = SurdField()
    k = len(component)
    A = [[fld.from_int(2) if i == j else fld.coupling(sub[i][j]) for j in range(k)]
         for i in range(k)]
    corank = 0
    for p in range(k):
        piv = A[p][p]
        s = piv.sign()
        if s < 0:
            return INDEFINITE, None
        if s == 0:
            if any(not A[p][j].is_zero() for j in range(p + 1, k)):
                return INDEFINITE, None
            corank += 1
            continue
        inv = piv.inverse()
        for i in range(p + 1, k):
            if A[i][p].is_zero():
                continue
            f = A[i][p] * inv
            for j in range(p + 1, k):
                A[i][j] = A[i][j] - f * A[p][j]
    if corank == 0:
        return SPHERICAL, 0
    if corank == 1:
        return AFFINE, 1
    return INDEFINITE, corank


def _tree_arms(adj, center):
    """Lengths and edge lists of the arms leaving ``center`` in a tree."""
    arms = []
    for nb in sorted(adj[center]):
        length, prev, cur, path = 1, center, nb, [(center, nb)]
        while len(adj[cur]) == 2:
            nxt = next(x for x in adj[cur] if x != prev)
            path.append((cur, nxt))
            prev, cur = cur, nxt
            length += 1
        arms.append((length, path, len(adj[cur]) == 1))
    return arms


def lookup_type(M: CoxeterMatrix, component: Sequence[int]):
    """Identify an irreducible diagram against the finite and affine tables.

    Returns (kind, type name or None).
    """
    nodes = list(component)
    n = len(nodes)
    if n == 1:
        return SPHERICAL, "A1"
    label = {}
    adj = {v: set() for v in nodes}
    for a, b in itertools.combinations(nodes, 2):
        m = M.orders[a][b]
        if m != 2:
            label[frozenset((a, b))] = m
            adj[a].add(b)
            adj[b].add(a)
    labels = list(label.values())
    if n == 2:
        m = labels[0]
        if m == INF:
            return AFFINE, "A~1"
        return SPHERICAL, {3: "A2", 4: "B2", 6: "G2"}.get(m, f"I2({m})")
    if INF in labels:
        return INDEFINITE, None
    n_edges = len(labels)
    if n_edges >= n:
        if n_edges == n and all(len(adj[v]) == 2 for v in nodes) and all(m == 3 for m in labels):
            return AFFINE, f"A~{n - 1}"
        return INDEFINITE, None
    # the diagram is a tree from here on
    big = [m for m in labels if m != 3]
    if any(m >= 7 for m in big):
        return INDEFINITE, None
    degrees = {v: len(adj[v]) for v in nodes}
    branch = [v for v in nodes if degrees[v] >= 3]
    is_path = not branch

    def path_order():
        start = next(v for v in nodes if degrees[v] == 1)
        order, prev = [start], None
        while len(order) < n:
            nxt = next(x for x in adj[order[-1]] if x != prev)
            prev = order[-1]
            order.append(nxt)
        return [label[frozenset((order[i], order[i + 1]))] for i in range(n - 1)]

    if 6 in big:
        if n == 3 and sorted(labels) == [3, 6]:
            return AFFINE, "G~2"
        return INDEFINITE, None
    if 5 in big:
        if len(big) == 1 and is_path and n in (3, 4):
            seq = path_order()
            if seq[0] == 5 or seq[-1] == 5:
                return SPHERICAL, f"H{n}"
        return INDEFINITE, None
    if not big:
        if is_path:
            return SPHERICAL, f"A{n}"
        if len(branch) == 1 and degrees[branch[0]] == 3:
            arms = sorted(length for length, _, _ in _tree_arms(adj, branch[0]))
            if arms[:2] == [1, 1]:
                return SPHERICAL, f"D{n}"
            table = {(1, 2, 2): (SPHERICAL, "E6"), (1, 2, 3): (SPHERICAL, "E7"),
                     (1, 2, 4): (SPHERICAL, "E8"), (2, 2, 2): (AFFINE, "E~6"),
                     (1, 3, 3): (AFFINE, "E~7"), (1, 2, 5): (AFFINE, "E~8")}
            return table.get(tuple(arms), (INDEFINITE, None))
        if len(branch) == 1 and degrees[branch[0]] == 4 and n == 5:
            return AFFINE, "D~4"
        if len(branch) == 2 and all(degrees[v] == 3 for v in branch):
            ok = True
            for v in branch:
                other = next(b for b in branch if b != v)
                leaves = [length for length, path, leaf in _tree_arms(adj, v)
                          if other not in {x for e in path for x in e}]
                ok &= sorted(leaves) == [1, 1]
            if ok:
                return AFFINE, f"D~{n - 1}"
        return INDEFINITE, None
    if set(big) != {4}:
        return INDEFINITE, None
    if len(big) == 1:
        if is_path:
            seq = path_order()
            pos = seq.index(4)
            if pos in (0, n - 2):
                return SPHERICAL, f"B{n}"
            if n == 4:
                return SPHERICAL, "F4"
            if n == 5:
                return AFFINE, "F~4"
            return INDEFINITE, None
        if len(branch) == 1 and degrees[branch[0]] == 3:
            arms = _tree_arms(adj, branch[0])
            short = [a for a in arms if a[0] == 1 and label[frozenset(a[1][-1])] == 3]
            longs = [a for a in arms if label[frozenset(a[1][-1])] == 4]
            if len(longs) == 1 and len(short) == 2 and n >= 4:
                return AFFINE, f"B~{n - 1}"
        return INDEFINITE, None
    if len(big) == 2 and is_path:
        seq = path_order()
        if seq[0] == 4 and seq[-1] == 4:
            return AFFINE, f"C~{n - 1}"
    return INDEFINITE, None


def _is_connected(M: CoxeterMatrix, idx: Sequence[int]) -> bool:
    return len(_component_indices(M, idx)) == 1


def classify(M: CoxeterMatrix, component: Iterable | None = None) -> Classification:
    """Spherical / Affine / Indefinite type of an irreducible component."""
    idx = M.indices(M.generators if component is None else component)
    if not idx or not _is_connected(M, idx):
        raise ContractViolation(
            f"classify: component {M.labels(idx)} is not irreducible (a single diagram component)")
    return _classify_idx(M, idx)


def _classify_idx(M: CoxeterMatrix, idx: tuple) -> Classification:
    kind_table, name = lookup_type(M, idx)
    gram = gram_kind(M, idx)
    if gram is None:
        kind, method = kind_table, "lookup"
    else:
        kind, method = gram[0], "gram+lookup"
        if kind != kind_table:
            raise AssertionError(
                f"Gram test ({kind}) disagrees with lookup table ({kind_table}) on {M.labels(idx)}")
    dim = len(idx) - 1 if kind == AFFINE else None
    return Classification(kind, dim, name, method)


# -- flat rank -------------------------------------------------------------

def _contribution(c: Classification, size: int) -> int:
    if c.kind == SPHERICAL:
        return 0
    if c.kind == AFFINE:
        return size - 1
    return 1


@dataclass(frozen=True)
class FlatRankReport:
    rank: int
    witness: tuple
    contributions: tuple = field(default_factory=tuple)

    def to_json(self) -> dict:
        return {
            "rank": self.rank,
            "witness": list(self.witness),
            "components": [
                {"generators": list(gens), "kind": kind, "contribution": k}
                for gens, kind, k in self.contributions
            ],
        }


def flat_rank(M: CoxeterMatrix) -> FlatRankReport:
    """Maximum over standard subsets T of the summed component contributions.

    Affine components of size k+1 give k, other infinite components give 1.
    """
    n = M.rank
    if n > MAX_FLAT_RANK_GENERATORS:
        raise ContractViolation(
            f"flat_rank: {n} generators exceeds the exhaustive-search limit {MAX_FLAT_RANK_GENERATORS}")

    @lru_cache(maxsize=None)
    def comp_value(part: tuple):
        c = _classify_idx(M, part)
        return c, _contribution(c, len(part))

    best = None
    for size in range(n + 1):
        for T in itertools.combinations(range(n), size):
            parts = _component_indices(M, T)
            total = sum(comp_value(p)[1] for p in parts)
            if best is None or total > best[0]:
                best = (total, T, parts)
    total, T, parts = best
    contributions = tuple(
        (tuple(M.labels(p)), comp_value(p)[0].kind, comp_value(p)[1]) for p in parts)
    return FlatRankReport(total, tuple(M.labels(T)), contributions)


def is_hyperbolic(M: CoxeterMatrix) -> bool:
    """Gromov-hyperbolic iff no Z^2, i.e. flat rank at most 1."""
    return flat_rank(M).rank <= 1
