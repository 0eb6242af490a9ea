"""Chamber-system models of buildings with their W-distance, projections and apartments.

Thin models have the chambers of ``W`` itself and ``delta(x, y) = x^-1 y``.
Thick models are right-angled: chambers are elements of the graph product of
the cyclic groups ``Z/(q_s + 1)`` over the commutation graph, written as
reduced syllable words ``(s, d)`` with digits ``1..q_s``. The W-distance is
the type of the reduced form of ``x^-1 y``. All-ones addresses form the
standard apartment.
"""

from __future__ import annotations

import heapq
import itertools
import random
from collections import deque
from dataclasses import dataclass, field
from typing import Callable, Iterable, Sequence

from .cayley import CoxeterGroup, Element
from .diagram import INF, SPHERICAL, CoxeterMatrix, classify, components
from .errors import (
    AddressValidationError, ContractViolation, NotFoundError, PreconditionError, VerificationError,
)

THIN = "Thin"
THICK = "Thick"


@dataclass(frozen=True)
class Address:
    """Reduced syllable word ``((s, d), ...)`` in canonical order; ``s`` is a generator index."""

    pairs: tuple

    def __len__(self):
        return len(self.pairs)


class BuildingModel:
    def __init__(self, M: CoxeterMatrix, thickness: dict | None = None):
        self.M = M
        self.group = CoxeterGroup(M)
        q = {g: 1 for g in M.generators}
        for key, val in (thickness or {}).items():
            s = M.generators[M.index(key)]
            if not isinstance(val, int) or val < 1:
                raise AddressValidationError(f"thickness of {s} must be an integer >= 1, got {val!r}")
            q[s] = val
        self.q = [q[g] for g in M.generators]
        self.kind = THIN if all(x == 1 for x in self.q) else THICK
        self.right_angled = M.is_right_angled()
        if self.kind == THICK and not self.right_angled:
            raise ContractViolation("thick models require a right-angled matrix (labels 2 and inf)")
        self._commute = [[M.orders[i][j] == 2 for j in range(M.rank)] for i in range(M.rank)]

    # -- addresses ---------------------------------------------------------

    def _canonical(self, pairs: list) -> tuple:
        """Lex-least linear extension of the commutation order on syllables."""
        n = len(pairs)
        if n <= 1:
            return tuple(pairs)
        preds = [0] * n
        succ = [[] for _ in range(n)]
        for i in range(n):
            for j in range(i + 1, n):
                if not self._commute[pairs[i][0]][pairs[j][0]]:
                    preds[j] += 1
                    succ[i].append(j)
        heap = [(pairs[i], i) for i in range(n) if preds[i] == 0]
        heapq.heapify(heap)
        out = []
        while heap:
            p, i = heapq.heappop(heap)
            out.append(p)
            for j in succ[i]:
                preds[j] -= 1
                if preds[j] == 0:
                    heapq.heappush(heap, (pairs[j], j))
        return tuple(out)

    def _reduce(self, pairs: Iterable) -> list:
        """Syllable reduction in the graph product (digits taken mod ``q_s + 1``)."""
        out: list = []
        for s, d in pairs:
            mod = self.q[s] + 1
            d %= mod
            if d == 0:
                continue
            k = len(out) - 1
            while k >= 0:
                t = out[k][0]
                if t == s or not self._commute[s][t]:
                    break
                k -= 1
            if k >= 0 and out[k][0] == s:
                nd = (out[k][1] + d) % mod
                if nd == 0:
                    del out[k]
                else:
                    out[k] = (s, nd)
            else:
                out.append((s, d))
        return out

    def address(self, pairs) -> Address:
        """Validate and canonicalise ``[(generator, digit), ...]``."""
        norm = []
        for item in pairs:
            try:
                gen, d = item
            except (TypeError, ValueError):
                raise AddressValidationError(f"address entry {item!r} is not a (generator, digit) pair") from None
            s = self.M.index(gen)
            if isinstance(d, bool) or not isinstance(d, int) or not 1 <= d <= self.q[s]:
                raise AddressValidationError(
                    f"digit {d!r} for generator {self.M.generators[s]} must lie in 1..{self.q[s]}")
            norm.append((s, d))
        return self._make(norm)

    def _make(self, pairs) -> Address:
        if self.right_angled:
            red = self._reduce(pairs)
            return Address(self._canonical(red))
        # thin, general type: addresses are normal forms
        w = self.group.normal_form(tuple(s for s, _ in pairs))
        return Address(tuple((s, 1) for s in w.word))

    def base(self) -> Address:
        return Address(())

    def from_element(self, w: Element) -> Address:
        """Chamber of the standard apartment corresponding to ``w``."""
        return self._make([(s, 1) for s in w.word])

    def inverse(self, x: Address) -> Address:
        return self._make([(s, (self.q[s] + 1 - d) % (self.q[s] + 1)) for s, d in reversed(x.pairs)])

    def mul(self, x: Address, y: Address) -> Address:
        return self._make(list(x.pairs) + list(y.pairs))

    def delta(self, x: Address, y: Address) -> Element:
        """W-distance ``delta(x, y)``."""
        if self.right_angled:
            inv = [(s, (self.q[s] + 1 - d) % (self.q[s] + 1)) for s, d in reversed(x.pairs)]
            red = self._reduce(inv + list(y.pairs))
            return self.group.normal_form(tuple(s for s, _ in red))
        return self.group.normal_form(tuple(s for s, _ in reversed(x.pairs)) + tuple(s for s, _ in y.pairs))

    def distance(self, x: Address, y: Address) -> int:
        return len(self.delta(x, y).word)

    def to_json_address(self, x: Address) -> list:
        return [[self.M.generators[s], d] for s, d in x.pairs]

    def to_json(self) -> dict:
        return {"matrix": self.M.to_json(),
                "thickness": {g: q for g, q in zip(self.M.generators, self.q)},
                "kind": self.kind}

    # -- panels --------------------------------------------------------------

    def panel_projection(self, x: Address, s: int) -> Address:
        """Chamber of the s-panel of ``x`` nearest the base chamber (label 0)."""
        if self.right_angled:
            # strip a trailing s-syllable that can be moved to the end
            pairs = list(x.pairs)
            k = len(pairs) - 1
            while k >= 0:
                t = pairs[k][0]
                if t == s or not self._commute[s][t]:
                    break
                k -= 1
            if k >= 0 and pairs[k][0] == s:
                del pairs[k]
                return Address(self._canonical(pairs))
            return x
        g = self.group
        w = g.normal_form(tuple(p for p, _ in x.pairs))
        ws = g.normal_form(w.word + (s,))
        shorter = ws if len(ws.word) < len(w.word) else w
        return self.from_element(shorter)

    def neighbor(self, x: Address, s, d: int) -> Address:
        """Chamber with label ``d`` in the s-panel of ``x``; label 0 is the base projection."""
        s = self.M.index(s)
        if not 0 <= d <= self.q[s]:
            raise AddressValidationError(
                f"panel label {d} for generator {self.M.generators[s]} must lie in 0..{self.q[s]}")
        p = self.panel_projection(x, s)
        if d == 0:
            return p
        return self._make(list(p.pairs) + [(s, d)])

    def panel(self, x: Address, s) -> list:
        s = self.M.index(s)
        return [self.neighbor(x, s, d) for d in range(self.q[s] + 1)]

    def random_address(self, rng: random.Random, radius: int) -> Address:
        steps = rng.randint(0, radius)
        pairs = []
        for _ in range(steps):
            s = rng.randrange(self.M.rank)
            pairs.append((s, rng.randint(1, self.q[s])))
        return self._make(pairs)


# -- axioms ------------------------------------------------------------------

@dataclass
class AxiomReport:
    samples: int
    violations: list = field(default_factory=list)

    @property
    def ok(self) -> bool:
        return not self.violations

    def to_json(self) -> dict:
        return {"samples": self.samples, "violations": self.violations, "ok": self.ok}


def check_axioms(B: BuildingModel, samples: int, radius: int, seed: int = 0,
                 delta: Callable | None = None) -> AxiomReport:
    """Test Bu1-Bu3 on random triples ``(x, y, s)``.

    Bu1: ``delta(x, y) = 1`` iff ``x = y``. Bu2: for ``z`` with
    ``delta(y, z) = s``, ``delta(x, z)`` is ``w`` or ``ws``, and ``ws`` when
    ``l(ws) = l(w) + 1``. Bu3: some ``z`` has ``delta(y, z) = s`` and
    ``delta(x, z) = ws``.
    """
    if samples < 1 or radius < 1:
        raise ContractViolation("check_axioms: samples and radius must be >= 1")
    delta = delta or B.delta
    g = B.group
    rng = random.Random(seed)
    report = AxiomReport(samples)
    J = B.to_json_address

    def bad(axiom, x, y, s, detail):
        report.violations.append({"axiom": axiom, "x": J(x), "y": J(y),
                                  "s": B.M.generators[s], "detail": detail})

    for _ in range(samples):
        x = B.random_address(rng, radius)
        y = x if rng.random() < 0.1 else B.random_address(rng, radius)
        s = rng.randrange(B.M.rank)
        w = delta(x, y)
        if (not w.word) != (x == y):
            bad("Bu1", x, y, s, f"delta = {w} for {'equal' if x == y else 'distinct'} chambers")
        if delta(x, x).word:
            bad("Bu1", x, x, s, "delta(x, x) is not the identity")
        ws = g.normal_form(w.word + (s,))
        grows = len(ws.word) == len(w.word) + 1
        found = None
        for z in B.panel(y, s):
            if z == y:
                continue
            dz = delta(y, z)
            if dz.word != (s,):
                bad("Bu2", x, y, s, f"panel neighbour has delta(y, z) = {dz}")
                continue
            dxz = delta(x, z)
            if dxz != w and dxz != ws:
                bad("Bu2", x, y, s, f"delta(x, z) = {dxz} is neither {w} nor {ws}")
            elif grows and dxz != ws:
                bad("Bu2", x, y, s, f"l(ws) = l(w) + 1 but delta(x, z) = {dxz}")
            if dxz == ws and found is None:
                found = z
        if found is None:
            bad("Bu3", x, y, s, f"no z in the s-panel of y with delta(x, z) = {ws}")
    return report


# -- residues and projections --------------------------------------------------

@dataclass(frozen=True)
class Residue:
    U: tuple  # generator indices
    anchor: Address


def is_spherical(M: CoxeterMatrix, U: Sequence[int]) -> bool:
    return all(classify(M, part).kind == SPHERICAL for part in components(M, M.labels(U)))


def residue_chambers(B: BuildingModel, rho: Residue) -> list:
    if not is_spherical(B.M, rho.U):
        raise ContractViolation(f"residue of type {B.M.labels(rho.U)} is not spherical")
    seen = {rho.anchor: None}
    frontier = [rho.anchor]
    while frontier:
        nxt = []
        for c in frontier:
            for s in rho.U:
                for z in B.panel(c, s):
                    if z not in seen:
                        seen[z] = None
                        nxt.append(z)
        frontier = nxt
    return list(seen)


def project(B: BuildingModel, rho: Residue, x: Address) -> Address:
    """Gate of ``x`` in the spherical residue; the gate property is checked on every chamber."""
    chambers = residue_chambers(B, rho)
    dists = [(B.distance(x, c), i) for i, c in enumerate(chambers)]
    best = min(dists)[0]
    winners = [chambers[i] for d, i in dists if d == best]
    if len(winners) != 1:
        raise VerificationError(f"projection is not unique ({len(winners)} chambers at distance {best})")
    c = winners[0]
    g = B.group
    dxc = B.delta(x, c)
    for d in chambers:
        dcd = B.delta(c, d)
        lhs = B.delta(x, d)
        if lhs != g.multiply(dxc, dcd) or len(lhs.word) != len(dxc.word) + len(dcd.word):
            raise VerificationError("gate property fails", counterexample=(c, d))
    return c


# -- apartments ----------------------------------------------------------------

@dataclass
class Apartment:
    """Isometric embedding of the part of ``W`` within ``radius`` of the seed elements."""

    model: BuildingModel
    phi: dict  # word tuple -> Address
    radius: int

    def chambers(self) -> set:
        return set(self.phi.values())

    def __contains__(self, x: Address) -> bool:
        return x in self._inverse()

    def _inverse(self) -> dict:
        return {a: w for w, a in self.phi.items()}

    def element_of(self, x: Address) -> Element | None:
        w = self._inverse().get(x)
        return None if w is None else Element(w, self.model.group)

    def verify(self) -> list:
        """Pairs ``(u, v)`` where ``delta(phi u, phi v) != u^-1 v``; empty when isometric."""
        g = self.model.group
        items = list(self.phi.items())
        bad = []
        for (u, a), (v, b) in itertools.combinations(items, 2):
            if self.model.delta(a, b) != g.normal_form(tuple(reversed(u)) + v):
                bad.append((u, v))
        return bad

    def to_json(self) -> dict:
        B = self.model
        return {
            "radius": self.radius,
            "chambers": [{"element": list(B.M.labels(w)), "address": B.to_json_address(a)}
                         for w, a in sorted(self.phi.items(), key=lambda kv: (len(kv[0]), kv[0]))],
        }


def extend_apartment(B: BuildingModel, C: Iterable[Address], f: dict, radius: int = 3,
                     budget: int = 200_000) -> Apartment:
    """Apartment through ``C`` extending the isometry ``f: C -> W``.

    Greedy breadth-first growth from ``f(C)``: each new element ``u = v s``
    gets the chamber of the s-panel of ``phi(v)`` consistent with every
    chamber placed so far. An isometry from a subset of ``W`` always extends to
    a whole apartment, so a consistent chamber exists at each step.
    """
    g = B.group
    C = list(dict.fromkeys(C))
    if not C:
        raise ContractViolation("extend_apartment: C must be nonempty")
    fw = {}
    for c in C:
        if c not in f:
            raise ContractViolation("extend_apartment: f must be defined on C")
        fw[c] = f[c] if isinstance(f[c], Element) else g.element(f[c])
    for a, b in itertools.combinations(C, 2):
        expect = g.normal_form(tuple(reversed(fw[a].word)) + fw[b].word)
        if B.delta(a, b) != expect:
            raise PreconditionError(
                f"extend_apartment: f is not an isometry: delta({B.to_json_address(a)}, "
                f"{B.to_json_address(b)}) = {B.delta(a, b)} but f gives {expect}", witness=(a, b))
    phi = {}
    for c in C:
        w = fw[c].word
        if w in phi and phi[w] != c:
            raise PreconditionError("extend_apartment: f is not injective", witness=(phi[w], c))
        phi[w] = c
    placed = list(phi.items())
    queue = deque((w, 0) for w in list(phi))
    spent = 0
    while queue:
        v, dist = queue.popleft()
        if dist >= radius:
            continue
        for s in range(B.M.rank):
            u = g.normal_form(v + (s,)).word
            if u in phi:
                continue
            chosen = None
            for z in B.panel(phi[v], s):
                if z == phi[v]:
                    continue
                spent += len(placed)
                if spent > budget:
                    raise NotFoundError(
                        f"extend_apartment: budget {budget} exhausted with {len(phi)} chambers placed")
                if all(B.delta(a, z) == g.normal_form(tuple(reversed(w)) + u) for w, a in placed):
                    chosen = z
                    break
            if chosen is None:
                raise NotFoundError(
                    f"extend_apartment: no consistent chamber for {list(B.M.labels(u))}")
            phi[u] = chosen
            placed.append((u, chosen))
            queue.append((u, dist + 1))
    return Apartment(B, phi, radius)


def extend_by_projection(B: BuildingModel, A: Apartment, C: Iterable[Address], rho: Residue,
                         c: Address, d: Address, radius: int | None = None) -> Apartment:
    """Apartment containing ``C`` and ``d``, when every chamber of ``C`` projects to ``c``.

    With ``w_d = delta(c, d)`` and ``d'`` the chamber of ``A`` at ``delta(c, d') = w_d``,
    the map fixing ``C`` and sending ``d`` to the element of ``d'`` is extended.
    """
    g = B.group
    C = list(dict.fromkeys(C))
    inv = A._inverse()
    if c not in C or c not in inv:
        raise PreconditionError("extend_by_projection: c must lie in C and in A", witness=(c,))
    chambers = residue_chambers(B, rho)
    if c not in chambers or d not in chambers:
        raise PreconditionError("extend_by_projection: c and d must lie in the residue", witness=(c, d))
    if d == c:
        raise PreconditionError("extend_by_projection: d must differ from c", witness=(d,))
    for c2 in C:
        if c2 not in inv:
            raise PreconditionError("extend_by_projection: C must lie in A", witness=(c2,))
        p = project(B, rho, c2)
        if p != c:
            raise PreconditionError(
                f"extend_by_projection: {B.to_json_address(c2)} projects to "
                f"{B.to_json_address(p)}, not to c", witness=(c2,))
    if d in inv:
        return A
    wd = B.delta(c, d)
    target = g.normal_form(inv[c] + wd.word)
    f = {c2: Element(inv[c2], g) for c2 in C}
    f[d] = target
    return extend_apartment(B, C + [d], f, radius=A.radius if radius is None else radius)


@dataclass
class FlatProjectionResult:
    chambers: list
    success: bool
    isometric: bool
    partial: bool
    c0_in_flat: bool = True
    apartment: Apartment | None = None
    detail: str = ""

    def to_json(self, B: BuildingModel) -> dict:
        return {
            "projection_set": [B.to_json_address(x) for x in self.chambers],
            "size": len(self.chambers),
            "verdict": "success" if self.success else "failure",
            "isometric": self.isometric,
            "partial": self.partial,
            "c0_in_flat": self.c0_in_flat,
            "detail": self.detail,
        }


def spherical_subsets(M: CoxeterMatrix) -> list:
    out = []
    for k in range(M.rank + 1):
        for U in itertools.combinations(range(M.rank), k):
            if is_spherical(M, U):
                out.append(U)
    return out


def flat_projection_set(B: BuildingModel, A: Apartment, F, c0: Address, window: int) -> FlatProjectionResult:
    """Projections of ``c0`` onto the spherical residues of the flat's chambers.

    The chambers of ``F`` are its coset elements within ``window`` steps of the
    base, mapped into ``A``. The verdict checks that the projection set lies in
    one apartment: the chart through a flat chamber is an isometry and
    ``extend_apartment`` succeeds on it. ``partial`` records flat chambers in
    the window that ``A`` does not cover. ``c0_in_flat`` records whether ``c0``
    is one of the flat's chambers in the window; the conclusion is only
    guaranteed in that case, and an off-flat ``c0`` may legitimately fail.
    """
    g = B.group
    # chambers of F: base . W_T ball
    elems = {F.base.word: F.base}
    frontier = [F.base]
    for _ in range(window):
        nxt = []
        for u in frontier:
            for t in F.T:
                v = g.normal_form(u.word + (t,))
                if v.word not in elems:
                    elems[v.word] = v
                    nxt.append(v)
        frontier = nxt
    partial = False
    flat_chambers = []
    for w in sorted(elems, key=lambda w: (len(w), w)):
        a = A.phi.get(w)
        if a is None:
            partial = True
            continue
        flat_chambers.append((w, a))
    if not flat_chambers:
        raise ContractViolation("flat_projection_set: no chamber of the flat is materialised in A")
    c0_in_flat = any(a == c0 for _, a in flat_chambers)
    P = {}
    for w, a in flat_chambers:
        for U in spherical_subsets(B.M):
            p = project(B, Residue(U, a), c0)
            P.setdefault(p, None)
    P = list(P)
    w_ref, a_ref = flat_chambers[0]
    ref = Element(w_ref, g)
    f = {p: g.multiply(ref, B.delta(a_ref, p)) for p in P}
    isometric = True
    detail = ""
    for p, q in itertools.combinations(P, 2):
        if B.delta(p, q) != g.normal_form(tuple(reversed(f[p].word)) + f[q].word):
            isometric = False
            detail = f"chart through the flat is not isometric on {B.to_json_address(p)}, {B.to_json_address(q)}"
            break
    apartment = None
    success = False
    if isometric:
        try:
            apartment = extend_apartment(B, P, f, radius=1)
            success = not apartment.verify()
            if not success:
                detail = "extended apartment failed its isometry check"
        except (NotFoundError, PreconditionError) as exc:
            detail = str(exc)
    return FlatProjectionResult(P, success, isometric, partial, c0_in_flat, apartment, detail)


def standard_apartment(B: BuildingModel, radius: int) -> Apartment:
    """All-ones chambers of ``W`` within ``radius``."""
    ball = B.group.enumerate_ball(radius)
    return Apartment(B, {u.word: B.from_element(u) for u in ball}, radius)


__all__ = [
    "Address", "BuildingModel", "THIN", "THICK", "AxiomReport", "check_axioms", "Residue",
    "residue_chambers", "project", "Apartment", "extend_apartment", "extend_by_projection",
    "FlatProjectionResult", "flat_projection_set", "standard_apartment", "spherical_subsets",
    "is_spherical",
]
