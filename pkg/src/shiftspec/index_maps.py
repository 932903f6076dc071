"""Finitely presented self-maps of an index set and their functional graphs.

A :class:`FunctionalMap` is either a finite lookup table or an integer rule
(affine, ``n**2 + c``, or a piecewise combination over intervals and residue
classes). Integer rules are decomposed into *cells*, arithmetic progressions
on which a single affine or quadratic sub-rule applies; that decomposition is
what lets injectivity, surjectivity and cycle questions be answered exactly,
with explicit certificates, and with ``Unknown`` only when no certificate is
available inside the exploration budget.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from functools import cached_property
from itertools import combinations
from typing import Hashable, Iterable, Optional, Sequence, Union

from shiftspec import kernels
from shiftspec.errors import BudgetError, DomainError, MapDefinitionError, PreconditionError
from shiftspec.intsets import AP
from shiftspec.verdicts import (
    AnalyticCertificate,
    AperiodicPointWitness,
    EscapeCertificate,
    FiniteExhaustive,
    InjectivityCollision,
    OrbitMeeting,
    PeriodicWitness,
    Verdict,
)

Index = Hashable

# Iterating n -> n**2 + c doubles the bit length every step.
MAX_BITS = 1 << 24


def sort_key(idx: Index) -> tuple:
    """Deterministic total order on mixed indices (integers first)."""
    if isinstance(idx, int) and not isinstance(idx, bool):
        return (0, idx, "")
    return (1, 0, str(idx))


# ---------------------------------------------------------------------------
# presentations


@dataclass(frozen=True)
class Budget:
    magnitude: int = 10**6
    steps: int = 10**4

    def __post_init__(self):
        if self.magnitude < 1 or self.steps < 1:
            raise MapDefinitionError("budgets must be positive")


@dataclass(frozen=True)
class IndexSet:
    """Either a finite list of atoms (``atoms``) or all of Z (``atoms=None``)."""

    atoms: Optional[tuple] = None

    def __post_init__(self):
        if self.atoms is not None:
            if not self.atoms:
                raise MapDefinitionError("a finite index set must be nonempty")
            if len(set(self.atoms)) != len(self.atoms):
                raise MapDefinitionError("duplicate atoms in index set")

    @classmethod
    def finite(cls, atoms: Iterable[Index]) -> "IndexSet":
        return cls(tuple(atoms))

    @classmethod
    def integers(cls) -> "IndexSet":
        return cls(None)

    @property
    def is_finite(self) -> bool:
        return self.atoms is not None

    def __contains__(self, idx: object) -> bool:
        if self.atoms is None:
            return isinstance(idx, int) and not isinstance(idx, bool)
        return idx in self._members

    @cached_property
    def _members(self) -> frozenset:
        return frozenset(self.atoms or ())


@dataclass(frozen=True)
class Table:
    pairs: tuple

    @classmethod
    def from_mapping(cls, mapping) -> "Table":
        return cls(tuple(mapping.items()))

    @cached_property
    def mapping(self) -> dict:
        return dict(self.pairs)


@dataclass(frozen=True)
class Affine:
    """n -> a*n + b"""

    a: int
    b: int


@dataclass(frozen=True)
class SquarePlus:
    """n -> n**2 + c"""

    c: int


@dataclass(frozen=True)
class Interval:
    lo: Optional[int] = None
    hi: Optional[int] = None

    def to_ap(self) -> Optional[AP]:
        return AP.make(self.lo, self.hi)

    def __contains__(self, n: int) -> bool:
        return (self.lo is None or n >= self.lo) and (self.hi is None or n <= self.hi)


@dataclass(frozen=True)
class Residue:
    residue: int
    modulus: int

    def to_ap(self) -> Optional[AP]:
        return AP.make(None, None, self.residue, self.modulus)

    def __contains__(self, n: int) -> bool:
        return (n - self.residue) % self.modulus == 0


Guard = Union[Interval, Residue]
SubRule = Union[Affine, SquarePlus]


@dataclass(frozen=True)
class Piecewise:
    branches: tuple  # of (Guard, SubRule)
    default: SubRule


Rule = Union[Table, Affine, SquarePlus, Piecewise]


def _eval_subrule(rule: SubRule, n: int) -> int:
    if isinstance(rule, Affine):
        return rule.a * n + rule.b
    return n * n + rule.c


@dataclass(frozen=True)
class FunctionalMap:
    domain: IndexSet
    rule: Rule
    budget: Budget = Budget()
    name: str = field(default="", compare=False)

    def __post_init__(self):
        if isinstance(self.rule, Table):
            if not self.domain.is_finite:
                raise MapDefinitionError("table rules need a finite index set")
            mapping = self.rule.mapping
            if len(mapping) != len(self.rule.pairs):
                raise MapDefinitionError("table assigns some atom twice")
            if set(mapping) != set(self.domain.atoms):
                raise MapDefinitionError("table is not total on its domain")
            for v in mapping.values():
                if v not in self.domain:
                    raise MapDefinitionError(f"table value {v!r} is outside the domain")
            return
        if self.domain.is_finite:
            raise MapDefinitionError("integer rules need the Integers index set")
        if isinstance(self.rule, SquarePlus):
            _check_int(self.rule.c)
        elif isinstance(self.rule, Affine):
            _check_int(self.rule.a, self.rule.b)
        elif isinstance(self.rule, Piecewise):
            _check_piecewise(self.rule)
        else:
            raise MapDefinitionError(f"unsupported rule {self.rule!r}")

    def __call__(self, idx: Index) -> Index:
        return apply(self, idx)

    @property
    def is_table(self) -> bool:
        return isinstance(self.rule, Table)

    @cached_property
    def atoms(self) -> tuple:
        if not self.domain.is_finite:
            raise DomainError("infinite domain has no atom list")
        return self.domain.atoms

    @cached_property
    def cells(self) -> tuple:
        """``(AP, SubRule)`` pieces partitioning Z (integer rules only)."""
        if self.is_table:
            raise DomainError("table maps have no integer cells")
        return _build_cells(self.rule)

    @cached_property
    def _memo(self) -> dict:
        return {}


def _check_int(*values):
    for v in values:
        if not isinstance(v, int) or isinstance(v, bool):
            raise MapDefinitionError(f"coefficient {v!r} is not an integer")


def _check_piecewise(rule: Piecewise):
    aps = []
    for guard, sub in rule.branches:
        if not isinstance(sub, (Affine, SquarePlus)):
            raise MapDefinitionError("piecewise branches take affine or square_plus rules")
        if isinstance(guard, Residue) and guard.modulus < 1:
            raise MapDefinitionError("residue guard needs modulus >= 1")
        ap = guard.to_ap()
        if ap is None:
            raise MapDefinitionError(f"guard {guard!r} is empty")
        aps.append(ap)
    if not isinstance(rule.default, (Affine, SquarePlus)):
        raise MapDefinitionError("piecewise default must be affine or square_plus")
    for (i, p), (j, q) in combinations(enumerate(aps), 2):
        if p.intersect(q) is not None:
            raise MapDefinitionError(f"piecewise guards {i} and {j} overlap")


def _build_cells(rule: Rule) -> tuple:
    if isinstance(rule, (Affine, SquarePlus)):
        return ((AP.everything(), rule),)
    cuts = set()
    modulus = 1
    for guard, _ in rule.branches:
        if isinstance(guard, Interval):
            if guard.lo is not None:
                cuts.add(guard.lo)
            if guard.hi is not None:
                cuts.add(guard.hi + 1)
        else:
            modulus = math.lcm(modulus, guard.modulus)
    cuts = sorted(cuts)
    bounds = [None, *cuts]
    segments = [(lo, None if k + 1 >= len(bounds) else bounds[k + 1] - 1) for k, lo in enumerate(bounds)]
    cells = []
    for lo, hi in segments:
        for r in range(modulus):
            cell = AP.make(lo, hi, r, modulus)
            if cell is None:
                continue
            sample = cell.some_members(1)[0]
            sub = next((s for g, s in rule.branches if sample in g), rule.default)
            cells.append((cell, sub))
    return tuple(cells)


def table(mapping, budget: Budget = Budget(), name: str = "") -> FunctionalMap:
    return FunctionalMap(IndexSet.finite(mapping.keys()), Table.from_mapping(mapping), budget, name)


def affine(a: int, b: int, budget: Budget = Budget(), name: str = "") -> FunctionalMap:
    return FunctionalMap(IndexSet.integers(), Affine(a, b), budget, name)


def square_plus(c: int, budget: Budget = Budget(), name: str = "") -> FunctionalMap:
    return FunctionalMap(IndexSet.integers(), SquarePlus(c), budget, name)


def piecewise(branches: Sequence, default: SubRule, budget: Budget = Budget(), name: str = "") -> FunctionalMap:
    return FunctionalMap(IndexSet.integers(), Piecewise(tuple(branches), default), budget, name)


# ---------------------------------------------------------------------------
# evaluation


def apply(m: FunctionalMap, idx: Index) -> Index:
    rule = m.rule
    if isinstance(rule, Table):
        try:
            return rule.mapping[idx]
        except (KeyError, TypeError):
            raise DomainError(f"{idx!r} is not in the domain") from None
    if not isinstance(idx, int) or isinstance(idx, bool):
        raise DomainError(f"{idx!r} is not an integer")
    if isinstance(rule, Piecewise):
        for guard, sub in rule.branches:
            if idx in guard:
                return _eval_subrule(sub, idx)
        return _eval_subrule(rule.default, idx)
    return _eval_subrule(rule, idx)


def iterate(m: FunctionalMap, idx: Index, t: int) -> Index:
    if t < 0:
        raise ValueError("iteration count must be nonnegative")
    rule = m.rule
    if isinstance(rule, Affine) and rule.a in (-1, 0, 1):
        apply(m, idx)  # domain check
        if t == 0:
            return idx
        if rule.a == 1:
            return idx + t * rule.b
        if rule.a == 0:
            return rule.b
        return idx if t % 2 == 0 else rule.b - idx
    if isinstance(rule, Table):
        return _iterate_table(m, idx, t)
    x = idx
    for _ in range(t):
        x = apply(m, x)
        if x.bit_length() > MAX_BITS:
            raise OverflowError(f"iterate exceeded {MAX_BITS} bits; refusing to continue")
    return x


def _iterate_table(m: FunctionalMap, idx: Index, t: int) -> Index:
    mapping = m.rule.mapping
    if idx not in mapping:
        raise DomainError(f"{idx!r} is not in the domain")
    seen = {}
    path = []
    x = idx
    step = 0
    while step < t:
        if x in seen:
            start = seen[x]
            cycle = len(path) - start
            return path[start + (t - step) % cycle]
        seen[x] = len(path)
        path.append(x)
        x = mapping[x]
        step += 1
    return x


def preimages(m: FunctionalMap, idx: Index) -> Optional[frozenset]:
    """Exact preimage set of ``idx``.

    Returns ``None`` when the fiber is infinite (a constant piece on an
    unbounded cell) and so cannot be listed.
    """
    if m.is_table:
        return frozenset(x for x, v in m.rule.pairs if v == idx)
    if not isinstance(idx, int) or isinstance(idx, bool):
        return frozenset()
    out = set()
    for cell, sub in m.cells:
        for piece in _cell_preimage(cell, sub, idx):
            if not piece.is_finite:
                return None
            out.update(piece)
    return frozenset(out)


def _cell_preimage(cell: AP, sub: SubRule, y: int) -> list[AP]:
    if isinstance(sub, Affine):
        if sub.a == 0:
            return [cell] if sub.b == y else []
        q, r = divmod(y - sub.b, sub.a)
        return [AP.point(q)] if r == 0 and q in cell else []
    d = y - sub.c
    if d < 0:
        return []
    root = math.isqrt(d)
    if root * root != d:
        return []
    return [AP.point(n) for n in sorted({root, -root}) if n in cell]


def _cell_image(cell: AP, sub: SubRule) -> Optional[AP]:
    if isinstance(sub, Affine):
        return cell.affine_image(sub.a, sub.b)
    if cell.is_finite and len(cell) == 1:
        return AP.point(_eval_subrule(sub, cell.lo))
    return None


# ---------------------------------------------------------------------------
# injectivity and surjectivity


def decide_injective(m: FunctionalMap) -> Verdict:
    memo = m._memo
    if "injective" not in memo:
        memo["injective"] = _decide_injective(m)
    return memo["injective"]


def _decide_injective(m: FunctionalMap) -> Verdict:
    if m.is_table:
        seen = {}
        for x in m.atoms:
            y = m.rule.mapping[x]
            if y in seen:
                return Verdict.no(InjectivityCollision(seen[y], x))
            seen[y] = x
        return Verdict.yes(FiniteExhaustive(len(m.atoms)))
    rule = m.rule
    if isinstance(rule, Affine):
        if rule.a == 0:
            return Verdict.no(InjectivityCollision(0, 1))
        return Verdict.yes(AnalyticCertificate(f"n -> {rule.a}n + {rule.b} is injective because the slope is nonzero"))
    if isinstance(rule, SquarePlus):
        return Verdict.no(InjectivityCollision(1, -1))
    pair, unresolved = _piecewise_collision(m)
    if pair is not None:
        return Verdict.no(InjectivityCollision(*pair))
    if unresolved:
        return Verdict.unknown(m.budget.magnitude, "quadratic piece against another piece: " + unresolved)
    return Verdict.yes(AnalyticCertificate("cells are injective and their images are pairwise disjoint progressions"))


def _piecewise_collision(m: FunctionalMap) -> tuple[Optional[tuple], str]:
    cells = m.cells
    for cell, sub in cells:
        if isinstance(sub, Affine) and sub.a == 0:
            two = cell.some_members(2)
            if len(two) == 2:
                return (two[0], two[1]), ""
        elif isinstance(sub, SquarePlus):
            mirrored = cell.intersect(cell.negate())
            if mirrored is not None:
                n = next((k for k in mirrored.some_members(3) if k != 0), None)
                if n is not None:
                    return (n, -n), ""
    unresolved = ""
    for (c1, s1), (c2, s2) in combinations(cells, 2):
        quad1, quad2 = isinstance(s1, SquarePlus), isinstance(s2, SquarePlus)
        if not quad1 and not quad2:
            meet = _cell_image(c1, s1).intersect(_cell_image(c2, s2))
            if meet is not None:
                y = meet.some_members(1)[0]
                return (_cell_preimage(c1, s1, y)[0].lo, _cell_preimage(c2, s2, y)[0].lo), ""
        elif quad1 and quad2:
            pair = _quadratic_pair(c1, s1.c, c2, s2.c)
            if pair is not None:
                return pair, ""
        else:
            (cq, sq), (ca, sa) = ((c1, s1), (c2, s2)) if quad1 else ((c2, s2), (c1, s1))
            window = min(m.budget.magnitude, 10_000)
            found = None
            for n in cq.members_between(-window, window):
                hit = _cell_preimage(ca, sa, n * n + sq.c)
                if hit:
                    found = (n, hit[0].lo)
                    break
            if found is not None:
                return found, ""
            if cq.is_finite and cq.lo >= -window and cq.hi <= window:
                continue
            unresolved = f"no collision with |n| <= {window}"
    return None, unresolved


def _quadratic_pair(c1: AP, k1: int, c2: AP, k2: int) -> Optional[tuple[int, int]]:
    """Some n1 in c1, n2 in c2 with n1**2 + k1 == n2**2 + k2."""
    if k1 == k2:
        meet = c1.intersect(c2.negate())
        if meet is None:
            return None
        n = next((k for k in meet.some_members(3) if k != 0), None)
        return None if n is None else (n, -n)
    d = k2 - k1  # (n1 - n2)(n1 + n2) = d
    for u in range(1, math.isqrt(abs(d)) + 1):
        if d % u:
            continue
        for x, y in ((u, d // u), (d // u, u), (-u, -(d // u)), (-(d // u), -u)):
            if (x + y) % 2:
                continue
            n1, n2 = (x + y) // 2, (y - x) // 2
            if n1 in c1 and n2 in c2:
                return n1, n2
    return None


_INFINITE = object()


def image_complement(m: FunctionalMap):
    """Points of Z with empty preimage, as a frozenset, or ``None`` when that
    set is infinite or too large to list.

    Images of affine cells are progressions, so the complement of their union
    is computed exactly segment by segment; quadratic images are sparse and
    only ever rescue finitely many points.
    """
    if m.is_table:
        return frozenset(set(m.atoms) - set(m.rule.mapping.values()))
    memo = m._memo
    if "complement" not in memo:
        result = _image_complement(m)
        memo["complement"] = None if result is _INFINITE else result
    return memo["complement"]


def _image_complement(m: FunctionalMap):
    images = [img for cell, sub in m.cells if (img := _cell_image(cell, sub)) is not None]
    modulus = 1
    cuts = set()
    for img in images:
        modulus = math.lcm(modulus, img.modulus)
        if modulus > 100_000:
            return _INFINITE
        if img.lo is not None:
            cuts.add(img.lo)
        if img.hi is not None:
            cuts.add(img.hi + 1)
    bounds = [None, *sorted(cuts)]
    missing = []
    for k, lo in enumerate(bounds):
        hi = None if k + 1 >= len(bounds) else bounds[k + 1] - 1
        for r in range(modulus):
            cls = AP.make(lo, hi, r, modulus)
            if cls is None:
                continue
            sample = cls.some_members(1)[0]
            if any(sample in img for img in images):
                continue
            if not cls.is_finite:
                return _INFINITE
            if len(cls) + len(missing) > 1_000_000:
                return _INFINITE
            missing.extend(cls)
    quads = [(c, s) for c, s in m.cells if isinstance(s, SquarePlus)]
    return frozenset(y for y in missing if not any(_cell_preimage(c, s, y) for c, s in quads))


def decide_surjective(m: FunctionalMap) -> Verdict:
    if m.is_table:
        comp = image_complement(m)
        if comp:
            return Verdict.no(AnalyticCertificate(f"{min(comp, key=sort_key)!r} has no preimage"))
        return Verdict.yes(FiniteExhaustive(len(m.atoms)))
    comp = image_complement(m)
    if comp is None:
        return Verdict.no(AnalyticCertificate("infinitely many integers have no preimage"))
    if comp:
        return Verdict.no(AnalyticCertificate(f"{min(comp)} has no preimage"))
    return Verdict.yes(AnalyticCertificate("images of the affine cells cover Z"))


# ---------------------------------------------------------------------------
# periodic points


def decide_periodic_free(m: FunctionalMap) -> Verdict:
    """Yes iff the map has no periodic point."""
    memo = m._memo
    if "periodic_free" not in memo:
        memo["periodic_free"] = _decide_periodic_free(m)
    return memo["periodic_free"]


def _decide_periodic_free(m: FunctionalMap) -> Verdict:
    rule = m.rule
    if isinstance(rule, Table):
        tail, period, _ = _table_graph(m)
        for k, x in enumerate(m.atoms):
            if tail[k] == 0:
                return Verdict.no(PeriodicWitness(x, period[k]))
        raise AssertionError("finite functional graph without a cycle")
    if isinstance(rule, Affine):
        a, b = rule.a, rule.b
        if a == 1 and b != 0:
            direction = ">" if b > 0 else "<"
            return Verdict.yes(EscapeCertificate(0, f"phi(n) {direction} n for every integer n"))
        if a == 1:
            return Verdict.no(PeriodicWitness(0, 1))
        if a == 0:
            return Verdict.no(PeriodicWitness(b, 1))
        if a == -1:
            return Verdict.no(PeriodicWitness(b // 2, 1) if b % 2 == 0 else PeriodicWitness(0, 2))
    return _cells_periodic_free(m)


def _cells_periodic_free(m: FunctionalMap) -> Verdict:
    cells = m.cells
    for direction, sym in ((1, ">"), (-1, "<")):
        if all(_cell_drifts(c, s, direction) for c, s in cells):
            return Verdict.yes(EscapeCertificate(0, f"phi(n) {sym} n for every integer n"))
    radius = _escape_radius(cells)
    if radius is not None:
        if radius > m.budget.magnitude:
            return Verdict.unknown(m.budget.magnitude, f"escape radius {radius} exceeds the magnitude budget")
        cycle = _core_cycle(m, radius)
        if cycle is None:
            return Verdict.yes(EscapeCertificate(radius, f"|phi(n)| > |n| whenever |n| > {radius}; no cycle meets [-{radius}, {radius}]"))
        return Verdict.no(PeriodicWitness(min(cycle), len(cycle)))
    cycle = _search_cycle(m, min(m.budget.magnitude, 10_000))
    if cycle is not None:
        return Verdict.no(PeriodicWitness(min(cycle), len(cycle)))
    return Verdict.unknown(m.budget.steps, "no cycle found and no escape certificate applies")


def _cell_drifts(cell: AP, sub: SubRule, direction: int) -> bool:
    """Whether ``sign(phi(n) - n) == direction`` on the whole cell."""
    if isinstance(sub, Affine):
        slope, b = sub.a - 1, sub.b
        if slope == 0:
            return b * direction > 0
        # extreme of a linear function sits at one end of the cell
        end = cell.lo if (slope > 0) == (direction > 0) else cell.hi
        if end is None:
            return False
        return (slope * end + b) * direction > 0
    c = sub.c
    if direction > 0:
        if c > 0:
            return True
        k = math.isqrt(-c) + 2
        return all(n * n - n + c > 0 for n in cell.members_between(-k, k))
    if not cell.is_finite or len(cell) > 100_000:
        return False
    return all(n * n - n + c < 0 for n in cell)


def _escape_radius(cells) -> Optional[int]:
    """R such that ``|phi(n)| > |n|`` for every ``|n| > R``, or ``None``."""
    radius = 0
    for cell, sub in cells:
        radius = max([radius, *(abs(v) for v in cell.finite_bounds())])
        if cell.is_finite:
            continue
        sides = [s for s, open_end in ((1, cell.hi is None), (-1, cell.lo is None)) if open_end]
        for side in sides:
            r = _side_escape(sub, side)
            if r is None:
                return None
            radius = max(radius, r)
    return radius


def _side_escape(sub: SubRule, side: int) -> Optional[int]:
    if isinstance(sub, SquarePlus):
        return math.isqrt(abs(sub.c)) + 1
    a, b = sub.a, sub.b
    if abs(a) >= 2:
        return abs(b) // (abs(a) - 1)
    if abs(a) == 1 and a * side * b > 0:
        return 0
    return None


def _core_cycle(m: FunctionalMap, radius: int) -> Optional[list[int]]:
    """Exhaustive cycle search on ``[-radius, radius]``; orbits that leave the
    core never return (the escape certificate guarantees it)."""
    done = set()
    for start in _center_out(radius):
        if start in done:
            continue
        where = {}
        path = []
        x = start
        while -radius <= x <= radius and x not in done and x not in where:
            where[x] = len(path)
            path.append(x)
            x = apply(m, x)
        done.update(path)
        if x in where:
            return path[where[x]:]
    return None


def _search_cycle(m: FunctionalMap, window: int) -> Optional[list[int]]:
    """Budgeted cycle search from the starts in ``[-window, window]``."""
    done = set()
    steps_left = m.budget.steps * 50
    for start in _center_out(window):
        if start in done:
            continue
        where = {}
        path = []
        x = start
        while x not in done and x not in where and len(path) < m.budget.steps and abs(x) <= m.budget.magnitude:
            where[x] = len(path)
            path.append(x)
            x = apply(m, x)
        done.update(path)
        steps_left -= len(path)
        if x in where:
            return path[where[x]:]
        if steps_left <= 0:
            return None
    return None


def _center_out(radius: int):
    yield 0
    for k in range(1, radius + 1):
        yield -k
        yield k


def _table_graph(m: FunctionalMap):
    memo = m._memo
    if "graph" not in memo:
        pos = {x: k for k, x in enumerate(m.atoms)}
        memo["graph"] = kernels.functional_graph([pos[m.rule.mapping[x]] for x in m.atoms])
    return memo["graph"]


def period(m: FunctionalMap, idx: Index) -> int:
    """Minimal ``k >= 1`` with ``phi^k(idx) == idx``."""
    if m.is_table:
        apply(m, idx)
        k = m.atoms.index(idx)
        tail, per, _ = _table_graph(m)
        if tail[k] != 0:
            raise PreconditionError(f"{idx!r} is not periodic")
        return per[k]
    x = apply(m, idx)
    for k in range(1, m.budget.steps + 1):
        if x == idx:
            return k
        x = apply(m, x)
        if abs(x) > m.budget.magnitude and not _is_bounded_orbit_rule(m):
            break
    raise PreconditionError(f"{idx!r} is not periodic within {m.budget.steps} steps")


def _is_bounded_orbit_rule(m: FunctionalMap) -> bool:
    return isinstance(m.rule, Affine) and abs(m.rule.a) <= 1


def is_periodic(m: FunctionalMap, idx: Index) -> Verdict:
    """Per-index periodicity with a certificate either way."""
    try:
        return Verdict.yes(PeriodicWitness(idx, period(m, idx)))
    except PreconditionError:
        pass
    if m.is_table:
        k = m.atoms.index(idx)
        tail, per, _ = _table_graph(m)
        return Verdict.no(AperiodicPointWitness(idx, tail[k], per[k]))
    cert = _aperiodic_certificate(m, idx)
    if cert is not None:
        return Verdict.no(cert)
    return Verdict.unknown(m.budget.steps, f"{idx!r} did not return and no aperiodicity certificate applies")


def _aperiodic_certificate(m: FunctionalMap, idx: Index):
    pf = decide_periodic_free(m)
    if pf.is_yes:
        return pf.certificate
    # orbit entering a cycle that does not contain idx
    seen = {}
    x = idx
    for step in range(m.budget.steps):
        if x in seen:
            cyc = step - seen[x]
            if seen[x] > 0:
                return AperiodicPointWitness(idx, seen[x], cyc)
            break
        seen[x] = step
        x = apply(m, x)
        if abs(x) > m.budget.magnitude:
            break
    if not m.is_table and _drift_region_certifies(m, idx):
        return AnalyticCertificate(f"the orbit of {idx} stays in cells where phi moves strictly one way")
    return None


def _drift_region_certifies(m: FunctionalMap, idx: int) -> bool:
    cells = m.cells
    start = next(k for k, (c, _) in enumerate(cells) if idx in c)
    reach = {start}
    todo = [start]
    while todo:
        k = todo.pop()
        img = _cell_image(*cells[k])
        for j, (c, _) in enumerate(cells):
            if j in reach:
                continue
            if img is None or img.intersect(c) is not None:
                reach.add(j)
                todo.append(j)
    return any(all(_cell_drifts(*cells[k], d) for k in reach) for d in (1, -1))


# ---------------------------------------------------------------------------
# orbit classes


def same_class(m: FunctionalMap, a: Index, b: Index) -> Verdict:
    """Yes iff ``phi^i(a) == phi^j(b)`` for some ``i, j >= 0``."""
    apply(m, a)
    apply(m, b)
    if a == b:
        return Verdict.yes(OrbitMeeting(0, 0, a))
    if m.is_table:
        return _table_same_class(m, a, b)
    rule = m.rule
    if isinstance(rule, Affine):
        v = _affine_same_class(rule, a, b)
        if v is not None:
            return v
    return _search_same_class(m, a, b)


def _table_same_class(m, a, b):
    _, _, label = _table_graph(m)
    ka, kb = m.atoms.index(a), m.atoms.index(b)
    if label[ka] != label[kb]:
        return Verdict.no(AnalyticCertificate(f"orbits of {a!r} and {b!r} end in distinct cycles"))
    seen = {}
    x = a
    for i in range(len(m.atoms) + 1):
        seen.setdefault(x, i)
        x = apply(m, x)
    y = b
    for j in range(len(m.atoms) + 1):
        if y in seen:
            return Verdict.yes(OrbitMeeting(seen[y], j, y))
        y = apply(m, y)
    raise AssertionError("same cycle label but orbits do not meet")


def _affine_same_class(rule: Affine, a: int, b: int) -> Optional[Verdict]:
    s, c = rule.a, rule.b
    if s == 1 and c == 0:
        return Verdict.no(AnalyticCertificate("the identity has singleton classes"))
    if s == 1:
        if (b - a) % c:
            return Verdict.no(AnalyticCertificate(f"translation by {c} preserves residues mod {abs(c)}"))
        k = (b - a) // c
        return Verdict.yes(OrbitMeeting(k, 0, b) if k >= 0 else OrbitMeeting(0, -k, a))
    if s == -1:
        if a + b == c:
            return Verdict.yes(OrbitMeeting(1, 0, b))
        return Verdict.no(AnalyticCertificate(f"classes of n -> {c} - n are the pairs {{n, {c} - n}}"))
    if s == 0:
        return Verdict.yes(OrbitMeeting(1, 1, c))
    return None


def _search_same_class(m: FunctionalMap, a: int, b: int) -> Verdict:
    orbits = [{a: 0}, {b: 0}]
    cur = [a, b]
    cycled = [None, None]
    alive = [True, True]
    for step in range(1, m.budget.steps + 1):
        for k in (0, 1):
            if not alive[k]:
                continue
            x = apply(m, cur[k])
            if x in orbits[k]:
                cycled[k] = x
                alive[k] = False
                continue
            cur[k] = x
            orbits[k][x] = step
            other = orbits[1 - k]
            if x in other:
                i, j = (step, other[x]) if k == 0 else (other[x], step)
                return Verdict.yes(OrbitMeeting(i, j, x))
            if abs(x) > m.budget.magnitude:
                alive[k] = False
        if not any(alive):
            break
    if cycled[0] is not None and cycled[1] is not None:
        return Verdict.no(AnalyticCertificate(f"orbits of {a} and {b} end in distinct cycles"))
    verdict = _interleave_certificate(m, cur[0], cur[1], orbits)
    if verdict is not None:
        return verdict
    return Verdict.unknown(m.budget.steps, "orbits neither met nor separated within budget")


def _monotone_region(m: FunctionalMap) -> Optional[int]:
    """Threshold T with phi increasing and phi(n) > n on [T, infinity)."""
    rule = m.rule
    if isinstance(rule, SquarePlus):
        return max(1, math.isqrt(abs(rule.c)) + 2)
    if isinstance(rule, Affine) and rule.a >= 2:
        return abs(rule.b) + 1
    return None


def _interleave_certificate(m: FunctionalMap, p: int, q: int, orbits) -> Optional[Verdict]:
    """On a region where phi is increasing and expanding, two orbits that
    interleave strictly stay interleaved forever, so they never meet."""
    threshold = _monotone_region(m)
    if threshold is None or p == q:
        return None
    if p < threshold or q < threshold:
        return None
    lo, hi = (p, q) if p < q else (q, p)
    for _ in range(64):
        nxt = apply(m, lo)
        if nxt == hi:
            return None
        if nxt > hi:
            return Verdict.no(AnalyticCertificate(f"orbits interleave strictly beyond {threshold} where phi is increasing"))
        lo = nxt
    return None


@dataclass(frozen=True)
class ClassDescriptor:
    """Type of the orbit class of ``representative`` under an injective map."""

    representative: Index
    kind: str  # "cycle" | "chain_n" | "chain_z"
    period: Optional[int] = None
    root: Optional[Index] = None
    certificate: object = field(default=None, compare=False)

    def signature(self) -> tuple:
        return (self.kind, self.period, self.root)


def class_type(m: FunctionalMap, idx: Index) -> ClassDescriptor:
    inj = decide_injective(m)
    if not inj.is_yes:
        raise PreconditionError(f"class_type needs an injective map (injectivity: {inj.value.value})")
    periodic = is_periodic(m, idx)
    if periodic.is_yes:
        k = periodic.certificate.period
        cyc = [idx]
        for _ in range(k - 1):
            cyc.append(apply(m, cyc[-1]))
        return ClassDescriptor(min(cyc, key=sort_key), "cycle", period=k, certificate=periodic.certificate)
    if periodic.is_unknown:
        raise BudgetError(f"cannot decide whether {idx!r} is periodic", partial=periodic)
    if decide_surjective(m).is_yes:
        return ClassDescriptor(idx, "chain_z", certificate=AnalyticCertificate("bijective map, aperiodic point"))
    x = idx
    for depth in range(m.budget.steps + 1):
        pre = preimages(m, x)
        if pre is None:
            raise AssertionError("injective map with an infinite fiber")
        if not pre:
            return ClassDescriptor(x, "chain_n", root=x, certificate=AnalyticCertificate(f"{x!r} has no preimage; depth {depth}"))
        (x,) = pre
    raise BudgetError(f"backward chain from {idx!r} neither ended nor was certified total")


def backward_depth(m: FunctionalMap, idx: Index, root: Index) -> int:
    """Steps from ``root`` forward to ``idx`` for an injective map."""
    x = idx
    for depth in range(m.budget.steps + 1):
        if x == root:
            return depth
        pre = preimages(m, x)
        if not pre:
            break
        (x,) = pre
    raise PreconditionError(f"{idx!r} is not downstream of {root!r}")


# ---------------------------------------------------------------------------
# confluence


def _group_by_class(m: FunctionalMap, points: list) -> list[list]:
    groups: list[list] = []
    for p in points:
        for g in groups:
            v = same_class(m, g[0], p)
            if v.is_unknown:
                raise BudgetError(f"cannot decide whether {g[0]!r} and {p!r} share a class", partial=groups)
            if v.is_yes:
                g.append(p)
                break
        else:
            groups.append([p])
    return groups


def merge_point(m: FunctionalMap, group: Sequence) -> tuple[Index, dict]:
    """First point reached by every member of ``group`` (forward orbits run in
    lockstep) and the step at which each member reaches it."""
    members = list(group)
    cur = list(members)
    arrivals: dict = {}
    for t in range(m.budget.steps + 1):
        completed = []
        for k, x in enumerate(cur):
            seen = arrivals.setdefault(x, {})
            seen.setdefault(k, t)
            if len(seen) == len(members):
                completed.append(x)
        if completed:
            beta = min(completed, key=sort_key)
            return beta, {members[k]: s for k, s in arrivals[beta].items()}
        cur = [apply(m, x) for x in cur]
    raise BudgetError(f"orbits of {members!r} did not merge within {m.budget.steps} steps")


def confluence(m: FunctionalMap, points: Iterable[Index]) -> tuple[list, int]:
    """Pairwise inequivalent merge points covering ``points`` and the depth N
    such that each point reaches one of them in at most N steps."""
    pf = decide_periodic_free(m)
    if not pf.is_yes:
        raise PreconditionError(f"confluence needs a map without periodic points (got {pf.value.value})")
    pts = sorted(set(points), key=sort_key)
    for p in pts:
        apply(m, p)
    reps = []
    depth = 0
    for g in _group_by_class(m, pts):
        beta, steps = merge_point(m, g)
        reps.append(beta)
        depth = max(depth, max(steps.values()))
    return reps, depth


def check_certificate(m: FunctionalMap, verdict: Verdict, pair: Optional[tuple] = None) -> bool:
    """Replay the checkable parts of a verdict's certificate by iteration.

    ``pair`` gives the two indices a ``same_class`` verdict was asked about.
    """
    cert = verdict.certificate
    if isinstance(cert, PeriodicWitness):
        if cert.period < 1 or iterate(m, cert.index, cert.period) != cert.index:
            return False
        return all(iterate(m, cert.index, k) != cert.index for k in range(1, cert.period))
    if isinstance(cert, InjectivityCollision):
        return cert.first != cert.second and apply(m, cert.first) == apply(m, cert.second)
    if isinstance(cert, OrbitMeeting):
        if pair is None:
            return False
        a, b = pair
        return iterate(m, a, cert.first_steps) == cert.point == iterate(m, b, cert.second_steps)
    if isinstance(cert, AperiodicPointWitness):
        entry = iterate(m, cert.index, cert.tail)
        return cert.tail > 0 and iterate(m, entry, cert.period) == entry
    return True
