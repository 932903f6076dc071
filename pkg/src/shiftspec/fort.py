"""Dynamical systems on Fort spaces.

A Fort space here is an index set (finite atoms or Z) with a particular
point ``b``; every other point is isolated and neighbourhoods of ``b`` are
cofinite. The self-map is an ordinary :class:`FunctionalMap` on the whole
space, so ``h(b)`` is just ``apply(h, b)``.
"""

from __future__ import annotations

from dataclasses import dataclass, field, replace
from typing import Iterable, Optional

from shiftspec.errors import BudgetError, PreconditionError
from shiftspec.index_maps import (
    Affine,
    FunctionalMap,
    Index,
    _table_graph,
    apply,
    image_complement,
    is_periodic,
    iterate,
    period,
    preimages,
    sort_key,
)
from shiftspec.intsets import AP
from shiftspec.strobo import ResidueTable, SequenceSpec, congruence_subsequence
from shiftspec.verdicts import (
    AnalyticCertificate,
    AperiodicPointWitness,
    ContinuityViolation,
    FiniteExhaustive,
    Verdict,
)


@dataclass(frozen=True)
class FortSystem:
    h: FunctionalMap
    b: Index
    name: str = field(default="", compare=False)

    def __post_init__(self):
        if self.b not in self.h.domain:
            raise PreconditionError(f"particular point {self.b!r} is not in the space")

    @property
    def is_finite(self) -> bool:
        return self.h.domain.is_finite

    @property
    def points(self) -> tuple:
        return self.h.atoms

    def __call__(self, x: Index) -> Index:
        return apply(self.h, x)


@dataclass(frozen=True)
class FortWindow:
    coords: frozenset

    @classmethod
    def of(cls, sys: FortSystem, coords: Iterable[Index]) -> "FortWindow":
        cs = frozenset(coords)
        if sys.b in cs:
            raise ValueError("a Fort window excludes the particular point")
        for c in cs:
            if c not in sys.h.domain:
                raise ValueError(f"{c!r} is not a point of the space")
        return cls(cs)

    def __contains__(self, x) -> bool:
        return x in self.coords


def fort_entourage_check(x: Index, y: Index, H: FortWindow | Iterable[Index]) -> bool:
    coords = H.coords if isinstance(H, FortWindow) else frozenset(H)
    return x == y or (x not in coords and y not in coords)


# ---------------------------------------------------------------------------
# continuity


def validate_continuity(sys: FortSystem) -> Verdict:
    if sys.is_finite:
        return Verdict.yes(FiniteExhaustive(len(sys.points)))
    hb = sys(sys.b)
    cells = sys.h.cells
    if hb == sys.b:
        for cell, sub in cells:
            if isinstance(sub, Affine) and sub.a == 0 and not cell.is_finite and sub.b != sys.b:
                return Verdict.no(ContinuityViolation(sub.b, f"{sub.b} has infinitely many preimages"))
        return Verdict.yes(AnalyticCertificate("h(b) = b and every other point has a finite fiber"))
    for cell, sub in cells:
        if cell.is_finite:
            continue
        if isinstance(sub, Affine) and sub.a == 0 and sub.b == hb:
            continue
        witness = next(n for n in cell.some_members(4) if apply(sys.h, n) != hb)
        return Verdict.no(ContinuityViolation(witness, f"infinitely many points avoid the fiber of h(b) = {hb}"))
    return Verdict.yes(AnalyticCertificate(f"h(b) = {hb} != b and the fiber of {hb} is cofinite"))


def _require_continuous(sys: FortSystem) -> None:
    v = validate_continuity(sys)
    if not v.is_yes:
        raise PreconditionError(f"map is not certified continuous ({v.value.value}: {v.certificate})")


# ---------------------------------------------------------------------------
# eventual image


@dataclass(frozen=True)
class EventualImage:
    """``points`` when the set is finite, else ``excluded`` = its finite complement."""

    kind: str  # "finite" | "cofinite"
    points: frozenset = frozenset()
    excluded: frozenset = frozenset()

    def __contains__(self, x) -> bool:
        return x in self.points if self.kind == "finite" else x not in self.excluded

    def describe(self) -> str:
        if self.kind == "finite":
            return "{" + ", ".join(repr(p) for p in sorted(self.points, key=sort_key)) + "}"
        if not self.excluded:
            return "F"
        return "F \\ {" + ", ".join(repr(p) for p in sorted(self.excluded, key=sort_key)) + "}"


def _image_chain(sys: FortSystem, start: frozenset) -> list[frozenset]:
    chain = [start]
    while True:
        nxt = frozenset(sys(x) for x in chain[-1])
        if nxt == chain[-1]:
            return chain
        chain.append(nxt)


def _finite_image(sys: FortSystem) -> frozenset:
    """``h(F)`` when ``h(b) != b`` (finite by continuity)."""
    out = set()
    for cell, sub in sys.h.cells:
        if cell.is_finite:
            out.update(apply(sys.h, n) for n in cell)
        elif isinstance(sub, Affine) and sub.a == 0:
            out.add(sub.b)
        else:
            raise PreconditionError("image is infinite although h(b) != b")
    return frozenset(out)


def _drained(sys: FortSystem) -> frozenset:
    """Points with an empty iterated preimage, for ``h(b) = b``."""
    start = image_complement(sys.h)
    if start is None:
        raise BudgetError("infinitely many points have no preimage")
    drained = set(start)
    frontier = set(start)
    budget = sys.h.budget.steps
    while frontier:
        budget -= len(frontier)
        if budget < 0:
            raise BudgetError("drained set did not close within budget", partial=frozenset(drained))
        candidates = {sys(x) for x in frontier} - drained
        frontier = set()
        for y in candidates:
            pre = preimages(sys.h, y)
            if pre is not None and pre and pre <= drained:
                frontier.add(y)
        drained |= frontier
    return frozenset(drained)


def eventual_image(sys: FortSystem) -> tuple[EventualImage, Verdict]:
    _require_continuous(sys)
    if sys.is_finite:
        final = _image_chain(sys, frozenset(sys(x) for x in sys.points))[-1]
        img = EventualImage("finite", points=final)
        cert = FiniteExhaustive(len(sys.points))
        return img, (Verdict.yes(cert) if len(final) == 1 else Verdict.no(cert))
    if sys(sys.b) != sys.b:
        final = _image_chain(sys, _finite_image(sys))[-1]
        img = EventualImage("finite", points=final)
        cert = AnalyticCertificate("image chain of a finite image stabilizes")
        return img, (Verdict.yes(cert) if len(final) == 1 else Verdict.no(cert))
    try:
        drained = _drained(sys)
    except BudgetError as exc:
        return None, Verdict.unknown(sys.h.budget.steps, str(exc))
    img = EventualImage("cofinite", excluded=drained)
    return img, Verdict.no(AnalyticCertificate(f"eventual image is {img.describe()}, an infinite set"))


def decide_fort_weak_spec(sys: FortSystem) -> Verdict:
    """Weak (equivalently almost weak) specification."""
    return eventual_image(sys)[1]


def _is_single_point(sys: FortSystem) -> Verdict:
    if sys.is_finite and len(sys.points) == 1:
        return Verdict.yes(FiniteExhaustive(1))
    other = next(p for p in sys.points if p != sys.b) if sys.is_finite else (1 if sys.b != 1 else 2)
    return Verdict.no(AnalyticCertificate(f"{other!r} is a second point of the space"))


def decide_fort_spec(sys: FortSystem) -> Verdict:
    return _is_single_point(sys)


def decide_fort_strong_strobo(sys: FortSystem) -> Verdict:
    return _is_single_point(sys)


# ---------------------------------------------------------------------------
# periodicity of every point


def _compose_power(sys: FortSystem, k: int, cap: int = 10_000) -> Optional[list]:
    """Pieces ``(AP, a, b)`` with ``h^k(n) = a n + b`` on each piece."""
    pieces = [(AP.everything(), 1, 0)]
    for _ in range(k):
        nxt = []
        for piece, a, b in pieces:
            for cell, sub in sys.h.cells:
                if not isinstance(sub, Affine):
                    return None
                if a == 0:
                    if b in cell:
                        nxt.append((piece, 0, sub.a * b + sub.b))
                    continue
                part = piece.affine_preimage(a, b, cell)
                if part is not None:
                    nxt.append((part, sub.a * a, sub.a * b + sub.b))
            if len(nxt) > cap:
                return None
        pieces = nxt
    return pieces


def _power_is_identity(sys: FortSystem, k: int) -> Optional[bool]:
    pieces = _compose_power(sys, k)
    if pieces is None:
        return None
    for piece, a, b in pieces:
        if (a, b) == (1, 0):
            continue
        if piece.is_finite and len(piece) <= 1000:
            if all(a * n + b == n for n in piece):
                continue
        return False
    return True


def decide_fort_strobo(sys: FortSystem) -> Verdict:
    """Uniform (equivalently plain) stroboscopical: every point periodic."""
    _require_continuous(sys)
    if sys.is_finite:
        tail, per, _ = _table_graph(sys.h)
        for k, x in enumerate(sys.points):
            if tail[k]:
                return Verdict.no(AperiodicPointWitness(x, tail[k], per[k]))
        return Verdict.yes(FiniteExhaustive(len(sys.points)))
    missing = image_complement(sys.h)
    if missing is None or missing:
        what = "infinitely many points" if missing is None else f"{min(missing)}"
        return Verdict.no(AnalyticCertificate(f"{what} has no preimage, hence is not periodic"))
    for k in range(1, 7):
        if _power_is_identity(sys, k):
            return Verdict.yes(AnalyticCertificate(f"h^{k} is the identity"))
    window = min(sys.h.budget.magnitude, 1000)
    for n in sorted(range(-window, window + 1), key=abs):
        v = is_periodic(sys.h, n)
        if v.is_no:
            return Verdict.no(v.certificate)
    return Verdict.unknown(sys.h.budget.steps, "no uniform period found and no aperiodic point seen")


# ---------------------------------------------------------------------------
# witnesses


def _backward_depth(sys: FortSystem, y: Index) -> int:
    """Least ``m`` with ``h^{-m}(y)`` empty."""
    level = {y}
    for m in range(1, sys.h.budget.steps + 1):
        nxt = set()
        for x in level:
            pre = preimages(sys.h, x)
            if pre is None:
                raise BudgetError(f"{x!r} has an infinite fiber")
            nxt |= pre
        if not nxt:
            return m
        level = nxt
    raise BudgetError(f"backward orbit of {y!r} did not empty within budget")


def fort_gap_constant(sys: FortSystem, window: Optional[Iterable[Index]] = None) -> int:
    v = decide_fort_weak_spec(sys)
    if not v.is_yes:
        raise PreconditionError(f"weak specification does not hold ({v.value.value})")
    img, _ = eventual_image(sys)
    (c,) = img.points
    if c == sys.b:
        if window is None:
            if not sys.is_finite:
                raise PreconditionError("a window is needed on an infinite space")
            window = [p for p in sys.points if p != sys.b]
        return sum(_backward_depth(sys, y) for y in FortWindow.of(sys, window).coords)
    start = frozenset(sys.points) if sys.is_finite else None
    chain = _image_chain(sys, frozenset(sys(x) for x in start) if start else _finite_image(sys))
    return next(i + 1 for i, s in enumerate(chain) if s == frozenset({c}))


def check_fort_gap(sys: FortSystem, window: Iterable[Index], m: int) -> bool:
    """For every ``i >= m`` the window misses ``h^i(F)`` (Case ``{b}``), or
    ``h^i(F)`` is the single surviving point."""
    img, _ = eventual_image(sys)
    (c,) = img.points
    coords = FortWindow.of(sys, window).coords if window is not None else frozenset()
    if c != sys.b:
        level = frozenset(sys.points) if sys.is_finite else None
        if level is None:
            level = _finite_image(sys)
            m -= 1
        for _ in range(m):
            level = frozenset(sys(x) for x in level)
        return level == {c}
    if sys.is_finite:
        level = frozenset(sys.points)
        for _ in range(m):
            level = frozenset(sys(x) for x in level)
        return not (level & coords)
    return all(_backward_depth(sys, y) <= m for y in coords)


@dataclass(frozen=True)
class FortRho:
    """``rho(z) = h^{m_z - r_{m_z}}(z)`` for ``m_z <= N``; identity beyond."""

    sys: FortSystem
    window: frozenset
    residues: ResidueTable
    N: int
    threshold: int
    periods: dict = field(compare=False)

    @property
    def subsequence(self) -> tuple:
        return self.residues.subsequence

    def __call__(self, z: Index) -> Index:
        m = self._period(z)
        if m > self.N:
            return z
        return iterate(self.sys.h, z, m - self.residues.f[m] % m)

    def _period(self, z) -> int:
        if z not in self.periods:
            self.periods[z] = period(self.sys.h, z)
        return self.periods[z]

    def guarantee_at(self, k: int, z: Index) -> bool:
        return iterate(self.sys.h, self(z), self.subsequence[k]) == z

    def with_threshold(self, threshold: int) -> "FortRho":
        return replace(self, threshold=threshold)

    def with_residues(self, residues: ResidueTable) -> "FortRho":
        return replace(self, residues=residues)


def build_fort_rho(sys: FortSystem, A: SequenceSpec, window: Iterable[Index]) -> FortRho:
    v = decide_fort_strobo(sys)
    if not v.is_yes:
        raise PreconditionError(f"not every point is periodic ({v.value.value}: {v.certificate})")
    coords = FortWindow.of(sys, window).coords
    periods = {z: period(sys.h, z) for z in coords | {sys.b}}
    N = max(periods.values())
    table = congruence_subsequence(A, N)
    rho = FortRho(sys, coords, table, N, N, periods)
    points = sorted(coords | {sys.b}, key=sort_key)
    tight = len(table.subsequence)
    for k in range(len(table.subsequence) - 1, -1, -1):
        if not all(rho.guarantee_at(k, z) for z in points):
            break
        tight = k
    if tight > N or tight >= len(table.subsequence):
        raise BudgetError("guarantee did not hold past the construction bound", partial=rho)
    return replace(rho, threshold=tight)


def verify_fort_rho(rho: FortRho, extra_points: Iterable[Index] = ()) -> bool:
    """Exact check on the window and ``b``; entourage check on ``extra_points``."""
    pts = sorted(rho.window | {rho.sys.b}, key=sort_key)
    ks = range(max(rho.threshold, 0), len(rho.subsequence))
    if not all(rho.guarantee_at(k, z) for k in ks for z in pts):
        return False
    h = rho.sys.h
    return all(fort_entourage_check(iterate(h, rho(z), rho.subsequence[k]), z, rho.window) for k in ks for z in extra_points)
