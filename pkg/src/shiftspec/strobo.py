"""Stroboscopical properties of generalized shifts.

The correction map rho is stored as a coordinate-relocation rule: the value
of ``rho(z)`` at a coordinate is the value of ``z`` at another coordinate (or
the fill symbol). Nothing is materialized beyond the coordinates a window
check actually reads.
"""

from __future__ import annotations

import random
from bisect import bisect_right
from dataclasses import dataclass, field, replace
from typing import Optional, Sequence

from shiftspec import kernels
from shiftspec.errors import BudgetError, InvariantError, PreconditionError
from shiftspec.index_maps import (
    FunctionalMap,
    Index,
    _group_by_class,
    backward_depth,
    class_type,
    decide_injective,
    decide_periodic_free,
    is_periodic,
    iterate,
    merge_point,
    preimages,
    same_class,
    sort_key,
)
from shiftspec.shift_core import Configuration, Window
from shiftspec.verdicts import Verdict, conjunction

DEFAULT_PREFIX = 4000


@dataclass(frozen=True)
class SequenceSpec:
    """A strictly increasing sequence of naturals, consumed as a finite prefix.

    ``kind`` is ``"explicit"`` (``terms`` given), ``"arithmetic"``
    (``start + k * step``) or ``"naturals"`` (0, 1, 2, ...).
    """

    kind: str
    terms: tuple = ()
    start: int = 0
    step: int = 1
    prefix_budget: int = DEFAULT_PREFIX

    def __post_init__(self):
        if self.prefix_budget < 1:
            raise ValueError("prefix budget must be positive")
        if self.kind == "explicit":
            object.__setattr__(self, "terms", tuple(self.terms))
            if not self.terms:
                raise ValueError("explicit sequence is empty")
            if self.terms[0] < 0 or any(b <= a for a, b in zip(self.terms, self.terms[1:])):
                raise ValueError("explicit sequence must be strictly increasing naturals")
        elif self.kind == "arithmetic":
            if self.start < 0 or self.step < 1:
                raise ValueError("arithmetic sequence needs start >= 0 and step >= 1")
        elif self.kind != "naturals":
            raise ValueError(f"unknown sequence kind {self.kind!r}")

    @classmethod
    def explicit(cls, terms: Sequence[int]) -> "SequenceSpec":
        return cls("explicit", tuple(terms), prefix_budget=max(1, len(terms)))

    @classmethod
    def arithmetic(cls, start: int, step: int, prefix_budget: int = DEFAULT_PREFIX) -> "SequenceSpec":
        return cls("arithmetic", start=start, step=step, prefix_budget=prefix_budget)

    @classmethod
    def naturals(cls, prefix_budget: int = DEFAULT_PREFIX) -> "SequenceSpec":
        return cls("naturals", prefix_budget=prefix_budget)

    def prefix(self) -> list[int]:
        if self.kind == "explicit":
            return list(self.terms[: self.prefix_budget])
        if self.kind == "arithmetic":
            return [self.start + k * self.step for k in range(self.prefix_budget)]
        return list(range(self.prefix_budget))


@dataclass(frozen=True)
class ResidueTable:
    """``f[m]`` in ``1..m``; ``subsequence[i] = f[m] (mod m)`` whenever ``i >= m``."""

    f: dict
    subsequence: tuple

    @property
    def modulus_bound(self) -> int:
        return max(self.f)

    def residue(self, m: int) -> int:
        return self.f[m] % m

    def holds(self) -> bool:
        seq = self.subsequence
        return all(seq[i] % m == self.f[m] % m for m in self.f for i in range(m, len(seq)))

    def perturbed(self, m: int) -> "ResidueTable":
        f = dict(self.f)
        f[m] = f[m] % m + 1
        return replace(self, f=f)


def congruence_subsequence(A: SequenceSpec | Sequence[int], M: int) -> ResidueTable:
    terms = A.prefix() if isinstance(A, SequenceSpec) else list(A)
    if M < 1:
        raise ValueError("modulus bound must be at least 1")
    if not terms:
        raise BudgetError("empty sequence prefix", partial=0)
    stages = [terms]
    f = {1: 1}
    for m in range(2, M + 1):
        r, kept = kernels.refine_residue(stages[-1], m)
        f[m] = r if r else m
        stages.append(kept)
    # diagonal pick: term i comes from stage min(i, M) and exceeds term i-1
    picked = [terms[0]]
    for i in range(1, M + 1):
        stage = stages[i - 1]
        pos = bisect_right(stage, picked[-1])
        if pos >= len(stage):
            raise BudgetError(f"prefix exhausted at refinement stage {i}", partial=i)
        picked.append(stage[pos])
    last = stages[-1]
    picked.extend(last[bisect_right(last, picked[-1]):])
    table = ResidueTable(f, tuple(picked))
    if not table.holds():
        raise InvariantError("residue table invariant failed")
    return table


def gap_subsequence(A: SequenceSpec | Sequence[int], count: Optional[int] = None) -> list[int]:
    """Greedy subsequence with ``m[i+1] - m[i] > 2 i``; ``count=None`` takes
    as many terms as the prefix allows."""
    terms = A.prefix() if isinstance(A, SequenceSpec) else list(A)
    if not terms:
        raise BudgetError("empty sequence prefix", partial=[])
    out = [terms[0]]
    pos = 0
    while count is None or len(out) < count:
        need = out[-1] + 2 * (len(out) - 1)
        pos = bisect_right(terms, need, lo=pos)
        if pos >= len(terms):
            if count is None:
                break
            raise BudgetError(f"prefix exhausted after {len(out)} of {count} terms", partial=out)
        out.append(terms[pos])
    return out


def shift_along(m: FunctionalMap, idx: Index, j: int) -> Index:
    """``phi^j(idx)``, following unique preimages when ``j < 0``."""
    if j >= 0:
        return iterate(m, idx, j)
    x = idx
    for _ in range(-j):
        pre = preimages(m, x)
        if not pre or len(pre) != 1:
            raise PreconditionError(f"{x!r} has no unique preimage")
        (x,) = pre
    return x


# ---------------------------------------------------------------------------
# rho maps


@dataclass(frozen=True)
class PeriodicClass:
    cycle: frozenset
    period: int


@dataclass(frozen=True)
class ChainClass:
    anchor: Index
    kind: str  # "chain_n" (anchor is the root) or "chain_z"


@dataclass(frozen=True)
class RhoMap:
    """Correction map for the shift along ``subsequence``.

    ``bound`` is the index from which the construction's argument guarantees
    convergence on ``window``; ``threshold`` is the smallest index from which
    the guarantee was confirmed on every term of the available prefix.
    """

    kind: str  # "all_periodic" | "aperiodic" | "product"
    phi: FunctionalMap
    window: frozenset
    subsequence: tuple
    threshold: int
    bound: int
    residues: Optional[ResidueTable] = None
    periodic: tuple = ()
    chains: tuple = ()
    offsets: dict = field(default_factory=dict, compare=False)
    parts: tuple = ()
    fill: int = 0
    _cache: dict = field(default_factory=dict, compare=False, repr=False)

    # -- relocation -------------------------------------------------------

    def source(self, alpha: Index) -> Optional[Index]:
        """Coordinate of ``z`` whose value ``rho(z)`` carries at ``alpha``;
        ``None`` means the fill symbol."""
        cache = self._cache
        if alpha not in cache:
            cache[alpha] = self._source(alpha)
        return cache[alpha]

    def _source(self, alpha):
        if self.kind == "product":
            for part in self.parts:
                if part.covers(alpha):
                    return part.source(alpha)
            return None
        for cls in self.periodic:
            if alpha in cls.cycle:
                k = cls.period
                return iterate(self.phi, alpha, k - self.residues.f[k])
        if self.chains:
            located = self._locate(alpha)
            if located is not None:
                chain, e = located
                j = self._split(chain.kind, e)
                if j is not None:
                    return shift_along(self.phi, chain.anchor, j)
        return None

    def covers(self, alpha) -> bool:
        if any(alpha in cls.cycle for cls in self.periodic):
            return True
        return bool(self.chains) and self._locate(alpha) is not None

    def _locate(self, alpha):
        key = ("loc", alpha)
        if key in self._cache:
            return self._cache[key]
        found = None
        unknown = False
        for chain in self.chains:
            v = same_class(self.phi, alpha, chain.anchor)
            if v.is_yes:
                found = (chain, v.certificate.second_steps - v.certificate.first_steps)
                break
            unknown |= v.is_unknown
        if found is None and unknown:
            raise BudgetError(f"cannot place {alpha!r} relative to the class anchors")
        self._cache[key] = found
        return found

    def _split(self, kind: str, e: int) -> Optional[int]:
        """The ``j`` of the unique decomposition ``e = n_i + j``, if any."""
        n = self.subsequence
        last = len(n) - 1
        if kind == "chain_n":
            i = bisect_right(n, e) - 1
            if i < 0:
                return None
            j = e - n[i]
            limit = n[i + 1] - n[i] if i < last else 2 * i + 1
            return j if j < limit else None
        i0 = bisect_right(n, e) - 1
        hits = [i for i in (i0, i0 + 1) if 0 <= i <= last and abs(e - n[i]) < i]
        if len(hits) > 1:
            raise InvariantError(f"exponent {e} decomposes twice")
        return e - n[hits[0]] if hits else None

    # -- evaluation -------------------------------------------------------

    def value(self, z: Configuration, alpha: Index) -> int:
        src = self.source(alpha)
        return self.fill if src is None else z.value_at(src)

    def guarantee_at(self, i: int, theta: Index) -> bool:
        """Index-arithmetic form of the guarantee: ``rho`` relocates the
        coordinate ``phi^{n_i}(theta)`` back to ``theta``."""
        return self.source(iterate(self.phi, theta, self.subsequence[i])) == theta

    def with_threshold(self, threshold: int) -> "RhoMap":
        return replace(self, threshold=threshold, _cache={})

    def with_residues(self, residues: ResidueTable) -> "RhoMap":
        parts = tuple(p.with_residues(residues) if p.residues is not None else p for p in self.parts)
        return replace(self, residues=residues if self.residues is not None else None, parts=parts, _cache={})


def _tight_threshold(rho: RhoMap) -> int:
    """Smallest i0 with the guarantee on every theta for all prefix i >= i0."""
    i0 = len(rho.subsequence)
    for i in range(len(rho.subsequence) - 1, -1, -1):
        if not all(rho.guarantee_at(i, th) for th in rho.window):
            break
        i0 = i
    if i0 >= len(rho.subsequence):
        raise BudgetError("guarantee never held on the available prefix", partial=rho)
    return i0


def _finish(rho: RhoMap) -> RhoMap:
    tight = _tight_threshold(rho)
    if tight > rho.bound:
        raise InvariantError(f"guarantee fails past the construction bound ({tight} > {rho.bound})")
    if len(rho.subsequence) <= rho.bound:
        raise BudgetError("prefix too short to reach the construction bound", partial=rho)
    return replace(rho, threshold=tight, _cache={})


def _window(m: FunctionalMap, H) -> frozenset:
    w = H if isinstance(H, Window) else Window.of(H)
    w.check_in(m)
    return w.coords


def _periodic_classes(m: FunctionalMap, coords) -> tuple:
    classes = []
    seen = set()
    for a in sorted(coords, key=sort_key):
        if a in seen:
            continue
        v = is_periodic(m, a)
        if not v.is_yes:
            raise PreconditionError(f"{a!r} is not periodic ({v.value.value})")
        k = v.certificate.period
        cyc = {a}
        x = a
        for _ in range(k - 1):
            x = iterate(m, x, 1)
            cyc.add(x)
        seen |= cyc
        classes.append(PeriodicClass(frozenset(cyc), k))
    return tuple(classes)


def _all_periodic(m, coords, residues: ResidueTable, subsequence) -> RhoMap:
    classes = _periodic_classes(m, coords)
    bound = max(c.period for c in classes)
    rho = RhoMap("all_periodic", m, frozenset(coords), tuple(subsequence), 0, bound, residues=residues, periodic=classes)
    return _finish(rho)


def build_rho_all_periodic(m: FunctionalMap, A: SequenceSpec, H) -> RhoMap:
    coords = _window(m, H)
    classes = _periodic_classes(m, coords)
    table = congruence_subsequence(A, max(c.period for c in classes))
    return _all_periodic(m, coords, table, table.subsequence)


def _require(v: Verdict, what: str):
    if not v.is_yes:
        raise PreconditionError(f"{what} is required (decided {v.value.value}: {v.certificate})")


def _chain_classes(m: FunctionalMap, coords) -> tuple[tuple, dict, int]:
    chains = []
    offsets = {}
    for group in _group_by_class(m, sorted(coords, key=sort_key)):
        ct = class_type(m, group[0])
        if ct.kind == "cycle":
            raise PreconditionError(f"{group[0]!r} is periodic")
        if ct.kind == "chain_n":
            chains.append(ChainClass(ct.root, "chain_n"))
            for th in group:
                offsets[th] = backward_depth(m, th, ct.root)
        else:
            beta, steps = merge_point(m, group)
            chains.append(ChainClass(beta, "chain_z"))
            for th in group:
                offsets[th] = -steps[th]
    depth = max(abs(t) for t in offsets.values())
    return tuple(chains), offsets, depth


def _check_two_sided(subsequence: Sequence[int]) -> None:
    """No exponent is claimed by two (i, j) with |j| < i."""
    seen = set()
    for i, n in enumerate(subsequence):
        for j in range(-i + 1, i):
            if n + j in seen:
                raise InvariantError(f"exponent {n + j} assigned twice")
            seen.add(n + j)


def _aperiodic(m, coords, subsequence) -> RhoMap:
    chains, offsets, depth = _chain_classes(m, coords)
    if any(c.kind == "chain_z" for c in chains):
        _check_two_sided(subsequence)
    rho = RhoMap("aperiodic", m, frozenset(coords), tuple(subsequence), 0, depth + 2, chains=chains, offsets=offsets)
    return _finish(rho)


def build_rho_aperiodic(m: FunctionalMap, A: SequenceSpec, H) -> RhoMap:
    _require(decide_injective(m), "injectivity")
    _require(decide_periodic_free(m), "absence of periodic points")
    return _aperiodic(m, _window(m, H), gap_subsequence(A))


def build_rho(m: FunctionalMap, A: SequenceSpec, H) -> RhoMap:
    _require(decide_injective(m), "injectivity")
    coords = _window(m, H)
    per, aper = set(), set()
    for a in coords:
        v = is_periodic(m, a)
        if v.is_unknown:
            raise BudgetError(f"cannot decide whether {a!r} is periodic", partial=v)
        (per if v.is_yes else aper).add(a)
    if not aper:
        return build_rho_all_periodic(m, A, coords)
    if not per:
        return _aperiodic(m, coords, gap_subsequence(A))
    gaps = gap_subsequence(A)
    M = max(c.period for c in _periodic_classes(m, per))
    table = congruence_subsequence(gaps, M)
    seq = table.subsequence
    if any(b - a <= 2 * i for i, (a, b) in enumerate(zip(seq, seq[1:]))):
        raise InvariantError("refinement broke the gap property")
    parts = (_all_periodic(m, per, table, seq), _aperiodic(m, aper, seq))
    return RhoMap(
        "product",
        m,
        coords,
        seq,
        max(p.threshold for p in parts),
        max(p.bound for p in parts),
        residues=table,
        parts=parts,
    )


# ---------------------------------------------------------------------------
# verification


@dataclass(frozen=True)
class ConvergenceResult:
    ok: bool
    checked: int
    counterexample: Optional[dict] = None

    def __bool__(self) -> bool:
        return self.ok


def _probe_configurations(rho: RhoMap, alphabet_size: int, coords) -> list[Configuration]:
    probes = []
    for th in sorted(rho.window, key=sort_key):
        for base in range(min(alphabet_size, 2)):
            probes.append(Configuration.make(alphabet_size, base, {th: 1 - base}))
    return probes


def verify_uniform_convergence(
    m: FunctionalMap,
    rho: RhoMap,
    A: Optional[SequenceSpec],
    H,
    trials: int = 50,
    seed: int = 0,
    alphabet_size: int = 2,
) -> ConvergenceResult:
    """Check ``sigma^{n_i}(rho(z))`` agrees with ``z`` on ``H`` for every
    selected ``i >= rho.threshold``, on random and probe configurations."""
    coords = _window(m, H)
    rng = random.Random(seed)
    indices = range(max(rho.threshold, 0), len(rho.subsequence))
    # coordinates the check reads: H and the sources of the shifted window
    reads = {}
    relevant = set(coords)
    for i in indices:
        for th in coords:
            alpha = iterate(m, th, rho.subsequence[i])  # pullback, independent of rho
            src = rho.source(alpha)
            reads[(i, th)] = src
            if src is not None:
                relevant.add(src)
    relevant = sorted(relevant, key=sort_key)
    configs = _probe_configurations(rho, alphabet_size, coords)
    for _ in range(trials):
        default = rng.randrange(alphabet_size)
        configs.append(Configuration.make(alphabet_size, default, {c: rng.randrange(alphabet_size) for c in relevant}))
    checked = 0
    for z in configs:
        for (i, th), src in reads.items():
            got = rho.fill if src is None else z.value_at(src)
            checked += 1
            if got != z.value_at(th):
                return ConvergenceResult(False, checked, {"i": i, "theta": th, "config": z, "got": got})
    return ConvergenceResult(True, checked)


def verify_guarantee(rho: RhoMap) -> bool:
    """Index-arithmetic guarantee for every selected ``i >= threshold``."""
    return all(rho.guarantee_at(i, th) for i in range(rho.threshold, len(rho.subsequence)) for th in rho.window)


def decide_strobo(m: FunctionalMap) -> Verdict:
    """Uniform (equivalently plain) stroboscopical property of the shift."""
    return decide_injective(m)


def decide_strong_strobo(m: FunctionalMap) -> Verdict:
    return conjunction(decide_injective(m), decide_periodic_free(m))
