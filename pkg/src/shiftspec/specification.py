"""Specification-type properties of generalized shifts and their witnesses."""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Optional, Sequence

from shiftspec.errors import InstanceError, InvariantError, PreconditionError
from shiftspec.index_maps import (
    FunctionalMap,
    confluence,
    decide_injective,
    decide_periodic_free,
    iterate,
)
from shiftspec.shift_core import Alphabet, Configuration, Window, eval_orbit
from shiftspec.verdicts import PeriodicWitness, Verdict, conjunction


@dataclass(frozen=True)
class SpecInstance:
    """Orbit segments ``segments[s]`` to be shadowed during ``windows[s]`` on ``target``."""

    segments: tuple
    windows: tuple
    target: Window

    def __post_init__(self):
        object.__setattr__(self, "segments", tuple(self.segments))
        object.__setattr__(self, "windows", tuple(tuple(w) for w in self.windows))
        if not self.segments or len(self.segments) != len(self.windows):
            raise InstanceError("need as many windows as segments, at least one")
        alphabets = {seg.alphabet for seg in self.segments}
        if len(alphabets) != 1:
            raise InstanceError("segments use different alphabets")
        prev = -1
        for lo, hi in self.windows:
            if not (0 <= lo <= hi) or lo <= prev:
                raise InstanceError(f"windows must satisfy 0 <= l1 <= k1 < l2 <= k2 < ...; got {self.windows}")
            prev = hi

    @property
    def alphabet(self) -> Alphabet:
        return self.segments[0].alphabet

    @property
    def gaps(self) -> list[int]:
        return [self.windows[s + 1][0] - self.windows[s][1] for s in range(len(self.windows) - 1)]

    @property
    def horizon(self) -> int:
        return self.windows[-1][1]


@dataclass(frozen=True)
class TracingReport:
    tracer: Configuration
    gap_bound_used: Optional[int]
    checks: tuple  # of (segment, time, agrees)
    assigned: dict = field(compare=False)
    degenerate: bool = False

    @property
    def accepted(self) -> bool:
        return all(ok for _, _, ok in self.checks)


def decide_weak_spec(m: FunctionalMap) -> Verdict:
    """Weak (equivalently, almost weak) specification of the shift."""
    return decide_periodic_free(m)


def decide_spec(m: FunctionalMap) -> Verdict:
    return conjunction(decide_injective(m), decide_periodic_free(m))


def _require_aperiodic(m: FunctionalMap) -> None:
    v = decide_periodic_free(m)
    if not v.is_yes:
        raise PreconditionError(f"the map must have no periodic point (decided {v.value.value}: {v.certificate})")


def gap_bound(m: FunctionalMap, H: Window) -> int:
    _require_aperiodic(m)
    H.check_in(m)
    _, depth = confluence(m, H.coords)
    return depth + 1


def window_checks(m: FunctionalMap, inst: SpecInstance, z: Configuration) -> list[tuple[int, int, bool]]:
    """Agreement of ``sigma^t(z)`` with ``sigma^t(y_s)`` on the target, per window time."""
    out = []
    for s, (seg, (lo, hi)) in enumerate(zip(inst.segments, inst.windows)):
        for t in range(lo, hi + 1):
            out.append((s, t, eval_orbit(m, z, inst.target, t) == eval_orbit(m, seg, inst.target, t)))
    return out


def verify_tracer(m: FunctionalMap, inst: SpecInstance, z: Configuration) -> bool:
    return all(ok for _, _, ok in window_checks(m, inst, z))


def build_tracing_point(m: FunctionalMap, inst: SpecInstance, fill: int = 0) -> TracingReport:
    inst.target.check_in(m)
    if len(inst.segments) == 1:
        z = inst.segments[0]
        return TracingReport(z, None, tuple(window_checks(m, inst, z)), {}, degenerate=True)
    bound = gap_bound(m, inst.target)
    short = [g for g in inst.gaps if g < bound]
    if short:
        raise InstanceError(f"gap {min(short)} is below the required bound {bound}")
    assigned: dict = {}
    origin: dict = {}
    for s, (seg, (lo, hi)) in enumerate(zip(inst.segments, inst.windows)):
        for gamma in inst.target:
            for t in range(lo, hi + 1):
                theta = iterate(m, gamma, t)
                sym = seg.value_at(theta)
                if theta in assigned and assigned[theta] != sym:
                    raise InvariantError(
                        f"coordinate {theta!r} assigned {assigned[theta]} by {origin[theta]} and {sym} by {(s, t, gamma)}"
                    )
                assigned.setdefault(theta, sym)
                origin.setdefault(theta, (s, t, gamma))
    z = Configuration(inst.alphabet, fill, tuple(assigned.items()))
    checks = tuple(window_checks(m, inst, z))
    report = TracingReport(z, bound, checks, assigned)
    if not report.accepted:
        raise InvariantError("constructed tracer failed its own window check")
    return report


@dataclass(frozen=True)
class Refutation:
    """Two constant segments no point can shadow once a periodic point exists.

    For any claimed gap constant ``N`` the instance uses windows ``[1, 1]``
    and ``[N + 2, N + 2 + m]`` on the target ``{index}``; some time ``j`` in
    the second window has ``j = 1 (mod m)``, so ``phi^j(index) = phi(index)``
    and the tracer would need two different symbols at one coordinate.
    """

    witness: PeriodicWitness
    alphabet: Alphabet
    p: int = 0
    q: int = 1

    def instance(self, claimed_gap: int) -> SpecInstance:
        m = self.witness.period
        return SpecInstance(
            (Configuration.constant(self.alphabet, self.p), Configuration.constant(self.alphabet, self.q)),
            ((1, 1), (claimed_gap + 2, claimed_gap + 2 + m)),
            Window.of([self.witness.index]),
        )

    def clash_time(self, claimed_gap: int) -> int:
        m = self.witness.period
        lo = claimed_gap + 2
        return lo + (1 - lo) % m

    def check(self, phi: FunctionalMap, claimed_gap: int) -> bool:
        """Index-arithmetic proof that the instance has no tracer."""
        lam, m = self.witness.index, self.witness.period
        if self.p == self.q or iterate(phi, lam, m) != lam:
            return False
        lo, hi = claimed_gap + 2, claimed_gap + 2 + m
        j = self.clash_time(claimed_gap)
        if not (lo <= j <= hi and (j - 1) % m == 0):
            return False
        # the first window forces z at phi(lam) to be p, time j forces it to be q
        return iterate(phi, lam, j) == iterate(phi, lam, 1)


def refute_weak_spec(m: FunctionalMap, witness: PeriodicWitness, alphabet: Alphabet | int) -> Refutation:
    if isinstance(alphabet, int):
        alphabet = Alphabet(alphabet)
    if witness.period < 1 or iterate(m, witness.index, witness.period) != witness.index:
        raise PreconditionError(f"{witness} is not a periodic point of the map")
    return Refutation(witness, alphabet)


def random_instance(
    rng,
    m: FunctionalMap,
    target: Sequence,
    n_segments: int,
    alphabet: Alphabet,
    gap: int,
    max_len: int = 3,
) -> SpecInstance:
    """Random segments whose overrides sit on the coordinates the windows read."""
    windows = []
    t = rng.randrange(0, 3)
    for _ in range(n_segments):
        lo = t
        hi = lo + rng.randrange(0, max_len)
        windows.append((lo, hi))
        t = hi + gap + rng.randrange(0, 2)
    segments = []
    for lo, hi in windows:
        coords = {iterate(m, g, u) for g in target for u in range(lo, hi + 1)}
        overrides = {c: rng.randrange(alphabet.size) for c in coords if rng.random() < 0.7}
        segments.append(Configuration(alphabet, rng.randrange(alphabet.size), tuple(overrides.items())))
    return SpecInstance(tuple(segments), tuple(windows), Window.of(target))
