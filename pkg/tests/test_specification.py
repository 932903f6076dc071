import random

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from shiftspec import oracle
from shiftspec.errors import InstanceError
from shiftspec.index_maps import affine, iterate, square_plus, table
from shiftspec.shift_core import Alphabet, Configuration, Window, eval_orbit
from shiftspec.specification import (
    SpecInstance,
    build_tracing_point,
    decide_spec,
    decide_weak_spec,
    gap_bound,
    random_instance,
    refute_weak_spec,
    verify_tracer,
)
from shiftspec.verdicts import PeriodicWitness


def const(s):
    return Configuration.constant(2, s)


def test_decide_weak_spec():
    assert decide_weak_spec(affine(1, 1)).is_yes
    assert decide_weak_spec(affine(-1, 0)).is_no
    assert all(decide_weak_spec(m).is_no for m in oracle.enumerate_small_maps(3))


def test_decide_spec():
    assert decide_spec(affine(1, 1)).is_yes
    v = decide_spec(square_plus(1))
    assert v.is_no and {v.certificate.first, v.certificate.second} == {1, -1}
    assert decide_spec(affine(-1, 0)).is_no


@pytest.mark.parametrize("m, H, expected", [(affine(1, 1), [0], 1), (affine(1, 1), [0, 5], 6), (square_plus(1), [1, -1], 2)])
def test_gap_bound(m, H, expected):
    assert gap_bound(m, Window.of(H)) == expected


def test_gap_bound_monotone():
    rng = random.Random(3)
    for m in (affine(1, 1), affine(1, 2), square_plus(1)):
        for _ in range(30):
            H = rng.sample(range(-8, 9), 3)
            assert gap_bound(m, Window.of(H[:2])) <= gap_bound(m, Window.of(H))


def test_instance_validation():
    with pytest.raises(Exception):
        SpecInstance((const(1), const(0)), ((0, 2), (2, 3)), Window.of([0]))
    with pytest.raises(Exception):
        SpecInstance((const(1),), ((0, 1), (3, 4)), Window.of([0]))


def test_tracing_successor():
    inst = SpecInstance((const(1), const(0)), ((0, 1), (3, 4)), Window.of([0]))
    rep = build_tracing_point(affine(1, 1), inst, fill=0)
    assert rep.accepted
    assert rep.tracer.overrides == ((0, 1), (1, 1))
    for seg, (lo, hi) in zip(inst.segments, inst.windows):
        for t in range(lo, hi + 1):
            assert eval_orbit(affine(1, 1), rep.tracer, inst.target, t) == {0: seg.value_at(iterate(affine(1, 1), 0, t))}


def test_tracing_single_segment():
    seg = Configuration.make(2, 0, {0: 1})
    inst = SpecInstance((seg,), ((0, 0),), Window.of([0]))
    rep = build_tracing_point(affine(-1, 0), inst)
    assert rep.accepted and rep.degenerate
    assert verify_tracer(affine(-1, 0), inst, rep.tracer)


def test_tracing_square_plus():
    m = square_plus(1)
    inst = SpecInstance((const(1), const(0)), ((0, 0), (2, 3)), Window.of([1]))
    rep = build_tracing_point(m, inst)
    assert rep.accepted
    assert rep.assigned == {1: 1, 5: 0, 26: 0}


def test_tracing_rejects_short_gap():
    inst = SpecInstance((const(1), const(0)), ((0, 0), (1, 1)), Window.of([0, 5]))
    with pytest.raises(InstanceError):
        build_tracing_point(affine(1, 1), inst)


@pytest.mark.parametrize(
    "m, witness",
    [
        (table({"a": "a"}), PeriodicWitness("a", 1)),
        (affine(-1, 0), PeriodicWitness(0, 1)),
        (table({"a": "b", "b": "a"}), PeriodicWitness("a", 2)),
    ],
)
def test_refutation(m, witness):
    ref = refute_weak_spec(m, witness, Alphabet(2))
    for claimed in range(6):
        assert ref.check(m, claimed)
        inst = ref.instance(claimed)
        assert oracle.exhaustive_tracer_search(m, inst, oracle.relevant_coordinates(m, inst)) is None


def test_refutation_needs_a_real_periodic_point():
    with pytest.raises(Exception):
        refute_weak_spec(affine(1, 1), PeriodicWitness(0, 1), 2)


@settings(max_examples=30, deadline=None)
@given(st.integers(0, 2**31), st.sampled_from(["successor", "square", "shift3"]))
def test_tracing_soundness_random(seed, which):
    m = {"successor": affine(1, 1), "square": square_plus(1), "shift3": affine(1, 3)}[which]
    rng = random.Random(seed)
    target = rng.sample(range(-4, 5), rng.randint(1, 3))
    gap = gap_bound(m, Window.of(target))
    inst = random_instance(rng, m, target, rng.randint(2, 4), Alphabet(2), gap, max_len=3)
    rep = build_tracing_point(m, inst)
    assert rep.accepted and verify_tracer(m, inst, rep.tracer)
