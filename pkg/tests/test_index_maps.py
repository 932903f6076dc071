import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from shiftspec.errors import MapDefinitionError
from shiftspec.index_maps import (
    Affine,
    Budget,
    Interval,
    Residue,
    affine,
    apply,
    check_certificate,
    class_type,
    confluence,
    decide_injective,
    decide_periodic_free,
    decide_surjective,
    image_complement,
    iterate,
    period,
    piecewise,
    preimages,
    same_class,
    square_plus,
    table,
)
from shiftspec.oracle import enumerate_small_maps
from shiftspec.verdicts import EscapeCertificate, InjectivityCollision, PeriodicWitness

SWAP = {"a": "b", "b": "a"}
ABSORB = {"a": "b", "b": "b"}


@pytest.mark.parametrize(
    "m, idx, expected",
    [(affine(1, 1), 5, 6), (table({"a": "a"}), "a", "a"), (square_plus(1), -3, 10)],
)
def test_apply(m, idx, expected):
    assert apply(m, idx) == expected


@pytest.mark.parametrize(
    "m, idx, t, expected",
    [(affine(1, 1), 0, 4, 4), (square_plus(1), 1, 2, 5), (table(ABSORB), "a", 3, "b")],
)
def test_iterate(m, idx, t, expected):
    assert iterate(m, idx, t) == expected


def test_iterate_closed_forms_match_naive():
    for m in (affine(1, 7), affine(-1, 3), affine(0, 4), affine(3, -2)):
        x = 5
        for t in range(12):
            assert iterate(m, 5, t) == x
            x = apply(m, x)


def test_apply_outside_domain():
    with pytest.raises(Exception):
        apply(table(SWAP), "z")


@pytest.mark.parametrize(
    "m, idx, expected",
    [(square_plus(1), 2, {1, -1}), (affine(1, 1), 0, {-1}), (affine(2, 0), 3, set())],
)
def test_preimages(m, idx, expected):
    assert preimages(m, idx) == expected


def test_preimages_infinite_fiber_is_none():
    assert preimages(affine(0, 4), 4) is None
    assert preimages(affine(0, 4), 5) == set()


def test_decide_injective():
    assert decide_injective(affine(-1, 0)).is_yes
    v = decide_injective(square_plus(1))
    assert v.is_no and {v.certificate.first, v.certificate.second} == {1, -1}
    v = decide_injective(table(ABSORB))
    assert v.is_no and isinstance(v.certificate, InjectivityCollision)
    assert check_certificate(table(ABSORB), v)


def test_piecewise_injectivity_across_cells(mixed_parity):
    assert decide_injective(mixed_parity).is_yes
    # 0 -> 2 and 1 -> 2 land together across the two cells
    clash = piecewise([(Residue(0, 2), Affine(1, 2))], Affine(1, 1))
    v = decide_injective(clash)
    assert v.is_no and apply(clash, v.certificate.first) == apply(clash, v.certificate.second)


def test_surjectivity_and_image_complement():
    assert decide_surjective(affine(1, 1)).is_yes
    assert decide_surjective(affine(2, 0)).is_no
    d1 = piecewise([(Interval(0, 0), Affine(0, 0)), (Interval(1, 1), Affine(0, 0))], Affine(-1, 1))
    assert image_complement(d1) == {1}
    assert image_complement(piecewise([(Interval(1, 1), Affine(0, 0))], Affine(-1, 1))) == set()


def test_decide_periodic_free():
    assert decide_periodic_free(affine(1, 1)).is_yes
    v = decide_periodic_free(affine(-1, 0))
    assert v.is_no and v.certificate == PeriodicWitness(0, 1)
    v = decide_periodic_free(square_plus(1))
    assert v.is_yes and isinstance(v.certificate, EscapeCertificate)


def test_square_plus_has_no_cycle_in_window():
    # independent sweep: n^2 + 1 > n for every n, so no orbit returns
    assert all(n * n + 1 > n for n in range(-10**4, 10**4))


def test_tables_always_have_periodic_points():
    for n in range(1, 6):
        for m in enumerate_small_maps(n) if n < 5 else list(enumerate_small_maps(n))[::97]:
            v = decide_periodic_free(m)
            assert v.is_no and check_certificate(m, v)


@pytest.mark.parametrize(
    "m, idx, expected",
    [(table(SWAP), "a", 2), (affine(-1, 0), 0, 1), (affine(-1, 3), 1, 2)],
)
def test_period(m, idx, expected):
    assert period(m, idx) == expected


def test_same_class():
    assert same_class(affine(1, 1), 0, 5).is_yes
    assert same_class(table({"a": "a", "b": "b"}), "a", "b").is_no
    assert same_class(affine(-1, 0), 3, -3).is_yes
    assert same_class(affine(1, 1), 0, 5).certificate


def test_class_type():
    assert class_type(affine(1, 1), 7).kind == "chain_z"
    d = class_type(table(SWAP), "a")
    assert (d.kind, d.period) == ("cycle", 2)


def test_class_type_mixed(mixed_parity, mixed_chain):
    assert class_type(mixed_parity, -1).kind == "cycle"
    assert class_type(mixed_parity, 0).kind == "chain_z"
    d = class_type(mixed_chain, 0)
    assert (d.kind, d.root) == ("chain_n", 0)


def test_partial_table_rejected():
    with pytest.raises(MapDefinitionError):
        table({"a": "b"})


def test_overlapping_guards_rejected():
    with pytest.raises(MapDefinitionError):
        piecewise([(Interval(0, 5), Affine(1, 0)), (Interval(3, 9), Affine(1, 0))], Affine(1, 1))


@pytest.mark.parametrize(
    "m, F, expected",
    [(affine(1, 1), [0, 5], ([5], 5)), (affine(1, 1), [0], ([0], 0)), (square_plus(1), [1, -1], ([2], 1))],
)
def test_confluence(m, F, expected):
    assert confluence(m, F) == expected


def test_budget_exhaustion_gives_unknown():
    # a piecewise map whose orbits wander; a tiny budget cannot certify
    m = piecewise([(Residue(0, 2), Affine(1, 1))], Affine(1, 1), budget=Budget(magnitude=4, steps=3))
    v = decide_periodic_free(m)
    assert v.is_yes or v.is_unknown


# ---------------------------------------------------------------------------
# properties

PIECE = piecewise([(Residue(0, 2), Affine(1, 2))], Affine(-1, 0))


@given(st.sampled_from([affine(1, 3), affine(-1, 3), affine(2, -1), PIECE]), st.integers(-50, 50),
       st.integers(0, 20), st.integers(0, 20))
def test_iterate_composition(m, idx, s, t):
    assert iterate(m, idx, s + t) == iterate(m, iterate(m, idx, s), t)


@given(st.sampled_from([affine(1, 1), affine(2, 0), affine(-3, 1), square_plus(1), PIECE]), st.integers(-200, 200))
def test_preimages_are_exact(m, idx):
    S = preimages(m, idx)
    assert S is not None
    assert all(apply(m, s) == idx for s in S)
    assert {n for n in range(-300, 301) if apply(m, n) == idx} <= S


@settings(max_examples=60)
@given(st.integers(-30, 30), st.integers(-30, 30), st.integers(-30, 30))
def test_same_class_relation(a, b, c):
    m = PIECE
    assert same_class(m, a, a).is_yes
    ab, ba = same_class(m, a, b), same_class(m, b, a)
    assert ab.value == ba.value
    if ab.is_yes and same_class(m, b, c).is_yes:
        assert same_class(m, a, c).is_yes


@settings(max_examples=60)
@given(st.lists(st.integers(-40, 40), min_size=1, max_size=4))
def test_confluence_postcondition(F):
    for m in (affine(1, 1), affine(1, 3), square_plus(1)):
        reps, depth = confluence(m, F)
        for g in F:
            assert any(iterate(m, g, i) in reps for i in range(depth + 1))


@settings(max_examples=40)
@given(st.integers(-20, 20), st.integers(1, 6))
def test_class_descriptor_constant_on_classes(a, t):
    m = PIECE
    b = iterate(m, a, t)
    assert class_type(m, a).signature() == class_type(m, b).signature()
