from itertools import product

import pytest
from hypothesis import given
from hypothesis import strategies as st

from shiftspec.errors import DomainError
from shiftspec.index_maps import affine, iterate, square_plus, table
from shiftspec.oracle import enumerate_small_maps
from shiftspec.shift_core import Alphabet, Configuration, Window, entourage_check, eval_orbit, value_at


def test_value_at():
    cfg = Configuration.make(2, 0, {3: 1})
    assert value_at(cfg, 3) == 1
    assert value_at(cfg, 4) == 0
    assert all(value_at(Configuration.constant(2, 1), i) == 1 for i in (-7, 0, 99, "a"))


def test_configuration_is_canonical():
    a = Configuration.make(2, 0, {3: 1, 5: 0, -1: 1})
    b = Configuration.make(2, 0, [(-1, 1), (3, 1)])
    assert a == b and hash(a) == hash(b)
    assert a.overrides == ((-1, 1), (3, 1))


def test_configuration_rejects_bad_symbol():
    with pytest.raises(Exception):
        Configuration.make(2, 0, {1: 2})
    with pytest.raises(Exception):
        Alphabet(0)


def test_eval_orbit_examples():
    cfg = Configuration.make(2, 0, {2: 1})
    assert eval_orbit(affine(1, 1), cfg, Window.of([0]), 2) == {0: 1}
    assert eval_orbit(affine(1, 1), cfg, Window.of([0, 2]), 0) == {0: 0, 2: 1}
    assert eval_orbit(table({"a": "a"}), Configuration.constant(2, 1), Window.of(["a"]), 9) == {"a": 1}


def test_window_must_lie_in_domain():
    with pytest.raises(DomainError):
        eval_orbit(table({"a": "a"}), Configuration.constant(2, 0), Window.of(["q"]), 1)


def test_entourage_examples():
    cfg = Configuration.make(2, 0, {5: 1})
    assert entourage_check(cfg, cfg, Window.of([0, 5]))
    assert not entourage_check(Configuration.constant(2, 0), Configuration.constant(2, 1), Window.of([0]))
    assert entourage_check(cfg, Configuration.constant(2, 0), Window.of([1, 2]))


def test_entourage_alphabet_mismatch():
    with pytest.raises(Exception):
        entourage_check(Configuration.constant(2, 0), Configuration.constant(3, 0), Window.of([0]))


configs = st.builds(
    lambda d, ov: Configuration.make(2, d, ov),
    st.integers(0, 1),
    st.dictionaries(st.integers(-30, 30), st.integers(0, 1), max_size=8),
)
windows = st.lists(st.integers(-10, 10), min_size=1, max_size=4)


@given(configs, windows, st.integers(0, 6), st.sampled_from([affine(1, 1), affine(-1, 2), square_plus(0)]))
def test_pullback_law(cfg, H, t, m):
    got = eval_orbit(m, cfg, Window.of(H), t)
    expected = {a: cfg.value_at(iterate(m, a, t)) for a in H}
    assert got == expected


@given(configs, windows, st.integers(0, 5), st.integers(0, 5))
def test_orbit_composition(cfg, H, s, t):
    m = affine(-1, 3)
    whole = eval_orbit(m, cfg, Window.of(H), s + t)
    assert whole == {a: cfg.value_at(iterate(m, iterate(m, a, t), s)) for a in H}


@given(configs, configs, windows, windows)
def test_entourage_monotone(a, b, H, K):
    if entourage_check(a, b, Window.of(H + K)):
        assert entourage_check(a, b, Window.of(H))


def test_functor_identity_exhaustive():
    # sigma_phi after sigma_psi equals sigma of (psi after phi) on indices
    for n in (1, 2, 3):
        maps = list(enumerate_small_maps(n))
        atoms = maps[0].atoms
        H = Window.of(atoms)
        for phi, psi in product(maps, repeat=2):
            composed = table({a: psi(phi(a)) for a in atoms})
            for vals in product((0, 1), repeat=n):
                z = Configuration.make(2, 0, dict(zip(atoms, vals)))
                inner = eval_orbit(psi, z, Window.of(atoms), 1)
                after = eval_orbit(phi, Configuration.make(2, 0, inner), H, 1)
                assert after == eval_orbit(composed, z, H, 1)
