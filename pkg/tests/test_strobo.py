import random

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from shiftspec import strobo
from shiftspec.errors import BudgetError, PreconditionError
from shiftspec.index_maps import Affine, Residue, affine, iterate, piecewise, square_plus, table
from shiftspec.strobo import SequenceSpec, congruence_subsequence, gap_subsequence


def test_congruence_naturals_parity():
    tab = congruence_subsequence(SequenceSpec.naturals(200), 2)
    assert tab.f[1] == 1 and tab.f[2] in (1, 2)
    assert len({n % 2 for n in tab.subsequence[2:]}) == 1
    assert tab.holds()


def test_congruence_arithmetic():
    tab = congruence_subsequence(SequenceSpec.arithmetic(3, 6), 3)
    assert tab.f == {1: 1, 2: 1, 3: 3}
    assert tab.residue(3) == 0


def test_congruence_short_prefix():
    with pytest.raises(BudgetError):
        congruence_subsequence(SequenceSpec.explicit([5, 10, 15, 20]), 5)


def test_congruence_feeds_gap_output():
    gaps = gap_subsequence(SequenceSpec.naturals(20000))
    tab = congruence_subsequence(gaps, 4)
    seq = tab.subsequence
    assert tab.holds()
    assert all(seq[i + 1] - seq[i] > 2 * i for i in range(len(seq) - 1))


def test_gap_subsequence_examples():
    out = gap_subsequence(SequenceSpec.naturals(100), 4)
    assert out == [0, 1, 4, 9]
    assert all(out[i + 1] - out[i] > 2 * i for i in range(3))
    assert gap_subsequence(SequenceSpec.arithmetic(1, 100, 10), 3) == [1, 101, 201]
    with pytest.raises(BudgetError):
        gap_subsequence(SequenceSpec.explicit([1, 2]), 5)


def test_sequence_validation():
    with pytest.raises(Exception):
        SequenceSpec.explicit([3, 3, 4])
    with pytest.raises(Exception):
        SequenceSpec.arithmetic(0, 0)


@settings(max_examples=40, deadline=None)
@given(st.lists(st.integers(0, 5000), min_size=30, max_size=400, unique=True), st.integers(1, 6))
def test_residue_invariant(terms, M):
    terms.sort()
    try:
        tab = congruence_subsequence(terms, M)
    except BudgetError:
        return
    seq = tab.subsequence
    assert set(seq) <= set(terms) and list(seq) == sorted(seq)
    for m in range(1, M + 1):
        assert 1 <= tab.f[m] <= m
        assert all(seq[i] % m == tab.f[m] % m for i in range(m, len(seq)))


@settings(max_examples=40)
@given(st.lists(st.integers(0, 10**5), min_size=1, max_size=300, unique=True))
def test_gap_property(terms):
    terms.sort()
    out = gap_subsequence(terms)
    assert all(out[i + 1] - out[i] > 2 * i for i in range(len(out) - 1))


def test_rho_three_cycle(cycle3):
    A = SequenceSpec.naturals(300)
    rho = strobo.build_rho_all_periodic(cycle3, A, [0, 1, 2])
    assert rho.kind == "all_periodic" and rho.bound == 3
    f3 = rho.residues.f[3]
    for i in range(rho.threshold, len(rho.subsequence)):
        for a in (0, 1, 2):
            assert iterate(cycle3, a, 3 - f3 + rho.subsequence[i]) == a
    assert strobo.verify_uniform_convergence(cycle3, rho, A, [0, 1, 2])


def test_rho_fixed_point_is_identity():
    m = table({"a": "a"})
    rho = strobo.build_rho(m, SequenceSpec.naturals(50), ["a"])
    assert rho.source("a") == "a" and rho.threshold == 0


def test_rho_negation_even_terms(negation):
    A = SequenceSpec.arithmetic(2, 2, 200)
    rho = strobo.build_rho(negation, A, [3, -3])
    assert rho.residues.f[2] == 2
    assert rho.source(3) == 3 and rho.source(-3) == -3
    assert strobo.verify_uniform_convergence(negation, rho, A, [3, -3])


def test_rho_successor(successor):
    A = SequenceSpec.naturals(300)
    rho = strobo.build_rho_aperiodic(successor, A, [0])
    assert rho.kind == "aperiodic" and rho.bound == 2 and rho.threshold <= rho.bound
    assert strobo.verify_guarantee(rho)
    assert strobo.verify_uniform_convergence(successor, rho, A, [0], trials=30)


def test_rho_shift_by_two():
    m = affine(1, 2)
    rho = strobo.build_rho(m, SequenceSpec.naturals(300), [0, 2])
    assert rho.bound == 3 and rho.threshold <= 3
    assert len(rho.chains) == 1


def test_rho_product():
    # odd integers fixed, evens translated by two
    m = piecewise([(Residue(1, 2), Affine(1, 0))], Affine(1, 2))
    A = SequenceSpec.naturals(300)
    rho = strobo.build_rho(m, A, [1, 0])
    assert rho.kind == "product"
    assert strobo.verify_guarantee(rho)
    assert strobo.verify_uniform_convergence(m, rho, A, [1, 0])


def test_rho_rejects_non_injective():
    with pytest.raises(PreconditionError):
        strobo.build_rho(square_plus(1), SequenceSpec.naturals(100), [0])


def test_convergence_detects_threshold_mutation(cycle3):
    A = SequenceSpec.naturals(300)
    rho = strobo.build_rho(cycle3, A, [0, 1, 2])
    bad = strobo.verify_uniform_convergence(cycle3, rho.with_threshold(rho.threshold - 1), A, [0, 1, 2])
    assert not bad and bad.counterexample is not None


def test_decisions():
    assert strobo.decide_strobo(affine(-1, 0)).is_yes
    assert strobo.decide_strobo(square_plus(1)).is_no
    assert strobo.decide_strobo(table({"a": "b", "b": "b"})).is_no
    assert strobo.decide_strong_strobo(affine(1, 1)).is_yes
    assert strobo.decide_strong_strobo(affine(-1, 0)).is_no
    assert strobo.decide_strong_strobo(table({"a": "b", "b": "a"})).is_no


def test_bijective_tables_random_prefixes():
    rng = random.Random(11)
    perms = [table({0: 1, 1: 0, 2: 2}), table({0: 1, 1: 2, 2: 3, 3: 0}), table({0: 0})]
    for m in perms:
        for _ in range(20):
            terms = sorted(rng.sample(range(3000), 400))
            A = SequenceSpec.explicit(terms)
            rho = strobo.build_rho(m, A, m.atoms)
            assert strobo.verify_guarantee(rho)
            assert strobo.verify_uniform_convergence(m, rho, A, m.atoms, trials=5, seed=rng.randrange(100))
