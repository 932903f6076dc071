import os
import subprocess
import sys
from itertools import product

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from shiftspec import _pykernels, kernels

BACKENDS = kernels.backends()


def test_backend_reported():
    assert kernels.BACKEND in BACKENDS
    assert "python" in BACKENDS


def test_pure_python_switch():
    code = "from shiftspec import kernels; print(kernels.BACKEND)"
    env = {**os.environ, "SHIFTSPEC_PURE_PYTHON": "1"}
    out = subprocess.run([sys.executable, "-c", code], env=env, capture_output=True, text=True, check=True)
    assert out.stdout.strip() == "python"


def test_first_tracer_small():
    # position 0 most significant: word (0, 1) is code 1
    assert _pykernels.first_tracer(2, 2, [1], [1]) == 1
    assert _pykernels.first_tracer(2, 2, [0, 0], [0, 1]) == -1
    assert _pykernels.first_tracer(0, 2, [], []) == 0


def test_functional_graph_examples():
    tail, period, label = _pykernels.functional_graph([1, 2, 0, 0, 3])
    assert tail == [0, 0, 0, 1, 2]
    assert period == [3] * 5
    assert label == [0] * 5


@settings(max_examples=80, deadline=None)
@given(st.lists(st.integers(0, 7), min_size=1, max_size=8).flatmap(
    lambda xs: st.just([x % len(xs) for x in xs])))
def test_functional_graph_backends_agree(images):
    results = {name: mod.functional_graph(list(images)) for name, mod in BACKENDS.items()}
    assert len({repr(r) for r in results.values()}) == 1
    tail, period, _ = results["python"]
    for node in range(len(images)):
        x = node
        for _ in range(tail[node]):
            x = images[x]
        y = x
        for _ in range(period[node]):
            y = images[y]
        assert y == x


@settings(max_examples=80, deadline=None)
@given(st.integers(1, 6), st.integers(2, 3), st.data())
def test_first_tracer_backends_agree(n, k, data):
    pos = data.draw(st.lists(st.integers(0, n - 1), max_size=6))
    vals = data.draw(st.lists(st.integers(0, k - 1), min_size=len(pos), max_size=len(pos)))
    results = {name: mod.first_tracer(n, k, pos, vals) for name, mod in BACKENDS.items()}
    assert len(set(results.values())) == 1
    brute = next((c for c, w in enumerate(product(range(k), repeat=n)) if all(w[p] == v for p, v in zip(pos, vals))), -1)
    assert results["python"] == brute


@settings(max_examples=80, deadline=None)
@given(st.lists(st.integers(0, 10**6), min_size=1, max_size=200), st.integers(1, 13))
def test_refine_residue_backends_agree(values, m):
    results = {name: mod.refine_residue(list(values), m) for name, mod in BACKENDS.items()}
    assert len({repr(r) for r in results.values()}) == 1
    r, kept = results["python"]
    assert all(v % m == r for v in kept)
    assert len(kept) * m >= len(values)


@pytest.mark.skipif(
    "cython" not in BACKENDS or os.environ.get("SHIFTSPEC_PURE_PYTHON", "") not in ("", "0"),
    reason="compiled extension not built or disabled",
)
def test_compiled_backend_is_default():
    assert kernels.BACKEND == "cython"
