"""Backend selection for the hot loops.

The compiled extension ``shiftspec._ckernels`` is used when it imports;
otherwise (or when ``SHIFTSPEC_PURE_PYTHON=1``) the pure-Python versions in
``shiftspec._pykernels`` are used. Both produce identical results.
"""

from __future__ import annotations

import os
from types import ModuleType
from typing import Sequence

from shiftspec import _pykernels

_INT64_MAX = 2**63 - 1


def _load_compiled() -> ModuleType | None:
    if os.environ.get("SHIFTSPEC_PURE_PYTHON", "") not in ("", "0"):
        return None
    try:
        from shiftspec import _ckernels
    except ImportError:
        return None
    return _ckernels


_compiled = _load_compiled()
BACKEND = "cython" if _compiled is not None else "python"


def backends() -> dict[str, ModuleType]:
    """All importable backends by name, for equivalence tests and benchmarks."""
    out = {"python": _pykernels}
    if _compiled is not None:
        out["cython"] = _compiled
    else:
        try:
            from shiftspec import _ckernels
        except ImportError:
            pass
        else:
            out["cython"] = _ckernels
    return out


def _impl() -> ModuleType:
    return _compiled if _compiled is not None else _pykernels


def first_tracer(n_positions: int, n_symbols: int, positions: Sequence[int], values: Sequence[int]) -> int:
    return _impl().first_tracer(n_positions, n_symbols, list(positions), list(values))


def functional_graph(images: Sequence[int]) -> tuple[list[int], list[int], list[int]]:
    return _impl().functional_graph(list(images))


def refine_residue(values: Sequence[int], modulus: int) -> tuple[int, list[int]]:
    impl = _impl()
    if impl is not _pykernels and values and (values[-1] > _INT64_MAX or values[0] < 0):
        impl = _pykernels
    return impl.refine_residue(list(values), modulus)
