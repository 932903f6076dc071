"""Named example systems and their expected placement in the region diagrams.

Shift examples act on ``X^Z``. Fort examples live on ``{+-1/n} U {0}``,
encoded on Z by ``1/n <-> n`` with the particular point ``0 <-> 0``; the map
``x -> x/(x-1)`` becomes ``n -> 1 - n`` in that encoding.
"""

from __future__ import annotations

from shiftspec.config import SystemConfig
from shiftspec.fort import (
    FortSystem,
    decide_fort_spec,
    decide_fort_strobo,
    decide_fort_strong_strobo,
    decide_fort_weak_spec,
    eventual_image,
)
from shiftspec.index_maps import Affine, FunctionalMap, Interval, affine, piecewise, square_plus
from shiftspec.shift_core import Alphabet, Configuration, Window
from shiftspec.specification import SpecInstance, decide_spec, decide_weak_spec
from shiftspec.strobo import SequenceSpec, decide_strobo, decide_strong_strobo
from shiftspec.verdicts import Verdict

PROPERTIES = ("weak_spec", "strobo", "spec", "strong_strobo")

# placement of each example in the two region diagrams
DIAGRAM = {
    "C1": {"weak_spec": True, "strobo": False, "spec": False, "strong_strobo": False},
    "C2": {"weak_spec": False, "strobo": True, "spec": False, "strong_strobo": False},
    "C3": {"weak_spec": True, "strobo": True, "spec": True, "strong_strobo": True},
    "D1": {"weak_spec": True, "strobo": False, "spec": False, "strong_strobo": False},
    "D2": {"weak_spec": False, "strobo": False, "spec": False, "strong_strobo": False},
    "D3": {"weak_spec": False, "strobo": True, "spec": False, "strong_strobo": False},
}

# the diagram places D1 where the computed eventual image says it cannot be
KNOWN_DISCREPANCIES = {"D1"}

DESCRIPTIONS = {
    "C1": "n -> n^2 + 1 on Z",
    "C2": "n -> -n on Z",
    "C3": "n -> n + 1 on Z",
    "D1": "x -> x/(x-1) for x != 1, 1 -> 0",
    "D2": "x -> x/(x-1) for x != 1, 1 -> -1",
    "D3": "x -> -x",
}


def _fort_map(name: str) -> FunctionalMap:
    if name == "D3":
        return affine(-1, 0, name=name)
    target = 0 if name == "D1" else -1
    return piecewise(
        [(Interval(0, 0), Affine(0, 0)), (Interval(1, 1), Affine(0, target))],
        Affine(-1, 1),
        name=name,
    )


def shift_builtin(name: str) -> FunctionalMap:
    return {"C1": square_plus(1, name="C1"), "C2": affine(-1, 0, name="C2"), "C3": affine(1, 1, name="C3")}[name]


def fort_builtin(name: str) -> FortSystem:
    return FortSystem(_fort_map(name), 0, name)


def _const_segments(alphabet: Alphabet, spec) -> tuple:
    return tuple(Configuration.constant(alphabet, s) for s, _ in spec), tuple(w for _, w in spec)


def builtin_config(name: str) -> SystemConfig:
    if name not in DIAGRAM:
        raise KeyError(f"unknown builtin {name!r}; choose from {sorted(DIAGRAM)}")
    A = Alphabet(2)
    if name.startswith("C"):
        m = shift_builtin(name)
        inst = None
        window = (0,)
        if name == "C3":
            segs, wins = _const_segments(A, [(1, (0, 1)), (0, (3, 4))])
            inst = SpecInstance(segs, wins, Window.of([0]))
        elif name == "C1":
            segs, wins = _const_segments(A, [(1, (0, 0)), (0, (2, 3))])
            inst = SpecInstance(segs, wins, Window.of([1]))
            window = (1, -1)
        else:
            window = (3, -3)
        return SystemConfig("generalized_shift", m, 2, None, window, inst, 0, SequenceSpec.naturals(), name)
    window = (1, -1) if name == "D3" else (2, -1)
    return SystemConfig("fort", _fort_map(name), 2, 0, window, None, 0, SequenceSpec.naturals(), name)


def _flag(v: Verdict):
    return None if v.is_unknown else v.is_yes


def shift_verdicts(m: FunctionalMap) -> dict[str, Verdict]:
    return {
        "weak_spec": decide_weak_spec(m),
        "strobo": decide_strobo(m),
        "spec": decide_spec(m),
        "strong_strobo": decide_strong_strobo(m),
    }


def fort_verdicts(sys: FortSystem) -> dict[str, Verdict]:
    return {
        "weak_spec": decide_fort_weak_spec(sys),
        "strobo": decide_fort_strobo(sys),
        "spec": decide_fort_spec(sys),
        "strong_strobo": decide_fort_strong_strobo(sys),
    }


def verdicts_for(cfg: SystemConfig) -> dict[str, Verdict]:
    return fort_verdicts(cfg.fort_system()) if cfg.is_fort else shift_verdicts(cfg.map)


def classify_all(names=None) -> dict[str, dict]:
    """Computed placement of each builtin; ``None`` marks an Unknown verdict."""
    out = {}
    for name in names if names is not None else sorted(DIAGRAM):
        row = {k: _flag(v) for k, v in verdicts_for(builtin_config(name)).items()}
        if name.startswith("D"):
            img, _ = eventual_image(fort_builtin(name))
            row["eventual_image"] = img.describe() if img is not None else None
        out[name] = row
    return out


def discrepancies(classification: dict) -> dict[str, dict]:
    """Builtins whose computed placement differs from the diagram."""
    out = {}
    for name, row in classification.items():
        diff = {k: (row[k], DIAGRAM[name][k]) for k in PROPERTIES if row[k] != DIAGRAM[name][k]}
        if diff:
            out[name] = diff
    return out
