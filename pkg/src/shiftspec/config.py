"""TOML system descriptions.

Schema (all tables optional unless noted)::

    kind = "generalized_shift"        # or "fort"
    name = "C3"
    alphabet_size = 2                 # shifts only

    [index_set]                       # required
    kind = "integers"                 # or "finite" with atoms = [...]

    [map]                             # required
    rule = "affine"                   # table | affine | negate | square_plus | piecewise
    a = 1
    b = 1
    # table:       table = [["a", "b"], ["b", "a"]]
    # square_plus: c = 1
    # piecewise:   branches = [{guard = "interval", lo = 1, hi = 1, rule = "constant", value = 0},
    #                          {guard = "residue", residue = 0, modulus = 2, rule = "affine", a = 1, b = 2}]
    #              default = {rule = "affine", a = -1, b = 1}

    [budget]
    magnitude = 1000000
    steps = 10000

    [fort]                            # fort only
    b = 0

    [window]
    coords = [0, 5]

    [sequence]
    kind = "naturals"                 # arithmetic (start, step) | explicit (terms)
    prefix = 4000

    [instance]
    target = [0]
    fill = 0
    [[instance.segments]]
    default = 1
    overrides = [[2, 0]]
    window = [0, 1]
"""

from __future__ import annotations

import sys
from dataclasses import dataclass
from pathlib import Path
from typing import Any, Optional

import tomli_w

if sys.version_info >= (3, 11):
    import tomllib
else:
    import tomli as tomllib

from shiftspec.errors import ShiftSpecError
from shiftspec.fort import FortSystem
from shiftspec.index_maps import (
    Affine,
    Budget,
    FunctionalMap,
    IndexSet,
    Interval,
    Piecewise,
    Residue,
    SquarePlus,
    Table,
)
from shiftspec.shift_core import Alphabet, Configuration, Window
from shiftspec.specification import SpecInstance
from shiftspec.strobo import DEFAULT_PREFIX, SequenceSpec

KINDS = ("generalized_shift", "fort")


class ConfigError(ShiftSpecError, ValueError):
    """Malformed or schema-invalid configuration."""


@dataclass(frozen=True)
class SystemConfig:
    kind: str
    map: FunctionalMap
    alphabet_size: int = 2
    b: Any = None
    window: Optional[tuple] = None
    instance: Optional[SpecInstance] = None
    fill: int = 0
    sequence: Optional[SequenceSpec] = None
    name: str = ""

    def __post_init__(self):
        if self.kind not in KINDS:
            raise ConfigError(f"kind must be one of {KINDS}")
        if self.kind == "fort" and self.b is None:
            raise ConfigError("fort systems need [fort] b")

    @property
    def is_fort(self) -> bool:
        return self.kind == "fort"

    def fort_system(self) -> FortSystem:
        return FortSystem(self.map, self.b, self.name)

    def with_budget(self, magnitude: Optional[int] = None, steps: Optional[int] = None) -> "SystemConfig":
        old = self.map.budget
        budget = Budget(magnitude or old.magnitude, steps or old.steps)
        m = FunctionalMap(self.map.domain, self.map.rule, budget, self.map.name)
        return SystemConfig(self.kind, m, self.alphabet_size, self.b, self.window, self.instance, self.fill, self.sequence, self.name)


# ---------------------------------------------------------------------------
# parsing


def _take(table: dict, path: str, allowed: set) -> dict:
    if not isinstance(table, dict):
        raise ConfigError(f"{path}: expected a table")
    extra = set(table) - allowed
    if extra:
        raise ConfigError(f"{path}: unknown key(s) {sorted(extra)}")
    return table


def _int(table: dict, key: str, path: str, default=None) -> int:
    if key not in table:
        if default is None:
            raise ConfigError(f"{path}.{key}: required integer missing")
        return default
    v = table[key]
    if not isinstance(v, int) or isinstance(v, bool):
        raise ConfigError(f"{path}.{key}: expected an integer, got {v!r}")
    return v


def _subrule(spec: dict, path: str):
    _take(spec, path, {"rule", "a", "b", "c", "value", "guard", "lo", "hi", "residue", "modulus"})
    rule = spec.get("rule")
    if rule == "affine":
        return Affine(_int(spec, "a", path), _int(spec, "b", path))
    if rule == "negate":
        return Affine(-1, 0)
    if rule == "constant":
        return Affine(0, _int(spec, "value", path))
    if rule == "square_plus":
        return SquarePlus(_int(spec, "c", path))
    raise ConfigError(f"{path}.rule: expected affine, negate, constant or square_plus, got {rule!r}")


def _guard(spec: dict, path: str):
    kind = spec.get("guard")
    if kind == "interval":
        lo, hi = spec.get("lo"), spec.get("hi")
        for k, v in (("lo", lo), ("hi", hi)):
            if v is not None and (not isinstance(v, int) or isinstance(v, bool)):
                raise ConfigError(f"{path}.{k}: expected an integer")
        return Interval(lo, hi)
    if kind == "residue":
        return Residue(_int(spec, "residue", path), _int(spec, "modulus", path))
    raise ConfigError(f"{path}.guard: expected interval or residue, got {kind!r}")


def _rule(spec: dict, domain: IndexSet):
    path = "map"
    _take(spec, path, {"rule", "a", "b", "c", "table", "branches", "default"})
    rule = spec.get("rule")
    if rule == "table":
        pairs = spec.get("table")
        if not isinstance(pairs, list) or not all(isinstance(p, list) and len(p) == 2 for p in pairs):
            raise ConfigError("map.table: expected a list of [atom, image] pairs")
        return Table(tuple((x, y) for x, y in pairs))
    if rule == "piecewise":
        branches = spec.get("branches", [])
        if not isinstance(branches, list):
            raise ConfigError("map.branches: expected a list of tables")
        out = []
        for k, br in enumerate(branches):
            p = f"map.branches[{k}]"
            if not isinstance(br, dict):
                raise ConfigError(f"{p}: expected a table")
            out.append((_guard(br, p), _subrule(br, p)))
        if "default" not in spec:
            raise ConfigError("map.default: piecewise rules need a default")
        return Piecewise(tuple(out), _subrule(spec["default"], "map.default"))
    if rule in ("affine", "negate", "square_plus"):
        return _subrule({k: v for k, v in spec.items() if k in ("rule", "a", "b", "c")}, path)
    raise ConfigError(f"map.rule: unknown rule {rule!r}")


def _index_set(spec) -> IndexSet:
    _take(spec, "index_set", {"kind", "atoms"})
    kind = spec.get("kind")
    if kind == "integers":
        return IndexSet.integers()
    if kind == "finite":
        atoms = spec.get("atoms")
        if not isinstance(atoms, list):
            raise ConfigError("index_set.atoms: expected a list")
        return IndexSet.finite(atoms)
    raise ConfigError(f"index_set.kind: expected integers or finite, got {kind!r}")


def _sequence(spec) -> SequenceSpec:
    _take(spec, "sequence", {"kind", "start", "step", "terms", "prefix"})
    kind = spec.get("kind", "naturals")
    prefix = _int(spec, "prefix", "sequence", DEFAULT_PREFIX)
    if kind == "naturals":
        return SequenceSpec.naturals(prefix)
    if kind == "arithmetic":
        return SequenceSpec.arithmetic(_int(spec, "start", "sequence"), _int(spec, "step", "sequence"), prefix)
    if kind == "explicit":
        terms = spec.get("terms")
        if not isinstance(terms, list):
            raise ConfigError("sequence.terms: expected a list of integers")
        return SequenceSpec.explicit(terms)
    raise ConfigError(f"sequence.kind: unknown kind {kind!r}")


def parse_sequence_arg(text: str) -> SequenceSpec:
    """``naturals[:prefix]``, ``arithmetic:start:step[:prefix]`` or ``explicit:1,2,5``."""
    head, _, rest = text.partition(":")
    try:
        if head == "naturals":
            return SequenceSpec.naturals(int(rest) if rest else DEFAULT_PREFIX)
        if head == "arithmetic":
            parts = [int(p) for p in rest.split(":")]
            return SequenceSpec.arithmetic(*parts)
        if head == "explicit":
            return SequenceSpec.explicit([int(p) for p in rest.split(",") if p])
    except (TypeError, ValueError) as exc:
        raise ConfigError(f"bad sequence {text!r}: {exc}") from exc
    raise ConfigError(f"bad sequence {text!r}")


def _instance(spec, alphabet: Alphabet) -> tuple[SpecInstance, int]:
    _take(spec, "instance", {"target", "fill", "segments"})
    target = spec.get("target")
    if not isinstance(target, list) or not target:
        raise ConfigError("instance.target: expected a nonempty list")
    segs, wins = [], []
    for k, seg in enumerate(spec.get("segments", [])):
        p = f"instance.segments[{k}]"
        _take(seg, p, {"default", "overrides", "window"})
        win = seg.get("window")
        if not isinstance(win, list) or len(win) != 2:
            raise ConfigError(f"{p}.window: expected [l, k]")
        overrides = seg.get("overrides", [])
        if not all(isinstance(o, list) and len(o) == 2 for o in overrides):
            raise ConfigError(f"{p}.overrides: expected [[index, symbol], ...]")
        try:
            segs.append(Configuration.make(alphabet, _int(seg, "default", p, 0), [tuple(o) for o in overrides]))
        except ValueError as exc:
            raise ConfigError(f"{p}: {exc}") from exc
        wins.append(tuple(win))
    try:
        inst = SpecInstance(tuple(segs), tuple(wins), Window.of(target))
    except ValueError as exc:
        raise ConfigError(f"instance: {exc}") from exc
    return inst, _int(spec, "fill", "instance", 0)


def config_from_dict(doc: dict) -> SystemConfig:
    _take(doc, "<root>", {"kind", "name", "alphabet_size", "index_set", "map", "budget", "fort", "window", "sequence", "instance"})
    kind = doc.get("kind", "generalized_shift")
    if kind not in KINDS:
        raise ConfigError(f"kind: expected one of {KINDS}, got {kind!r}")
    if "index_set" not in doc or "map" not in doc:
        raise ConfigError("[index_set] and [map] are required")
    domain = _index_set(doc["index_set"])
    bud = _take(doc.get("budget", {}), "budget", {"magnitude", "steps"})
    name = doc.get("name", "")
    try:
        budget = Budget(_int(bud, "magnitude", "budget", 10**6), _int(bud, "steps", "budget", 10**4))
        phi = FunctionalMap(domain, _rule(doc["map"], domain), budget, name)
        alphabet = Alphabet(_int(doc, "alphabet_size", "<root>", 2))
    except ConfigError:
        raise
    except ValueError as exc:
        raise ConfigError(str(exc)) from exc
    b = None
    if "fort" in doc:
        _take(doc["fort"], "fort", {"b"})
        if "b" not in doc["fort"]:
            raise ConfigError("fort.b: required")
        b = doc["fort"]["b"]
        if b not in phi.domain:
            raise ConfigError(f"fort.b: {b!r} is not in the index set")
    window = None
    if "window" in doc:
        _take(doc["window"], "window", {"coords"})
        coords = doc["window"].get("coords")
        if not isinstance(coords, list) or not coords:
            raise ConfigError("window.coords: expected a nonempty list")
        window = tuple(coords)
    sequence = _sequence(doc["sequence"]) if "sequence" in doc else None
    instance, fill = (_instance(doc["instance"], alphabet) if "instance" in doc else (None, 0))
    try:
        return SystemConfig(kind, phi, alphabet.size, b, window, instance, fill, sequence, name)
    except ValueError as exc:
        raise ConfigError(str(exc)) from exc


def load_config(text: str, source: str = "<string>") -> SystemConfig:
    try:
        doc = tomllib.loads(text)
    except tomllib.TOMLDecodeError as exc:
        raise ConfigError(f"{source}: {exc}") from exc
    try:
        return config_from_dict(doc)
    except ConfigError as exc:
        raise ConfigError(f"{source}: {exc}") from exc


def load_path(path: str | Path) -> SystemConfig:
    p = Path(path)
    try:
        text = p.read_text(encoding="utf-8")
    except OSError as exc:
        raise ConfigError(f"{path}: {exc.strerror}") from exc
    return load_config(text, str(p))


# ---------------------------------------------------------------------------
# serialization


def _subrule_dict(sub) -> dict:
    if isinstance(sub, SquarePlus):
        return {"rule": "square_plus", "c": sub.c}
    if sub.a == 0:
        return {"rule": "constant", "value": sub.b}
    return {"rule": "affine", "a": sub.a, "b": sub.b}


def _guard_dict(g) -> dict:
    if isinstance(g, Residue):
        return {"guard": "residue", "residue": g.residue, "modulus": g.modulus}
    out = {"guard": "interval"}
    if g.lo is not None:
        out["lo"] = g.lo
    if g.hi is not None:
        out["hi"] = g.hi
    return out


def config_to_dict(cfg: SystemConfig) -> dict:
    m = cfg.map
    doc: dict = {"kind": cfg.kind}
    if cfg.name:
        doc["name"] = cfg.name
    if not cfg.is_fort:
        doc["alphabet_size"] = cfg.alphabet_size
    doc["index_set"] = {"kind": "finite", "atoms": list(m.atoms)} if m.domain.is_finite else {"kind": "integers"}
    rule = m.rule
    if isinstance(rule, Table):
        doc["map"] = {"rule": "table", "table": [[x, y] for x, y in rule.pairs]}
    elif isinstance(rule, Piecewise):
        doc["map"] = {
            "rule": "piecewise",
            "branches": [{**_guard_dict(g), **_subrule_dict(s)} for g, s in rule.branches],
            "default": _subrule_dict(rule.default),
        }
    else:
        doc["map"] = _subrule_dict(rule)
    doc["budget"] = {"magnitude": m.budget.magnitude, "steps": m.budget.steps}
    if cfg.is_fort:
        doc["fort"] = {"b": cfg.b}
    if cfg.window is not None:
        doc["window"] = {"coords": list(cfg.window)}
    if cfg.sequence is not None:
        s = cfg.sequence
        seq = {"kind": s.kind, "prefix": s.prefix_budget}
        if s.kind == "arithmetic":
            seq.update(start=s.start, step=s.step)
        elif s.kind == "explicit":
            seq = {"kind": "explicit", "terms": list(s.terms)}
        doc["sequence"] = seq
    if cfg.instance is not None:
        inst = cfg.instance
        doc["instance"] = {
            "target": inst.target.sorted(),
            "fill": cfg.fill,
            "segments": [
                {"default": seg.default, "overrides": [list(o) for o in seg.overrides], "window": list(w)}
                for seg, w in zip(inst.segments, inst.windows)
            ],
        }
    return doc


def dump_config(cfg: SystemConfig) -> str:
    return tomli_w.dumps(config_to_dict(cfg))
