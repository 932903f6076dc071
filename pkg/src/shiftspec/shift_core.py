"""Finitely described points of X^Gamma and window evaluation of the shift."""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable, Mapping

from shiftspec.errors import DomainError
from shiftspec.index_maps import FunctionalMap, Index, iterate, sort_key


@dataclass(frozen=True)
class Alphabet:
    size: int

    def __post_init__(self):
        if not isinstance(self.size, int) or self.size < 2:
            raise ValueError("an alphabet needs at least two symbols")

    def __contains__(self, sym: object) -> bool:
        return isinstance(sym, int) and not isinstance(sym, bool) and 0 <= sym < self.size

    @property
    def symbols(self) -> range:
        return range(self.size)


@dataclass(frozen=True)
class Configuration:
    """A default symbol plus a finite table of exceptions.

    ``overrides`` is kept canonical: sorted pairs, none equal to the default.
    """

    alphabet: Alphabet
    default: int
    overrides: tuple = ()

    def __post_init__(self):
        if self.default not in self.alphabet:
            raise ValueError(f"default {self.default!r} is not a symbol")
        pairs = dict(self.overrides)
        for idx, sym in pairs.items():
            if sym not in self.alphabet:
                raise ValueError(f"override {idx!r} -> {sym!r} is not a symbol")
        canon = tuple(sorted(((k, v) for k, v in pairs.items() if v != self.default), key=lambda kv: sort_key(kv[0])))
        object.__setattr__(self, "overrides", canon)
        object.__setattr__(self, "_table", dict(canon))

    @classmethod
    def make(cls, alphabet: Alphabet | int, default: int = 0, overrides: Mapping | Iterable = ()) -> "Configuration":
        if isinstance(alphabet, int):
            alphabet = Alphabet(alphabet)
        items = overrides.items() if isinstance(overrides, Mapping) else overrides
        return cls(alphabet, default, tuple(items))

    @classmethod
    def constant(cls, alphabet: Alphabet | int, symbol: int) -> "Configuration":
        return cls.make(alphabet, symbol)

    @property
    def table(self) -> dict:
        return dict(self._table)

    def value_at(self, idx: Index) -> int:
        return self._table.get(idx, self.default)

    def with_overrides(self, extra: Mapping) -> "Configuration":
        merged = dict(self._table)
        merged.update(extra)
        return Configuration(self.alphabet, self.default, tuple(merged.items()))


@dataclass(frozen=True)
class Window:
    coords: frozenset

    def __post_init__(self):
        object.__setattr__(self, "coords", frozenset(self.coords))
        if not self.coords:
            raise ValueError("a window needs at least one coordinate")

    @classmethod
    def of(cls, coords: Iterable[Index]) -> "Window":
        return cls(frozenset(coords))

    def sorted(self) -> list:
        return sorted(self.coords, key=sort_key)

    def check_in(self, m: FunctionalMap) -> None:
        for c in self.coords:
            if c not in m.domain:
                raise DomainError(f"window coordinate {c!r} is outside the domain")

    def __iter__(self):
        return iter(self.sorted())

    def __len__(self) -> int:
        return len(self.coords)


def value_at(cfg: Configuration, idx: Index) -> int:
    return cfg.value_at(idx)


def eval_orbit(m: FunctionalMap, cfg: Configuration, H: Window, t: int) -> dict:
    """Restriction of ``sigma_phi^t(cfg)`` to ``H`` computed by pullback."""
    H.check_in(m)
    return {a: cfg.value_at(iterate(m, a, t)) for a in H}


def entourage_check(a: Configuration, b: Configuration, H: Window) -> bool:
    if a.alphabet != b.alphabet:
        raise ValueError("configurations over different alphabets")
    return all(a.value_at(c) == b.value_at(c) for c in H.coords)
