"""Pure-Python reference versions of the hot loops.

Signatures and results match :mod:`shiftspec._ckernels` exactly; the
compiled module is preferred at import time when it is available.
"""

from __future__ import annotations

from itertools import product
from typing import Sequence


def first_tracer(n_positions: int, n_symbols: int, positions: Sequence[int], values: Sequence[int]) -> int:
    """Index (in lexicographic order) of the first word in
    ``range(n_symbols) ** n_positions`` with ``word[positions[k]] == values[k]``
    for every ``k``; ``-1`` if none exists.

    Position 0 is the most significant letter. Every word is generated and
    tested; there is no constraint propagation.
    """
    constraints = list(zip(positions, values))
    for code, word in enumerate(product(range(n_symbols), repeat=n_positions)):
        if all(word[p] == v for p, v in constraints):
            return code
    return -1


def functional_graph(images: Sequence[int]) -> tuple[list[int], list[int], list[int]]:
    """Tail length, cycle length and cycle label for every node of a finite
    functional graph given as ``images[i] = phi(i)``.

    The cycle label is the smallest node on the cycle a node falls into, so
    two nodes share a label exactly when their forward orbits meet.
    """
    n = len(images)
    tail = [-1] * n
    period = [0] * n
    label = [-1] * n
    for start in range(n):
        if tail[start] >= 0:
            continue
        path = []
        where: dict[int, int] = {}
        x = start
        while tail[x] < 0 and x not in where:
            where[x] = len(path)
            path.append(x)
            x = images[x]
        if tail[x] < 0:
            cycle = path[where[x]:]
            lab = min(cycle)
            for node in cycle:
                tail[node] = 0
                period[node] = len(cycle)
                label[node] = lab
            path = path[:where[x]]
        for node in reversed(path):
            nxt = images[node]
            tail[node] = tail[nxt] + 1
            period[node] = period[nxt]
            label[node] = label[nxt]
    return tail, period, label


def refine_residue(values: Sequence[int], modulus: int) -> tuple[int, list[int]]:
    """Keep one residue class of ``values`` modulo ``modulus``.

    The chosen class is that of the earliest element whose class holds at
    least ``ceil(len(values) / modulus)`` elements (such a class exists by
    pigeonhole). Returns ``(residue, kept)``.
    """
    if not values:
        raise ValueError("cannot refine an empty sequence")
    counts = [0] * modulus
    for v in values:
        counts[v % modulus] += 1
    need = -(-len(values) // modulus)
    for v in values:
        r = v % modulus
        if counts[r] >= need:
            return r, [w for w in values if w % modulus == r]
    raise AssertionError("pigeonhole violated")
