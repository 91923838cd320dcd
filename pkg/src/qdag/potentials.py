"""Dense potentials over ordered variable scopes.

A potential maps instantiations of its scope, enumerated row-major with
the first scope variable most significant, to cells.  Cells are plain
numbers for the numeric inference path and node ids for the symbolic
compilation path; both paths share the combination machinery below so
they perform the same operations in the same order.

``combine`` is called once per output cell and only with two or more
inputs; single-operand combinations pass the cell through untouched.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Callable, Sequence


@dataclass
class Potential:
    scope: tuple[str, ...]
    cards: tuple[int, ...]
    table: list

    def __post_init__(self):
        size = 1
        for c in self.cards:
            size *= c
        assert len(self.table) == size, "table length must match scope cardinalities"

    def strides(self) -> list[int]:
        out = [1] * len(self.cards)
        for i in range(len(self.cards) - 2, -1, -1):
            out[i] = out[i + 1] * self.cards[i + 1]
        return out

    def cell(self, assignment: dict[str, int]):
        idx = 0
        for v, s in zip(self.scope, self.strides()):
            idx += assignment[v] * s
        return self.table[idx]


def multiply_potentials(pots: Sequence[Potential], combine: Callable) -> Potential:
    """Pointwise product; scope is the union in first-appearance order."""
    if not pots:
        raise ValueError("nothing to multiply")
    if len(pots) == 1:
        return pots[0]
    scope: list[str] = []
    cards: list[int] = []
    for p in pots:
        for v, c in zip(p.scope, p.cards):
            if v not in scope:
                scope.append(v)
                cards.append(c)
    # per input: stride in the output digit space (0 where absent)
    maps = []
    for p in pots:
        st = dict(zip(p.scope, p.strides()))
        maps.append([st.get(v, 0) for v in scope])

    digits = [0] * len(scope)
    table = []
    size = 1
    for c in cards:
        size *= c
    for _ in range(size):
        cells = []
        for p, m in zip(pots, maps):
            idx = 0
            for d, s in zip(digits, m):
                idx += d * s
            cells.append(p.table[idx])
        table.append(combine(cells))
        for pos in range(len(scope) - 1, -1, -1):
            digits[pos] += 1
            if digits[pos] < cards[pos]:
                break
            digits[pos] = 0
    return Potential(tuple(scope), tuple(cards), table)


def marginalize_potential(pot: Potential, keep: set[str], combine: Callable) -> Potential:
    """Sum out every scope variable not in ``keep``; kept variables stay
    in their original order.  Summing nothing out returns ``pot``."""
    if not set(keep) <= set(pot.scope):
        raise ValueError(f"keep set {sorted(keep)!r} not within scope {pot.scope!r}")
    kept = [i for i, v in enumerate(pot.scope) if v in keep]
    if len(kept) == len(pot.scope):
        return pot
    dropped = [i for i in range(len(pot.scope)) if i not in kept]
    strides = pot.strides()

    out_scope = tuple(pot.scope[i] for i in kept)
    out_cards = tuple(pot.cards[i] for i in kept)
    group = 1
    for i in dropped:
        group *= pot.cards[i]

    # enumerate offsets of the summed-out block once, row-major
    offsets = _mixed_radix_offsets(dropped, pot.cards, strides)

    table = []
    digits = [0] * len(kept)
    size = 1
    for c in out_cards:
        size *= c
    for _ in range(size):
        base = 0
        for d, i in zip(digits, kept):
            base += d * strides[i]
        cells = [pot.table[base + o] for o in offsets]
        table.append(cells[0] if group == 1 else combine(cells))
        for pos in range(len(kept) - 1, -1, -1):
            digits[pos] += 1
            if digits[pos] < out_cards[pos]:
                break
            digits[pos] = 0
    return Potential(out_scope, out_cards, table)


def _mixed_radix_offsets(positions: list[int], cards: tuple[int, ...],
                         strides: list[int]) -> list[int]:
    """Flat offsets of all instantiations of the given scope positions,
    row-major in position order."""
    offsets = [0]
    for i in positions:
        offsets = [o + d * strides[i] for o in offsets for d in range(cards[i])]
    return offsets
