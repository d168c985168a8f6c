"""
Partition Model - partitions of the state set and their refinements
"""

from itertools import product
from typing import Iterable, Iterator, List, Optional, Sequence, Tuple


class Partition:
    """Partition of an ordered state set into disjoint nonempty blocks"""

    def __init__(self, blocks: Iterable[Iterable[str]], states: Optional[Sequence[str]] = None):
        raw = [list(block) for block in blocks]

        seen = set()
        for block in raw:
            if not block:
                raise ValueError('partition blocks must be nonempty')
            for state in block:
                if state in seen:
                    raise ValueError(f'state {state!r} appears in more than one block')
                seen.add(state)

        if states is None:
            states = [state for block in raw for state in block]
        elif seen != set(states):
            missing = [s for s in states if s not in seen]
            extra = sorted(seen - set(states))
            raise ValueError(f'partition does not cover the state set (missing {missing}, unknown {extra})')

        self.states = tuple(states)
        rank = {state: k for k, state in enumerate(self.states)}

        # Blocks in state order, ordered by their first state
        normalized = [tuple(sorted(block, key=rank.__getitem__)) for block in raw]
        normalized.sort(key=lambda block: rank[block[0]])
        self.blocks: Tuple[Tuple[str, ...], ...] = tuple(normalized)

        self._block_index = {state: k for k, block in enumerate(self.blocks) for state in block}

    @classmethod
    def singletons(cls, states: Sequence[str]) -> 'Partition':
        return cls([[state] for state in states], states)

    def block_of(self, state: str) -> Tuple[str, ...]:
        return self.blocks[self.index_of(state)]

    def index_of(self, state: str) -> int:
        try:
            return self._block_index[state]
        except KeyError:
            raise KeyError(f'unknown state {state!r}')

    def same_block(self, first: str, second: str) -> bool:
        return self.index_of(first) == self.index_of(second)

    def refines(self, other: 'Partition') -> bool:
        """True if every block of self lies inside a block of other"""
        return all(
            len({other.index_of(state) for state in block}) == 1
            for block in self.blocks
        )

    def is_singletons(self) -> bool:
        return all(len(block) == 1 for block in self.blocks)

    def __len__(self):
        return len(self.blocks)

    def __iter__(self):
        return iter(self.blocks)

    def __eq__(self, other):
        if not isinstance(other, Partition):
            return NotImplemented
        return set(self.blocks) == set(other.blocks)

    def __hash__(self):
        return hash(frozenset(self.blocks))

    def __repr__(self):
        body = ', '.join('{' + ', '.join(block) + '}' for block in self.blocks)
        return f'Partition({body})'

    def _serialize(self) -> List[List[str]]:
        return [list(block) for block in self.blocks]


def set_partitions(items: Sequence[str], count: int) -> Iterator[List[List[str]]]:
    """Partitions of items into exactly `count` blocks, deterministic order"""
    if count == 0:
        if not items:
            yield []
        return
    if len(items) < count:
        return

    first, rest = items[0], items[1:]

    # first in its own block
    for smaller in set_partitions(rest, count - 1):
        yield [[first]] + smaller

    # first joins one of the blocks
    for smaller in set_partitions(rest, count):
        for n, subset in enumerate(smaller):
            yield smaller[:n] + [[first] + subset] + smaller[n + 1:]


def _block_counts(sizes: Sequence[int], total: int) -> Iterator[Tuple[int, ...]]:
    """Per-block counts in [1, size] summing to total"""
    if not sizes:
        if total == 0:
            yield ()
        return
    head, tail = sizes[0], sizes[1:]
    for k in range(1, head + 1):
        remaining = total - k
        if len(tail) <= remaining <= sum(tail):
            for rest in _block_counts(tail, remaining):
                yield (k,) + rest


def enumerate_refinements(coarse: Partition) -> Iterator[Partition]:
    """Every partition finer than `coarse`, fewest blocks first"""
    sizes = [len(block) for block in coarse.blocks]

    for total in range(len(coarse.blocks), len(coarse.states) + 1):
        for counts in _block_counts(sizes, total):
            pieces = [
                list(set_partitions(list(block), k))
                for block, k in zip(coarse.blocks, counts)
            ]
            for choice in product(*pieces):
                blocks = [block for piece in choice for block in piece]
                yield Partition(blocks, coarse.states)
