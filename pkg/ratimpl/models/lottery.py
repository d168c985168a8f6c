"""
Lottery Model - exact rational probability vectors over outcomes
"""

import re
from fractions import Fraction
from typing import Any, Dict, Hashable, Iterable, Mapping, Optional, Sequence, Tuple

from ratimpl.errors import LotteryError

_RATIONAL = re.compile(r'^\s*([+-]?\d+)\s*(?:/\s*(\d+)\s*)?$')


def parse_rational(value: Any) -> Fraction:
    """Parse an integer or a "p/q" string into a Fraction"""
    if isinstance(value, bool):
        raise ValueError('invalid rational')
    if isinstance(value, Fraction):
        return value
    if isinstance(value, int):
        return Fraction(value)
    if isinstance(value, str):
        match = _RATIONAL.match(value)
        if match:
            numerator, denominator = match.group(1), match.group(2)
            if denominator is not None and int(denominator) == 0:
                raise ValueError('invalid rational')
            return Fraction(int(numerator), int(denominator or 1))
    raise ValueError('invalid rational')


def format_rational(value: Fraction) -> str:
    """Format as "p/q", or "p" for integers"""
    value = Fraction(value)
    if value.denominator == 1:
        return str(value.numerator)
    return f'{value.numerator}/{value.denominator}'


class Lottery:
    """Probability distribution over a finite set of labels"""

    __slots__ = ('_probs', '_key')

    def __init__(self, probs: Mapping[Hashable, Any]):
        cleaned: Dict[Hashable, Fraction] = {}
        total = Fraction(0)

        for label, raw in probs.items():
            try:
                p = parse_rational(raw)
            except ValueError:
                raise LotteryError(f'invalid probability for {label!r}: {raw!r}')
            if p < 0:
                raise LotteryError(f'negative probability for {label!r}: {format_rational(p)}')
            total += p
            if p:
                cleaned[label] = cleaned.get(label, Fraction(0)) + p

        if total != 1:
            raise LotteryError(f'probabilities sum to {format_rational(total)}, expected 1')

        self._probs = cleaned
        self._key = frozenset(cleaned.items())

    @classmethod
    def degenerate(cls, label: Hashable) -> 'Lottery':
        """Lottery putting probability one on a single label"""
        return cls({label: Fraction(1)})

    @classmethod
    def mixture(cls, weighted: Iterable[Tuple[Any, 'Lottery']]) -> 'Lottery':
        """Convex combination sum_k w_k * y_k"""
        probs: Dict[Hashable, Fraction] = {}
        for weight, lottery in weighted:
            weight = parse_rational(weight)
            if not weight:
                continue
            for label, p in lottery.items():
                probs[label] = probs.get(label, Fraction(0)) + weight * p
        return cls(probs)

    @classmethod
    def uniform(cls, lotteries: Sequence['Lottery']) -> 'Lottery':
        """Uniform average of the given lotteries"""
        if not lotteries:
            raise LotteryError('cannot average an empty list of lotteries')
        weight = Fraction(1, len(lotteries))
        return cls.mixture((weight, lottery) for lottery in lotteries)

    def prob(self, label: Hashable) -> Fraction:
        return self._probs.get(label, Fraction(0))

    def items(self):
        return self._probs.items()

    @property
    def support(self) -> Tuple[Hashable, ...]:
        return tuple(self._probs)

    @property
    def degenerate_label(self) -> Optional[Hashable]:
        """The label carrying all the mass, if any"""
        if len(self._probs) == 1:
            return next(iter(self._probs))
        return None

    def is_degenerate_on(self, label: Hashable) -> bool:
        return self._probs.get(label) == 1

    def expectation(self, values: Mapping[Hashable, Fraction]) -> Fraction:
        """Exact expectation of a label -> value map"""
        return sum((p * values[label] for label, p in self._probs.items()), Fraction(0))

    def ordered(self, order: Sequence[Hashable]) -> Tuple[Tuple[Hashable, Fraction], ...]:
        """Support entries sorted by a reference order"""
        rank = {label: k for k, label in enumerate(order)}
        return tuple(sorted(self._probs.items(), key=lambda item: rank.get(item[0], len(rank))))

    def _serialize(self, order: Optional[Sequence[Hashable]] = None) -> dict:
        entries = self.ordered(order) if order is not None else tuple(self._probs.items())
        return {str(label): format_rational(p) for label, p in entries}

    def __eq__(self, other):
        if not isinstance(other, Lottery):
            return NotImplemented
        return self._key == other._key

    def __hash__(self):
        return hash(self._key)

    def __repr__(self):
        body = ', '.join(f'{label}: {format_rational(p)}' for label, p in self._probs.items())
        return f'Lottery({{{body}}})'
