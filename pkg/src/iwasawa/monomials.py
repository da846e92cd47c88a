# Multi-index bookkeeping: the graded-lex order, successors and S_l counts.
import logging
from dataclasses import dataclass
from itertools import product
from typing import Dict, List, Optional, Sequence, Tuple

import numpy as np

from src.iwasawa.algebra import MonomialIndex, TruncatedAlgebra
from src.utils.exceptions import ParameterError

logger = logging.getLogger(__name__)


def graded_key(alpha: Sequence[int]) -> Tuple[int, Tuple[int, ...]]:
    """Sort key of the order: total degree first, then lexicographic."""
    return (sum(alpha), tuple(alpha))


def ordered_indices(algebra: TruncatedAlgebra) -> List[MonomialIndex]:
    return sorted(algebra.indices(), key=graded_key)


def successor_table(algebra: TruncatedAlgebra) -> Dict[MonomialIndex, Optional[MonomialIndex]]:
    """alpha -> alpha', the next index in the order; the largest maps to None."""
    ordered = ordered_indices(algebra)
    table: Dict[MonomialIndex, Optional[MonomialIndex]] = {}
    for current, following in zip(ordered, ordered[1:] + [None]):
        table[current] = following
    return table


def successor(alpha: Sequence[int], algebra: TruncatedAlgebra) -> Optional[MonomialIndex]:
    table = successor_table(algebra)
    key = tuple(alpha)
    if key not in table:
        raise ParameterError(f'{key} is not a basis index of {algebra}')
    return table[key]


def at_least(beta: Sequence[int], alpha: Sequence[int]) -> bool:
    """beta is at or above alpha in the graded-lex order."""
    return graded_key(beta) >= graded_key(alpha)


def graded_commutativity_check(alpha: Sequence[int], beta: Sequence[int], algebra: TruncatedAlgebra) -> bool:
    """z^alpha z^beta - z^(alpha+beta) only involves monomials of degree > |alpha| + |beta|."""
    product_vector = algebra.apply_monomial(alpha, algebra.monomial(beta))
    combined = [a + b for a, b in zip(alpha, beta)]
    difference = (product_vector - algebra.apply_monomial(combined, algebra.one())) % algebra.p
    coordinates = algebra.coordinates(difference)
    threshold = sum(alpha) + sum(beta)
    for position, index in enumerate(algebra.indices()):
        if coordinates[position] and sum(index) <= threshold:
            return False
    return True


def random_index_pairs(
    algebra: TruncatedAlgebra,
    count: int,
    seed: int,
) -> List[Tuple[MonomialIndex, MonomialIndex]]:
    rng = np.random.default_rng(seed)
    draws = rng.integers(0, algebra.exponent_bound, size=(count, 2, algebra.rank))
    return [(tuple(int(v) for v in pair[0]), tuple(int(v) for v in pair[1])) for pair in draws]


@dataclass(frozen=True)
class NonmajorizingCount:
    alpha: Tuple[int, ...]
    l: int
    p: int
    count: int
    bound: int

    @property
    def holds(self) -> bool:
        return self.count <= self.bound

    def __bool__(self) -> bool:
        return self.holds


def count_nonmajorizing(alpha: Sequence[int], l: int, p: int) -> NonmajorizingCount:
    """|{beta in S_l : not beta >= alpha}| with S_l = [0, p^l)^n, and its bound (sum alpha) p^((n-1)l)."""
    if l < 0 or any(value < 0 for value in alpha):
        raise ParameterError('count_nonmajorizing needs l >= 0 and a nonnegative index')
    side = p ** l
    n = len(alpha)
    majorizing = 1
    for value in alpha:
        majorizing *= max(side - value, 0)
    count = side ** n - majorizing
    bound = sum(alpha) * side ** (n - 1)
    return NonmajorizingCount(tuple(alpha), l, p, count, bound)


def count_nonmajorizing_brute(alpha: Sequence[int], l: int, p: int) -> int:
    side = p ** l
    return sum(
        1
        for beta in product(range(side), repeat=len(alpha))
        if not all(b >= a for a, b in zip(alpha, beta))
    )


def count_not_below(alpha: Sequence[int], l: int, p: int) -> int:
    """The other reading: |{beta in S_l : not beta <= alpha}|."""
    side = p ** l
    below = 1
    for value in alpha:
        below *= min(value + 1, side)
    return side ** len(alpha) - below
