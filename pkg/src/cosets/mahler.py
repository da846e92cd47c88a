# Mahler functions x -> binom(x, t) mod p, evaluated digitwise by Lucas' theorem.
from functools import lru_cache
from math import comb
from typing import List

import numpy as np

from src.cosets.space import CosetSpace
from src.groups.level import LevelContext
from src.utils.exceptions import ParameterError


@lru_cache(maxsize=None)
def _digit_binomials(p: int) -> np.ndarray:
    """table[n, t] = binom(n, t) mod p for single base-p digits."""
    return np.array([[comb(n, t) % p for t in range(p)] for n in range(p)], dtype=np.int64)


def base_p_digits(value: int, p: int) -> List[int]:
    digits = []
    while value:
        value, digit = divmod(value, p)
        digits.append(digit)
    return digits


def lucas_binomial(n: int, t: int, p: int) -> int:
    """binom(n, t) mod p as the product of digitwise binomials."""
    if t < 0 or n < 0:
        return 0
    table = _digit_binomials(p)
    result = 1
    while n or t:
        n, n_digit = divmod(n, p)
        t, t_digit = divmod(t, p)
        result = result * int(table[n_digit, t_digit]) % p
        if not result:
            return 0
    return result


def binomial_column(xs: np.ndarray, t: int, p: int) -> np.ndarray:
    """Vectorised binom(x, t) mod p over an array of nonnegative integers."""
    table = _digit_binomials(p)
    xs = np.asarray(xs, dtype=np.int64).copy()
    values = np.ones_like(xs)
    remaining = t
    while remaining or np.any(xs):
        remaining, t_digit = divmod(remaining, p)
        xs, x_digits = np.divmod(xs, p)
        values = values * table[x_digits, t_digit] % p
    return values


def mahler(t: int, k: int, ctx: LevelContext) -> np.ndarray:
    """The function x -> binom(x, t) mod p on the points of level k."""
    space = CosetSpace(ctx, k)
    if not 0 <= t <= space.size - 1:
        raise ParameterError(f't={t} must satisfy 0 <= t <= p^(k-1)-1 = {space.size - 1}')
    return binomial_column(space.points(), t, ctx.p)


def mahler_matrix(count: int, space: CosetSpace) -> np.ndarray:
    """Rows B_0, ..., B_(count-1) on the points of ``space``."""
    if not 0 <= count <= space.size:
        raise ParameterError(f'Cannot take {count} Mahler functions on {space.size} points')
    points = space.points()
    rows = [binomial_column(points, t, space.p) for t in range(count)]
    if not rows:
        return np.zeros((0, space.size), dtype=np.int64)
    return np.vstack(rows)
