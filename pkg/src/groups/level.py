import logging
from dataclasses import dataclass
from typing import Tuple

import numpy as np

from src.linalg.fp import ensure_prime
from src.utils.exceptions import DomainError, LevelContextError, ParameterError

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class LevelContext:
    """A prime p, a truncation depth N and the number of copies t of SL2(Z/p^N)."""

    p: int
    N: int
    copies: int = 1

    def __post_init__(self) -> None:
        ensure_prime(self.p)
        if self.N < 1:
            raise ParameterError(f'Truncation depth must be at least 1, got N={self.N}')
        if self.copies < 1:
            raise ParameterError(f'Need at least one copy of the group, got t={self.copies}')

    @property
    def modulus(self) -> int:
        return self.p ** self.N

    @property
    def width(self) -> int:
        """Number of integer entries in one element of the t-fold product."""
        return 4 * self.copies

    def check_level(self, k: int, name: str = 'k') -> int:
        if not 1 <= k <= self.N:
            raise ParameterError(f'{name}={k} must satisfy 1 <= {name} <= N={self.N}')
        return k

    def with_depth(self, N: int) -> 'LevelContext':
        return LevelContext(self.p, N, self.copies)

    def single(self) -> 'LevelContext':
        return LevelContext(self.p, self.N, 1)

    def identity(self) -> 'GroupElement':
        return GroupElement(1, 0, 0, 1, self.single())

    def element(self, a: int, b: int, c: int, d: int) -> 'GroupElement':
        return GroupElement(a, b, c, d, self.single())

    def unit_inverse(self, u: int) -> int:
        if u % self.p == 0:
            raise DomainError(f'{u} is not a unit modulo {self.p}')
        return pow(int(u), -1, self.modulus)

    def upper(self, v: int) -> 'GroupElement':
        return self.element(1, v, 0, 1)

    def lower(self, v: int) -> 'GroupElement':
        return self.element(1, 0, v, 1)

    def diag(self, u: int) -> 'GroupElement':
        return self.element(u, 0, 0, self.unit_inverse(u))


@dataclass(frozen=True)
class GroupElement:
    """A determinant-one 2x2 matrix (a, b; c, d) over Z/p^N."""

    a: int
    b: int
    c: int
    d: int
    ctx: LevelContext

    def __post_init__(self) -> None:
        q = self.ctx.modulus
        for name in ('a', 'b', 'c', 'd'):
            object.__setattr__(self, name, int(getattr(self, name)) % q)
        if (self.a * self.d - self.b * self.c) % q != 1:
            raise DomainError(f'Matrix {self.entries} has determinant != 1 modulo {q}')

    @property
    def entries(self) -> Tuple[int, int, int, int]:
        return (self.a, self.b, self.c, self.d)

    def as_row(self) -> np.ndarray:
        return np.array(self.entries, dtype=np.int64)

    @classmethod
    def from_row(cls, row: np.ndarray, ctx: LevelContext) -> 'GroupElement':
        a, b, c, d = (int(value) for value in row[:4])
        return cls(a, b, c, d, ctx.single())

    def in_principal(self, k: int) -> bool:
        """Membership in G(p^k): congruent to the identity modulo p^k."""
        m = self.ctx.p ** k
        return self.a % m == 1 % m and self.d % m == 1 % m and self.b % m == 0 and self.c % m == 0

    def __matmul__(self, other: 'GroupElement') -> 'GroupElement':
        return multiply(self, other)

    def __str__(self) -> str:
        return f'({self.a},{self.b};{self.c},{self.d}) mod {self.ctx.p}^{self.ctx.N}'


def multiply(g: GroupElement, h: GroupElement) -> GroupElement:
    if g.ctx != h.ctx:
        raise LevelContextError(f'Cannot multiply elements of {g.ctx} and {h.ctx}')
    return GroupElement(
        g.a * h.a + g.b * h.c,
        g.a * h.b + g.b * h.d,
        g.c * h.a + g.d * h.c,
        g.c * h.b + g.d * h.d,
        g.ctx,
    )


def inverse(g: GroupElement) -> GroupElement:
    return GroupElement(g.d, -g.b, -g.c, g.a, g.ctx)


def conjugate(g: GroupElement, h: GroupElement) -> GroupElement:
    """Return g h g^-1."""
    return multiply(multiply(g, h), inverse(g))
