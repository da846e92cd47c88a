"""The coset space pZ_p / p^k with the fractional-linear action of G.

Points are stored as x in Z/p^(k-1), standing for z = p*x. Reports show z.
"""
import logging
from dataclasses import dataclass
from typing import List, Optional

import numpy as np

from src.groups.gsets import GSet
from src.groups.level import GroupElement, LevelContext
from src.groups.matrices import multiply_rows
from src.groups.subgroups import ambient_group
from src.linalg.fp import Matrix, permutation_matrix
from src.utils.exceptions import DomainError, StructuralError

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class CosetSpace:
    ctx: LevelContext
    k: int

    def __post_init__(self) -> None:
        object.__setattr__(self, 'ctx', self.ctx.single())
        self.ctx.check_level(self.k)

    @property
    def p(self) -> int:
        return self.ctx.p

    @property
    def size(self) -> int:
        return self.ctx.p ** (self.k - 1)

    @property
    def modulus(self) -> int:
        return self.ctx.p ** self.k

    def points(self) -> np.ndarray:
        return np.arange(self.size, dtype=np.int64)

    def z_values(self) -> np.ndarray:
        return self.ctx.p * self.points()

    def index(self, z: int) -> int:
        z %= self.modulus
        if z % self.ctx.p:
            raise DomainError(f'z={z} does not lie in pZ_p')
        return z // self.ctx.p


def phi(g: GroupElement, k: int) -> int:
    """c/a mod p^k, the point of pZ_p/p^k attached to the coset of g.

    Returns the residue z, the same coordinate flt_action takes and returns.
    CosetSpace.index(z) gives the stored point index z // p.
    """
    if not g.in_principal(1):
        raise DomainError(f'{g} does not lie in G(p)')
    g.ctx.check_level(k)
    modulus = g.ctx.p ** k
    return g.c * pow(g.a, -1, modulus) % modulus


def flt_action(g: GroupElement, z: int, k: int) -> int:
    """z -> (dz + c) / (bz + a) modulo p^k."""
    g.ctx.check_level(k)
    modulus = g.ctx.p ** k
    denominator = (g.b * z + g.a) % modulus
    if denominator % g.ctx.p == 0:
        raise DomainError(f'{g} has a non-unit denominator at z={z}')
    return (g.d * z + g.c) * pow(denominator, -1, modulus) % modulus


def _unit_inverse_mod(values: np.ndarray, p: int, modulus: int) -> np.ndarray:
    # Euler: u^(phi(p^k) - 1) is the inverse of a unit u.
    exponent = modulus // p * (p - 1) - 1
    result = np.ones_like(values)
    base = values % modulus
    while exponent:
        if exponent & 1:
            result = result * base % modulus
        base = base * base % modulus
        exponent >>= 1
    return result


def flt_images(g_rows: np.ndarray, space: CosetSpace, points: Optional[np.ndarray] = None) -> np.ndarray:
    """Point indices of g . z for every row g and point z = p*x."""
    g_rows = np.atleast_2d(np.asarray(g_rows, dtype=np.int64))[:, :4] % space.modulus
    xs = space.points() if points is None else np.asarray(points, dtype=np.int64)
    z = (space.p * xs)[None, :]
    a, b, c, d = (g_rows[:, i:i + 1] for i in range(4))

    denominator = (b * z + a) % space.modulus
    if np.any(denominator % space.p == 0):
        raise DomainError('Fractional-linear action with a non-unit denominator')
    values = (d * z + c) % space.modulus * _unit_inverse_mod(denominator, space.p, space.modulus) % space.modulus
    if np.any(values % space.p):
        raise DomainError('Element does not preserve pZ_p; it lies outside G(p)')
    return values // space.p


def point_permutation(g: GroupElement, space: CosetSpace) -> np.ndarray:
    perm = flt_images(g.as_row(), space)[0]
    if np.unique(perm).size != space.size:
        raise StructuralError(f'{g} does not permute the points of level {space.k}')
    return perm


def action_matrix(g: GroupElement, space: CosetSpace) -> Matrix:
    """Matrix of (g.f)(z) = f(g^-1 z) on functions, i.e. P with P[g(x), x] = 1."""
    return permutation_matrix(point_permutation(g, space))


def generator_actions(space: CosetSpace) -> List[Matrix]:
    group = ambient_group(space.ctx)
    return [action_matrix(g, space) for g in group.generator_elements()]


def nbar(ctx: LevelContext) -> GroupElement:
    """The lower unipotent (1, 0; -p, 1), acting by z -> z - p."""
    ctx = ctx.single()
    return ctx.lower(-ctx.p)


class FractionalLinearGSet(GSet):
    """pZ_p/p^k as a G-set; its point stabilizer at z = 0 is HT(p^k)."""

    def __init__(self, space: CosetSpace) -> None:
        self.space = space
        self.ctx = space.ctx
        self.label = f'pZp/p^{space.k}'

    @property
    def size(self) -> int:
        return self.space.size

    def images(self, g_rows: np.ndarray, points: Optional[np.ndarray] = None) -> np.ndarray:
        return flt_images(g_rows, self.space, points)


@dataclass(frozen=True)
class ConventionReport:
    """Which composition rule phi satisfies on the sampled pairs."""

    convention: str
    left_holds: bool
    right_holds: bool
    samples: int
    seed: int


def intertwining_convention(ctx: LevelContext, k: Optional[int] = None, samples: int = 100, seed: int = 0) -> ConventionReport:
    """Measure whether phi(gh) = g.phi(h) (left) or phi(gh) = h.phi(g) (right).

    Raises when neither rule survives the sample, because every coset-module
    computation assumes one of them.
    """
    ctx = ctx.single()
    k = ctx.N if k is None else ctx.check_level(k)
    rng = np.random.default_rng(seed)
    group = ambient_group(ctx)
    firsts = group.random_rows(samples, rng)
    seconds = group.random_rows(samples, rng)
    products = multiply_rows(firsts, seconds, ctx.modulus)

    left_holds = True
    right_holds = True
    for g_row, h_row, gh_row in zip(firsts, seconds, products):
        g = GroupElement.from_row(g_row, ctx)
        h = GroupElement.from_row(h_row, ctx)
        gh = GroupElement.from_row(gh_row, ctx)
        value = phi(gh, k)
        left_holds &= value == flt_action(g, phi(h, k), k)
        right_holds &= value == flt_action(h, phi(g, k), k)

    if left_holds:
        convention = 'left'
    elif right_holds:
        convention = 'right'
    else:
        raise StructuralError('phi intertwines neither composition order of the fractional-linear action')

    logger.info('Intertwining convention at p=%s, N=%s, k=%s: %s', ctx.p, ctx.N, k, convention)
    return ConventionReport(convention, bool(left_holds), bool(right_holds), samples, seed)


def stabilizer_of_zero(space: CosetSpace) -> np.ndarray:
    """Rows of G(p) fixing z = 0, from the enumerated group."""
    table = ambient_group(space.ctx).table
    return table.rows[flt_images(table.rows, space, np.array([0]))[:, 0] == 0]
