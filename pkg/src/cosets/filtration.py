import logging
from dataclasses import dataclass, field
from math import comb
from typing import Any, Dict, List, Optional

import numpy as np

from src.cosets.mahler import mahler, mahler_matrix
from src.cosets.space import CosetSpace, action_matrix, generator_actions, nbar
from src.groups.level import GroupElement, LevelContext
from src.groups.subgroups import ambient_group
from src.linalg.fp import FpSubspace, Matrix, ensure_dimension, matrix_power, null_space, rank
from src.utils.exceptions import ParameterError, StructuralError

logger = logging.getLogger(__name__)


def filtration_F(i: int, k: int, ctx: LevelContext) -> FpSubspace:
    """F(i): span of the first i Mahler functions on pZ_p/p^k."""
    space = CosetSpace(ctx, k)
    if not 0 <= i <= space.size:
        raise ParameterError(f'i={i} must satisfy 0 <= i <= p^(k-1) = {space.size}')
    return FpSubspace(mahler_matrix(i, space), ctx.p, space.size)


def is_G_invariant(subspace: FpSubspace, space: CosetSpace) -> bool:
    return all(subspace.is_invariant(action) for action in generator_actions(space))


def shift_recurrence_check(t: int, k: int, ctx: LevelContext) -> bool:
    """Does Nbar act on the Mahler basis by B_t -> B_t + B_(t-1)?"""
    space = CosetSpace(ctx, k)
    if not 0 <= t <= space.size - 1:
        raise ParameterError(f't={t} must satisfy 0 <= t <= p^(k-1)-1')
    shifted = action_matrix(nbar(ctx), space) @ mahler(t, k, ctx) % ctx.p
    expected = mahler(t, k, ctx)
    if t:
        expected = (expected + mahler(t - 1, k, ctx)) % ctx.p
    return bool(np.array_equal(shifted, expected))


def invariant_subspace_census(k: int, ctx: LevelContext) -> List[FpSubspace]:
    """All G-invariant subspaces of F_p[pZ_p/p^k], smallest first.

    Nbar - 1 is nilpotent with a single Jordan block, so the Nbar-invariant
    subspaces are exactly the kernels of its powers; the G-invariant ones are
    those among them fixed by every generator of G.
    """
    space = CosetSpace(ctx, k)
    n = space.size
    ensure_dimension(n, 'coset module')
    p = ctx.p

    shift = (action_matrix(nbar(ctx), space) - np.eye(n, dtype=np.int64)) % p
    shift_rank = rank(shift, p)
    if shift_rank != n - 1:
        raise StructuralError(f'Nbar - 1 has rank {shift_rank}, expected a single Jordan block of size {n}')

    actions = generator_actions(space)
    census = []
    for i in range(n + 1):
        candidate = FpSubspace(null_space(matrix_power(shift, i, p), p), p, n)
        if all(candidate.is_invariant(action) for action in actions):
            census.append(candidate)

    for member in census:
        if member != filtration_F(member.dim, k, ctx):
            raise StructuralError(f'Invariant subspace of dimension {member.dim} differs from F({member.dim})')
    logger.info('Invariant subspace census at p=%s, k=%s: %s members', p, k, len(census))
    return census


def restriction_matrix(a: int, l: int, k: int, ctx: LevelContext) -> Matrix:
    """Linear map from functions on level k to functions on level l.

    f goes to the function whose value at the coset x0 + p^(l-1) Z is the
    degree-a Mahler coefficient of u -> f(x0 + p^(l-1) u), that is the a-th
    finite difference at u = 0.
    """
    p = ctx.p
    small = CosetSpace(ctx, l)
    large = CosetSpace(ctx, k)
    step = small.size
    weights = [(-1) ** (a - s) * comb(a, s) % p for s in range(a + 1)]
    matrix = np.zeros((small.size, large.size), dtype=np.int64)
    for x0 in range(small.size):
        for s, weight in enumerate(weights):
            matrix[x0, x0 + step * s] = (matrix[x0, x0 + step * s] + weight) % p
    return matrix


@dataclass
class QuotientMap:
    a: int
    l: int
    k: int
    matrix: Matrix
    kernel_matches: bool
    surjective: bool
    equivariant: bool

    @property
    def holds(self) -> bool:
        return self.kernel_matches and self.surjective and self.equivariant

    def __bool__(self) -> bool:
        return self.holds

    def to_json(self) -> Dict[str, Any]:
        return {
            'a': self.a,
            'l': self.l,
            'k': self.k,
            'kernel_matches': self.kernel_matches,
            'surjective': self.surjective,
            'equivariant': self.equivariant,
            'matrix': self.matrix.tolist(),
        }


def quotient_iso(
    a: int,
    l: int,
    k: int,
    ctx: LevelContext,
    extra_elements: Optional[List[GroupElement]] = None,
) -> QuotientMap:
    """Check F((a+1)p^(l-1)) / F(a p^(l-1)) ~ F_p[pZ_p/p^l] through the restriction map."""
    if not 1 <= l <= k:
        raise ParameterError(f'l={l} must satisfy 1 <= l <= k={k}')
    if not 0 <= a < ctx.p ** (k - l):
        raise ParameterError(f'a={a} must satisfy 0 <= a < p^(k-l)')
    p = ctx.p
    small = CosetSpace(ctx, l)
    large = CosetSpace(ctx, k)
    step = small.size

    matrix = restriction_matrix(a, l, k, ctx)
    source = filtration_F((a + 1) * step, k, ctx)
    images = source.basis @ matrix.T % p

    kernel = FpSubspace(null_space(images.T, p) @ source.basis % p, p, large.size) if source.dim else source
    kernel_matches = kernel == filtration_F(a * step, k, ctx)
    surjective = rank(images, p) == small.size

    elements = list(ambient_group(ctx).generator_elements()) + list(extra_elements or [])
    equivariant = True
    for g in elements:
        moved = source.basis @ action_matrix(g, large).T % p
        lhs = moved @ matrix.T % p
        rhs = images @ action_matrix(g, small).T % p
        if not np.array_equal(lhs, rhs):
            equivariant = False
            break

    return QuotientMap(a, l, k, matrix, bool(kernel_matches), bool(surjective), equivariant)


@dataclass
class FiltrationStep:
    start: int
    end: int
    level: int
    verified: bool

    def to_json(self) -> Dict[str, Any]:
        return {
            'start': self.start,
            'end': self.end,
            'quotient': f'F_p[G/H(p^{self.level})]',
            'level': self.level,
            'verified': self.verified,
        }


@dataclass
class FiltrationDescriptor:
    d: int
    k: int
    p: int
    base: int
    relaxed: bool
    digits: List[int]
    steps: List[FiltrationStep] = field(default_factory=list)

    @property
    def holds(self) -> bool:
        return all(step.verified for step in self.steps)

    def to_json(self) -> Dict[str, Any]:
        return {
            'd': self.d,
            'k': self.k,
            'p': self.p,
            'base': self.base,
            'relaxed': self.relaxed,
            'digits': self.digits,
            'chain': [step.end for step in self.steps],
            'steps': [step.to_json() for step in self.steps],
            'verified': self.holds,
        }


def decompose_submodule(d: int, k: int, ctx: LevelContext, relaxed: bool = False) -> FiltrationDescriptor:
    """Filter F(d) with quotients F_p[G/H(p^l)], following the base-p^4 digits of d.

    Larger powers come first so each partial sum is divisible by the next step.
    Relaxed mode uses base-p digits and any k.
    """
    space = CosetSpace(ctx, k)
    if not 0 <= d <= space.size:
        raise ParameterError(f'd={d} must satisfy 0 <= d <= p^(k-1) = {space.size}')
    if not relaxed and (k - 1) % 4:
        raise ParameterError(f'Base p^4 decomposition needs 4 | k-1, got k={k}; use relaxed mode')

    exponent_step = 1 if relaxed else 4
    base = ctx.p ** exponent_step
    digits = []
    remaining = d
    while remaining:
        remaining, digit = divmod(remaining, base)
        digits.append(digit)

    descriptor = FiltrationDescriptor(d, k, ctx.p, base, relaxed, digits)
    start = 0
    for position in range(len(digits) - 1, -1, -1):
        size = base ** position
        level = exponent_step * position + 1
        for _ in range(digits[position]):
            quotient = quotient_iso(start // size, level, k, ctx)
            descriptor.steps.append(FiltrationStep(start, start + size, level, quotient.holds))
            start += size

    if start != d:
        raise StructuralError(f'Filtration of F({d}) stopped at F({start})')
    return descriptor
