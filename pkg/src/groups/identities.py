"""Set-level checks of the identities relating the T(l,j) family and its conjugates."""
import logging
from dataclasses import dataclass
from typing import Dict

import numpy as np

from src.groups.level import LevelContext
from src.groups.matrices import encode
from src.groups.subgroups import (
    SubgroupSpec,
    intersection,
    join,
    realize,
    same_subgroup,
)
from src.utils.exceptions import ParameterError

logger = logging.getLogger(__name__)


def _check_identity_range(l: int, j: int, ctx: LevelContext) -> None:
    if not 2 <= j <= l - 1:
        raise ParameterError(f'Identities need 2 <= j <= l-1, got (l, j) = ({l}, {j})')
    if l > ctx.N - 1:
        raise ParameterError(f'Level l={l} is only faithful for N >= l+1, got N={ctx.N}')


def _triple(l: int, j: int, ctx: LevelContext):
    return (
        realize(SubgroupSpec.tlj(l, j), ctx),
        realize(SubgroupSpec.tlj_prime(l, j), ctx),
        realize(SubgroupSpec.tlj_double_prime(l, j), ctx),
    )


def verify_product_identity(l: int, j: int, ctx: LevelContext) -> bool:
    """Does <T(l,j), T(l,j)', T(l,j)''> equal T(l-1, j-1)?"""
    _check_identity_range(l, j, ctx)
    generated = join(*_triple(l, j, ctx))
    target = realize(SubgroupSpec.tlj(l - 1, j - 1), ctx)
    holds = same_subgroup(generated, target)
    logger.info('Product identity (%s, %s) at p=%s, N=%s: %s', l, j, ctx.p, ctx.N, holds)
    return holds


def intersection_rotations(l: int, j: int, ctx: LevelContext) -> Dict[str, bool]:
    """For each of the three groups X, whether X ∩ <other two> equals T(l, j-1).

    T(l, j-1) is normalised by N_j and its transpose, so it is the common
    target for all three rotations.
    """
    _check_identity_range(l, j, ctx)
    groups = _triple(l, j, ctx)
    target = realize(SubgroupSpec.tlj(l, j - 1), ctx)
    results: Dict[str, bool] = {}
    for position, group in enumerate(groups):
        others = [other for index, other in enumerate(groups) if index != position]
        meet = intersection(group, join(*others))
        results[group.label] = same_subgroup(meet, target)
    return results


def verify_intersection_identity(l: int, j: int, ctx: LevelContext) -> bool:
    results = intersection_rotations(l, j, ctx)
    holds = all(results.values())
    logger.info('Intersection identity (%s, %s) at p=%s, N=%s: %s', l, j, ctx.p, ctx.N, holds)
    return holds


@dataclass(frozen=True)
class ConjugationReport:
    k: int
    shift: int
    level: int
    holds: bool

    def __bool__(self) -> bool:
        return self.holds


def conjugate_H_to_T(k: int, ctx: LevelContext) -> ConjugationReport:
    """Conjugate H(p^k) by diag(p^-s, 1), s = (k-1)/2, and compare with T(p^(s+1)).

    The conjugate (a, b/p^s; c p^s, d) is only defined modulo p^(N-s), so the
    comparison happens at level N - s.
    """
    if k % 2 == 0:
        raise ParameterError(f'conjugate_H_to_T needs odd k, got k={k}')
    ctx = ctx.single()
    ctx.check_level(k)
    s = (k - 1) // 2
    level = ctx.N - s
    small = ctx.with_depth(level)
    shift = ctx.p ** s

    rows = realize(SubgroupSpec.H(k), ctx).table.rows
    image = np.empty_like(rows)
    image[:, 0] = rows[:, 0]
    image[:, 1] = rows[:, 1] // shift
    image[:, 2] = rows[:, 2] * shift
    image[:, 3] = rows[:, 3]
    image %= small.modulus

    target = realize(SubgroupSpec.T(s + 1), small)
    holds = bool(np.array_equal(np.unique(encode(image, small.modulus)), target.table.keys))
    return ConjugationReport(k=k, shift=s, level=level, holds=holds)
