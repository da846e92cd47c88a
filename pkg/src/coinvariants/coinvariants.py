import logging
from dataclasses import dataclass
from typing import Any, Dict, Union

import numpy as np

from src.coinvariants.modules import CoinvariantResult, GModule, MatrixModule
from src.groups.level import GroupElement
from src.groups.subgroups import (
    SubgroupRealization,
    SubgroupSpec,
    conjugate_realization,
    intersection,
    join,
    realize,
)
from src.linalg.fp import FpSubspace
from src.utils.exceptions import ContainmentError, ParameterError

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class InequalityReport:
    """lhs <relation> rhs, truthy when it holds."""

    name: str
    lhs: Any
    rhs: Any
    relation: str = '<='

    @property
    def holds(self) -> bool:
        if self.relation == '<=':
            return self.lhs <= self.rhs
        if self.relation == '==':
            return self.lhs == self.rhs
        raise ParameterError(f'Unknown relation {self.relation!r}')

    def __bool__(self) -> bool:
        return self.holds

    def to_json(self) -> Dict[str, Any]:
        return {'name': self.name, 'lhs': str(self.lhs), 'rhs': str(self.rhs), 'relation': self.relation}


def coinvariants(module: GModule, sub: SubgroupRealization, exhaustive: bool = False) -> CoinvariantResult:
    """M_T = M / span{(g - 1) m} over the generators of T (all elements when exhaustive)."""
    dim = module.coinvariant_dimension(sub, exhaustive)
    projection = module.coinvariant_projection(sub) if isinstance(module, MatrixModule) else None
    logger.debug('Coinvariants of %s under %s: dim %s (exhaustive=%s)', module.label, sub.label, dim, exhaustive)
    return CoinvariantResult(sub.label, dim, projection)


def generator_sufficiency(module: GModule, sub: SubgroupRealization) -> bool:
    """Relations from the generators span the same space as relations from every element."""
    return module.coinvariant_dimension(sub) == module.coinvariant_dimension(sub, exhaustive=True)


def inclusion_exclusion_check(module: GModule, first: SubgroupRealization, second: SubgroupRealization) -> InequalityReport:
    """dim M_A + dim M_B <= dim M_(A ∩ B) + dim M_<A,B>."""
    meet = intersection(first, second)
    generated = join(first, second)
    lhs = module.coinvariant_dimension(first) + module.coinvariant_dimension(second)
    rhs = module.coinvariant_dimension(meet) + module.coinvariant_dimension(generated)
    return InequalityReport('inclusion-exclusion', lhs, rhs)


def conjugation_invariance_check(
    module: GModule,
    sub: SubgroupRealization,
    g: Union[GroupElement, np.ndarray],
) -> bool:
    """dim M_(g T g^-1) = dim M_T, witnessed by m -> g m on explicit modules."""
    row = g.as_row() if isinstance(g, GroupElement) else np.asarray(g, dtype=np.int64).reshape(-1)
    if not module.group.contains_rows(row):
        raise ContainmentError(f'Conjugating element does not lie in {module.group.label}')
    conjugated = conjugate_realization(sub, row)
    same_dim = module.coinvariant_dimension(sub) == module.coinvariant_dimension(conjugated)
    if not same_dim or not isinstance(module, MatrixModule):
        return same_dim

    # rho(g)(h - 1)m = (g h g^-1 - 1) rho(g) m
    relations = module.relation_space(sub)
    moved = FpSubspace(relations.basis @ module.action_matrix(row).T % module.p, module.p, module.dim)
    return moved == module.relation_space(conjugated)


def recursion_check(module: GModule, l: int, j: int) -> InequalityReport:
    """3 dim M_T(l,j) <= 2 dim M_T(l,j-1) + dim M_T(l-1,j-1)."""
    ctx = module.ctx
    if j < 2:
        raise ParameterError(f'The recursion needs j >= 2, got j={j}')
    if l > ctx.N - 1:
        raise ParameterError(f'Level l={l} is only faithful for N >= l+1, got N={ctx.N}')

    def dim(spec: SubgroupSpec) -> int:
        return module.coinvariant_dimension(realize(spec, ctx))

    lhs = 3 * dim(SubgroupSpec.tlj(l, j))
    rhs = 2 * dim(SubgroupSpec.tlj(l, j - 1)) + dim(SubgroupSpec.tlj(l - 1, j - 1))
    return InequalityReport('recursion', lhs, rhs)


def monotonicity_check(module: GModule, inner: SubgroupRealization, outer: SubgroupRealization) -> InequalityReport:
    """A inside B gives dim M_B <= dim M_A."""
    if not outer.contains(inner):
        raise ContainmentError(f'{inner.label} is not contained in {outer.label}')
    return InequalityReport('monotonicity', module.coinvariant_dimension(outer), module.coinvariant_dimension(inner))
