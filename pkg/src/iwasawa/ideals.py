import logging
from dataclasses import dataclass
from functools import cached_property
from typing import Dict, List, Optional, Sequence

import numpy as np

from src.coinvariants.modules import MatrixModule
from src.groups.matrices import encode
from src.iwasawa.algebra import MonomialIndex, TruncatedAlgebra
from src.iwasawa.monomials import at_least, ordered_indices, successor_table
from src.linalg.fp import FpSubspace, Matrix
from src.utils.exceptions import ParameterError

logger = logging.getLogger(__name__)


def ideal_I_alpha(alpha: Sequence[int], algebra: TruncatedAlgebra) -> FpSubspace:
    """Span of the monomials z^beta with beta at or above alpha."""
    algebra._check_index(alpha)
    positions = [algebra.position(beta) for beta in algebra.indices() if at_least(beta, alpha)]
    return FpSubspace(algebra.monomial_matrix[positions], algebra.p, algebra.dim)


def is_two_sided(ideal: FpSubspace, algebra: TruncatedAlgebra) -> bool:
    """z_i I and I z_i lie in I for every generator."""
    for i in range(algebra.rank):
        if not ideal.contains(algebra.left_z(i, ideal.basis)):
            return False
        if not ideal.contains(algebra.right_z(i, ideal.basis)):
            return False
    return True


def ideal_I_alpha_is_two_sided(alpha: Sequence[int], algebra: TruncatedAlgebra) -> bool:
    """``is_two_sided`` for I_alpha, tested on monomial coordinates when the monomials form a basis."""
    algebra._check_index(alpha)
    if not algebra.monomial_basis_check():
        return is_two_sided(ideal_I_alpha(alpha, algebra), algebra)
    indices = algebra.indices()
    inside = [position for position, beta in enumerate(indices) if at_least(beta, alpha)]
    outside = [position for position, beta in enumerate(indices) if not at_least(beta, alpha)]
    basis = algebra.monomial_matrix[inside]
    for i in range(algebra.rank):
        for moved in (algebra.left_z(i, basis), algebra.right_z(i, basis)):
            if np.any(algebra.coordinates(moved)[:, outside]):
                return False
    return True


@dataclass
class IdealReport:
    l: int
    codimension: int
    matches_monomial_span: bool
    matches_literal_span: bool
    generators: Matrix
    p: int

    @cached_property
    def kernel(self) -> FpSubspace:
        return FpSubspace(self.generators, self.p, self.generators.shape[1])

    def __bool__(self) -> bool:
        return self.matches_monomial_span


def _large_entry_positions(threshold: int, algebra: TruncatedAlgebra) -> List[int]:
    return [algebra.position(alpha) for alpha in algebra.indices() if any(value >= threshold for value in alpha)]


def _spans_kernel(positions: List[int], classes: np.ndarray, count: int, algebra: TruncatedAlgebra, generators: Matrix) -> bool:
    """span{z^beta : beta at ``positions``} equals the kernel of A_N -> F_p[classes]."""
    rows = algebra.monomial_matrix[positions]
    if not algebra.monomial_basis_check():
        return FpSubspace(rows, algebra.p, algebra.dim) == FpSubspace(generators, algebra.p, algebra.dim)
    # Independent monomials: equal dimension and a zero projection suffice.
    if len(positions) != algebra.dim - count:
        return False
    targets = (np.arange(len(positions))[:, None] * count + classes[None, :]).reshape(-1)
    sums = np.bincount(targets, weights=rows.reshape(-1), minlength=len(positions) * count)
    return not np.any(sums.astype(np.int64) % algebra.p)


def ideal_Ip(l: int, algebra: TruncatedAlgebra) -> IdealReport:
    """Kernel of A_N -> F_p[G_b / G(p^l)] compared with two monomial descriptions.

    The monomial description holds with threshold p^(l-b); the literal
    threshold p^l is reported alongside it.
    """
    ctx = algebra.ctx
    ctx.check_level(l, 'l')
    rows = algebra.group.table.rows
    coset_keys = encode(rows % ctx.p ** l, ctx.p ** l)
    _, first, classes = np.unique(coset_keys, return_index=True, return_inverse=True)
    classes = classes.reshape(-1)

    representatives = first[classes]
    movers = np.nonzero(representatives != np.arange(algebra.dim))[0]
    generators = np.zeros((movers.size, algebra.dim), dtype=np.int64)
    generators[np.arange(movers.size), movers] = 1
    generators[np.arange(movers.size), representatives[movers]] = algebra.p - 1

    count = first.size
    shifted = _large_entry_positions(ctx.p ** max(l - algebra.base_level, 0), algebra)
    literal = _large_entry_positions(ctx.p ** l, algebra)
    report = IdealReport(
        l,
        count,
        _spans_kernel(shifted, classes, count, algebra, generators),
        _spans_kernel(literal, classes, count, algebra, generators),
        generators,
        algebra.p,
    )
    logger.info(
        'I(p^%s) at p=%s, N=%s: shifted=%s, literal=%s',
        l, ctx.p, ctx.N, report.matches_monomial_span, report.matches_literal_span,
    )
    return report


def monomial_actions(module: MatrixModule, algebra: TruncatedAlgebra) -> Dict[MonomialIndex, Matrix]:
    """rho(z^gamma) on the module for every basis index gamma."""
    p = algebra.p
    identity = np.eye(module.dim, dtype=np.int64)
    z_matrices = [(identity - module.action_matrix(row)) % p for row in algebra.generator_rows]

    matrices: List[Matrix] = [identity]
    for i in range(algebra.rank - 1, -1, -1):
        blocks = list(matrices)
        current = matrices
        for _ in range(1, algebra.exponent_bound):
            current = [z_matrices[i] @ matrix % p for matrix in current]
            blocks.extend(current)
        matrices = blocks
    return dict(zip(algebra.indices(), matrices))


@dataclass
class ModuleFiltration:
    indices: List[MonomialIndex]
    steps: Dict[MonomialIndex, FpSubspace]
    successors: Dict[MonomialIndex, Optional[MonomialIndex]]
    module_dim: int

    def quotient_dimension(self, beta: MonomialIndex) -> int:
        following = self.successors[beta]
        below = self.steps[following].dim if following is not None else 0
        return self.steps[beta].dim - below

    def rows(self) -> List[Dict[str, object]]:
        return [
            {'index': list(beta), 'dim': self.steps[beta].dim, 'quotient_dim': self.quotient_dimension(beta)}
            for beta in self.indices
        ]


def module_filtration(
    module: MatrixModule,
    algebra: TruncatedAlgebra,
    alpha: Optional[Sequence[int]] = None,
) -> ModuleFiltration:
    """The chain M_beta = I_beta M, built from the top using I_beta = z^beta A + I_beta'."""
    actions = monomial_actions(module, algebra)
    ordered = ordered_indices(algebra)
    steps: Dict[MonomialIndex, FpSubspace] = {}
    current = FpSubspace.zero(module.p, module.dim)
    for beta in reversed(ordered):
        current = current + FpSubspace(actions[beta].T, module.p, module.dim)
        steps[beta] = current

    if alpha is not None:
        ordered = [beta for beta in ordered if not at_least(beta, alpha) or tuple(beta) == tuple(alpha)]
    return ModuleFiltration(ordered, steps, successor_table(algebra), module.dim)


@dataclass
class SurjectionReport:
    beta: MonomialIndex
    alpha: MonomialIndex
    contained: bool
    contains: bool

    @property
    def holds(self) -> bool:
        return self.contained and self.contains

    def __bool__(self) -> bool:
        return self.holds


def surjection_check(
    module: MatrixModule,
    beta: Sequence[int],
    alpha: Sequence[int],
    algebra: TruncatedAlgebra,
    filtration: Optional[ModuleFiltration] = None,
) -> SurjectionReport:
    """z^(alpha-beta) M_beta + M_alpha' against M_alpha, each inclusion reported."""
    if any(a < b for a, b in zip(alpha, beta)):
        raise ParameterError(f'{tuple(alpha)} does not dominate {tuple(beta)} entrywise')
    filtration = filtration or module_filtration(module, algebra)
    beta, alpha = tuple(beta), tuple(alpha)
    shift = actions_for(module, algebra, [a - b for a, b in zip(alpha, beta)])

    moved = FpSubspace(filtration.steps[beta].basis @ shift.T % module.p, module.p, module.dim)
    following = filtration.successors[alpha]
    tail = filtration.steps[following] if following is not None else FpSubspace.zero(module.p, module.dim)
    lhs = moved + tail
    target = filtration.steps[alpha]
    return SurjectionReport(beta, alpha, lhs.is_subspace_of(target), target.is_subspace_of(lhs))


def actions_for(module: MatrixModule, algebra: TruncatedAlgebra, gamma: Sequence[int]) -> Matrix:
    """rho(z^gamma) for any nonnegative gamma (entries may exceed the basis range)."""
    p = algebra.p
    identity = np.eye(module.dim, dtype=np.int64)
    result = identity
    for i, exponent in enumerate(gamma):
        z_matrix = (identity - module.action_matrix(algebra.generator_rows[i])) % p
        for _ in range(exponent):
            result = result @ z_matrix % p
    return result
