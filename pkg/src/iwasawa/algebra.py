import logging
from functools import cached_property
from itertools import product
from typing import List, Optional, Sequence, Tuple

import numpy as np

from src.groups.level import LevelContext
from src.groups.matrices import embed_copy, stack_rows
from src.groups.subgroups import Family, ProductSubgroupSpec, SubgroupRealization, realize
from src.linalg.fp import dot_mod, ensure_dimension, inverse, rank
from src.utils.exceptions import ParameterError, StructuralError

logger = logging.getLogger(__name__)

MonomialIndex = Tuple[int, ...]


class TruncatedAlgebra:
    """A_N = F_p[G(p^b)^t / G(p^N)^t] with the group elements as basis.

    Algebra elements are coefficient rows over the enumerated group. The
    generators per copy are, in order, (1, p^b; 0, 1), diag(1+p^b) and
    (1, 0; p^b, 1); z_i = 1 - g_i.
    """

    def __init__(self, ctx: LevelContext, base_level: Optional[int] = None) -> None:
        self.ctx = ctx
        self.p = ctx.p
        self.copies = ctx.copies
        self.base_level = base_level if base_level is not None else (2 if ctx.p == 2 else 1)
        ctx.check_level(self.base_level, 'base level')
        self.exponent_bound = ctx.p ** (ctx.N - self.base_level)
        self.group: SubgroupRealization = realize(
            ProductSubgroupSpec(Family.G, (self.base_level,) * ctx.copies), ctx
        )
        ensure_dimension(self.group.expected_order, 'truncated algebra')
        self.generator_rows = self._generator_rows()

    def _generator_rows(self) -> np.ndarray:
        single = self.ctx.single()
        step = self.p ** self.base_level
        per_copy = stack_rows(
            [single.upper(step).as_row(), single.diag(1 + step).as_row(), single.lower(step).as_row()],
            4,
        )
        return stack_rows([embed_copy(per_copy, copy, self.copies) for copy in range(self.copies)], self.ctx.width)

    @property
    def dim(self) -> int:
        return self.group.order

    @property
    def rank(self) -> int:
        """Number of topological generators, 3t."""
        return self.generator_rows.shape[0]

    @cached_property
    def _left_inverse_perms(self) -> np.ndarray:
        # Row i: for each basis index y, the index x with g_i x = y.
        images = self.group.table.left_images(self.generator_rows)
        inverse_perms = np.empty_like(images)
        for row, perm in enumerate(images):
            inverse_perms[row, perm] = np.arange(self.dim)
        return inverse_perms

    @cached_property
    def _right_inverse_perms(self) -> np.ndarray:
        images = self.group.table.right_images(self.generator_rows)
        inverse_perms = np.empty_like(images)
        for row, perm in enumerate(images):
            inverse_perms[row, perm] = np.arange(self.dim)
        return inverse_perms

    def one(self) -> np.ndarray:
        vector = np.zeros(self.dim, dtype=np.int64)
        vector[self.group.table.identity_index] = 1
        return vector

    def left_generator(self, i: int, vectors: np.ndarray) -> np.ndarray:
        """g_i * v for rows v."""
        return np.asarray(vectors)[..., self._left_inverse_perms[i]]

    def left_z(self, i: int, vectors: np.ndarray) -> np.ndarray:
        """z_i * v = v - g_i v."""
        return (vectors - self.left_generator(i, vectors)) % self.p

    def right_z(self, i: int, vectors: np.ndarray) -> np.ndarray:
        """v * z_i = v - v g_i."""
        return (vectors - np.asarray(vectors)[..., self._right_inverse_perms[i]]) % self.p

    def z_generators(self) -> List[np.ndarray]:
        one = self.one()
        return [self.left_z(i, one) for i in range(self.rank)]

    def apply_monomial(self, alpha: Sequence[int], vectors: np.ndarray) -> np.ndarray:
        """z^alpha * v with z^alpha = z_1^alpha_1 ... z_n^alpha_n, rightmost factor first."""
        self._check_index(alpha, bounded=False)
        result = np.asarray(vectors, dtype=np.int64) % self.p
        for i in range(self.rank - 1, -1, -1):
            for _ in range(alpha[i]):
                result = self.left_z(i, result)
        return result

    def monomial(self, alpha: Sequence[int]) -> np.ndarray:
        return self.apply_monomial(alpha, self.one())

    def multiply(self, left: np.ndarray, right: np.ndarray) -> np.ndarray:
        """Product in the group algebra via the group table."""
        table = self.group.table
        result = np.zeros(self.dim, dtype=np.int64)
        for x in np.nonzero(left % self.p)[0]:
            images = table.left_images(table.rows[x], None)[0]
            result[images] = (result[images] + left[x] * right) % self.p
        return result

    def _check_index(self, alpha: Sequence[int], bounded: bool = True) -> None:
        if len(alpha) != self.rank or any(value < 0 for value in alpha):
            raise ParameterError(f'Monomial index {tuple(alpha)} does not have {self.rank} nonnegative entries')
        if bounded and any(value >= self.exponent_bound for value in alpha):
            raise ParameterError(f'Monomial index {tuple(alpha)} has an entry >= {self.exponent_bound}')

    def indices(self) -> List[MonomialIndex]:
        """All basis indices, lexicographic with the first entry most significant."""
        return list(product(range(self.exponent_bound), repeat=self.rank))

    @cached_property
    def monomial_matrix(self) -> np.ndarray:
        """Rows z^alpha * 1 for every basis index, in ``indices()`` order."""
        if self.exponent_bound ** self.rank != self.dim:
            logger.warning('Monomial count %s differs from the algebra dimension %s', self.exponent_bound ** self.rank, self.dim)
        rows = self.one().reshape(1, -1)
        for i in range(self.rank - 1, -1, -1):
            blocks = [rows]
            current = rows
            for _ in range(1, self.exponent_bound):
                current = self.left_z(i, current)
                blocks.append(current)
            rows = np.vstack(blocks)
        rows.setflags(write=False)
        return rows

    def position(self, alpha: Sequence[int]) -> int:
        self._check_index(alpha)
        position = 0
        for value in alpha:
            position = position * self.exponent_bound + value
        return position

    @cached_property
    def coordinate_matrix(self) -> np.ndarray:
        """Inverse of the monomial matrix: v @ coordinate_matrix gives monomial coordinates."""
        if not self.monomial_basis_check():
            raise StructuralError('Monomials do not form a basis; coordinates are undefined')
        return inverse(self.monomial_matrix, self.p)

    def coordinates(self, vectors: np.ndarray) -> np.ndarray:
        return dot_mod(vectors, self.coordinate_matrix, self.p)

    @cached_property
    def monomial_rank(self) -> int:
        return rank(self.monomial_matrix, self.p)

    def monomial_basis_check(self) -> bool:
        """The p^(3t(N-b)) monomials are independent and span A_N."""
        return self.monomial_matrix.shape[0] == self.dim and self.monomial_rank == self.dim

    def __repr__(self) -> str:
        return f'TruncatedAlgebra(p={self.p}, N={self.ctx.N}, t={self.copies}, base={self.base_level})'


def z_generators(ctx: LevelContext, base_level: Optional[int] = None) -> List[np.ndarray]:
    return TruncatedAlgebra(ctx, base_level).z_generators()


def monomial(alpha: Sequence[int], algebra: TruncatedAlgebra) -> np.ndarray:
    return algebra.monomial(alpha)


def monomial_basis_check(ctx: LevelContext, base_level: Optional[int] = None) -> bool:
    algebra = TruncatedAlgebra(ctx, base_level)
    holds = algebra.monomial_basis_check()
    logger.info('Monomial basis at p=%s, N=%s, t=%s, base %s: %s', ctx.p, ctx.N, ctx.copies, algebra.base_level, holds)
    return holds
