# Linear algebra over the prime field F_p on numpy int64 arrays.
import logging
from typing import Any, Dict, List, Sequence, Tuple

import numpy as np
from numpy.typing import NDArray
from sympy import isprime

from config.settings import settings
from src.utils.exceptions import ParameterError, ResourceError, StructuralError

logger = logging.getLogger(__name__)

Matrix = NDArray[np.int64]


def ensure_prime(p: int) -> int:
    if not isprime(int(p)):
        raise ParameterError(f'Modulus p={p} is not prime')
    return int(p)


def ensure_dimension(dim: int, what: str = 'space') -> None:
    """Refuse linear algebra on spaces larger than the configured cap."""
    cap = settings.LINALG_DIMENSION_CAP
    if dim > cap:
        raise ResourceError(
            f'{what} of dimension {dim} exceeds the linear-algebra cap {cap}',
            required=dim,
            cap=cap,
        )


def as_matrix(rows: Any, ncols: int | None = None) -> Matrix:
    mat = np.asarray(rows, dtype=np.int64)
    if mat.ndim == 1:
        mat = mat.reshape(1, -1) if mat.size else np.zeros((0, ncols or 0), dtype=np.int64)
    if mat.ndim != 2:
        raise ParameterError(f'Expected a matrix, got an array of shape {mat.shape}')
    return mat


def _elimination_work(mat: Matrix, p: int) -> Tuple[Matrix, bool]:
    # Each step moves an entry by at most (p-1)^2, so reduction can wait while that stays in int64.
    work = np.ascontiguousarray(as_matrix(mat) % p)
    lazy = min(work.shape) * (p - 1) ** 2 + p < 2 ** 62
    return work, lazy


def rref(mat: Matrix, p: int) -> Tuple[Matrix, List[int]]:
    """Return the reduced row-echelon form of ``mat`` over GF(p) and its pivot columns.

    Each pivot is normalised to 1 and its column cleared in every other row,
    so the result is unique; zero rows are dropped.
    """
    inverses = [0] + [pow(value, -1, p) for value in range(1, p)]
    work, lazy = _elimination_work(mat, p)
    num_rows, num_cols = work.shape
    pivots: List[int] = []
    row = 0
    for col in range(num_cols):
        if row >= num_rows:
            break
        column = work[:, col] % p
        candidates = np.nonzero(column[row:])[0]
        if candidates.size == 0:
            continue
        pivot_row = row + int(candidates[0])
        if pivot_row != row:
            work[[row, pivot_row]] = work[[pivot_row, row]]
            column[[row, pivot_row]] = column[[pivot_row, row]]
        # The pivot row is zero mod p left of col.
        work[row, col:] = (work[row, col:] % p) * inverses[int(column[row])] % p
        column[row] = 0
        work[:, col:] -= np.outer(column, work[row, col:])
        if not lazy:
            work[:, col:] %= p
        pivots.append(col)
        row += 1

    return work[:row] % p, pivots


def rank(mat: Matrix, p: int) -> int:
    """Rank over GF(p) by forward elimination only (no back substitution)."""
    mat = as_matrix(mat)
    if mat.size == 0:
        return 0
    if mat.shape[0] > mat.shape[1]:
        mat = mat.T
    inverses = [0] + [pow(value, -1, p) for value in range(1, p)]
    work, lazy = _elimination_work(mat, p)
    num_rows, num_cols = work.shape
    row = 0
    for col in range(num_cols):
        if row >= num_rows:
            break
        column = work[row:, col] % p
        candidates = np.nonzero(column)[0]
        if candidates.size == 0:
            continue
        first = int(candidates[0])
        if first:
            work[[row, row + first]] = work[[row + first, row]]
            column[[0, first]] = column[[first, 0]]
        if candidates.size > 1:
            pivot = (work[row, col:] % p) * inverses[int(column[0])] % p
            work[row + 1:, col:] -= np.outer(column[1:], pivot)
            if not lazy:
                work[row + 1:, col:] %= p
        row += 1
    return row


def dot_mod(left: Any, right: Any, p: int) -> Matrix:
    """left @ right over GF(p), through float64 BLAS while every sum stays below 2**53."""
    left = np.asarray(left, dtype=np.int64) % p
    right = np.asarray(right, dtype=np.int64) % p
    if right.shape[0] * (p - 1) ** 2 < 2 ** 53:
        product = np.rint(left.astype(np.float64) @ right.astype(np.float64)).astype(np.int64)
    else:
        product = left @ right
    return product % p


def null_space(mat: Matrix, p: int) -> Matrix:
    """Basis (as rows) of {x : mat @ x = 0} over GF(p)."""
    mat = as_matrix(mat)
    num_cols = mat.shape[1]
    reduced, pivots = rref(mat, p)
    free = [col for col in range(num_cols) if col not in set(pivots)]
    basis = np.zeros((len(free), num_cols), dtype=np.int64)
    for out_row, col in enumerate(free):
        basis[out_row, col] = 1
        for pivot_row, pivot_col in enumerate(pivots):
            basis[out_row, pivot_col] = (-reduced[pivot_row, col]) % p
    return basis


def inverse(mat: Matrix, p: int) -> Matrix:
    mat = as_matrix(mat)
    n = mat.shape[0]
    if mat.shape != (n, n):
        raise ParameterError(f'Cannot invert a non-square matrix of shape {mat.shape}')
    augmented = np.hstack((mat % p, np.eye(n, dtype=np.int64)))
    reduced, pivots = rref(augmented, p)
    if pivots[:n] != list(range(n)) or reduced.shape[0] < n:
        raise StructuralError('Matrix is singular over GF(p)')
    return reduced[:n, n:]


def matrix_power(mat: Matrix, exponent: int, p: int) -> Matrix:
    result = np.eye(mat.shape[0], dtype=np.int64)
    base = mat % p
    while exponent:
        if exponent & 1:
            result = (result @ base) % p
        base = (base @ base) % p
        exponent >>= 1
    return result


def permutation_matrix(perm: Sequence[int]) -> Matrix:
    """Matrix P with P[perm[x], x] = 1, so P e_x = e_perm[x]."""
    perm = np.asarray(perm, dtype=np.int64)
    size = perm.size
    mat = np.zeros((size, size), dtype=np.int64)
    mat[perm, np.arange(size)] = 1
    return mat


class FpSubspace:
    """A subspace of GF(p)^n held as its canonical reduced row-echelon basis.

    Two subspaces are equal exactly when their bases are equal, so equality
    and hashing are syntactic.
    """

    def __init__(self, vectors: Any, p: int, ambient_dim: int) -> None:
        self.p = int(p)
        self.ambient_dim = int(ambient_dim)
        mat = as_matrix(vectors, ambient_dim)
        if mat.shape[0] and mat.shape[1] != ambient_dim:
            raise ParameterError(f'Vectors of length {mat.shape[1]} in a space of dimension {ambient_dim}')
        if mat.shape[0]:
            self.basis, self.pivots = rref(mat, self.p)
        else:
            self.basis, self.pivots = np.zeros((0, ambient_dim), dtype=np.int64), []
        self.basis.setflags(write=False)

    @classmethod
    def zero(cls, p: int, ambient_dim: int) -> 'FpSubspace':
        return cls(np.zeros((0, ambient_dim), dtype=np.int64), p, ambient_dim)

    @classmethod
    def full(cls, p: int, ambient_dim: int) -> 'FpSubspace':
        return cls(np.eye(ambient_dim, dtype=np.int64), p, ambient_dim)

    @property
    def dim(self) -> int:
        return len(self.pivots)

    @property
    def free_columns(self) -> List[int]:
        pivot_set = set(self.pivots)
        return [col for col in range(self.ambient_dim) if col not in pivot_set]

    def reduce(self, vectors: Any) -> Matrix:
        """Normal form of each row modulo the subspace (zero on pivot columns)."""
        mat = as_matrix(vectors, self.ambient_dim) % self.p
        if not self.dim:
            return mat
        return (mat - dot_mod(mat[:, self.pivots], self.basis, self.p)) % self.p

    def contains(self, vectors: Any) -> bool:
        return not np.any(self.reduce(vectors))

    def quotient_coordinates(self, vectors: Any) -> Matrix:
        """Coordinates of the images in the quotient, on the free columns."""
        return self.reduce(vectors)[:, self.free_columns]

    def is_subspace_of(self, other: 'FpSubspace') -> bool:
        self._check_compatible(other)
        return other.contains(self.basis) if self.dim else True

    def is_invariant(self, action: Matrix) -> bool:
        """True if the matrix (acting on column vectors) maps the subspace into itself."""
        if not self.dim:
            return True
        return self.contains(self.basis @ as_matrix(action).T % self.p)

    def __add__(self, other: 'FpSubspace') -> 'FpSubspace':
        self._check_compatible(other)
        return FpSubspace(np.vstack((self.basis, other.basis)), self.p, self.ambient_dim)

    def intersection(self, other: 'FpSubspace') -> 'FpSubspace':
        # Zassenhaus: rows (u | u) and (w | 0); the block with zero left half spans U ∩ W.
        self._check_compatible(other)
        n = self.ambient_dim
        if not self.dim or not other.dim:
            return FpSubspace.zero(self.p, n)
        stacked = np.vstack(
            (
                np.hstack((self.basis, self.basis)),
                np.hstack((other.basis, np.zeros_like(other.basis))),
            )
        )
        reduced, pivots = rref(stacked, self.p)
        rows = [i for i, col in enumerate(pivots) if col >= n]
        return FpSubspace(reduced[rows, n:], self.p, n)

    def _check_compatible(self, other: 'FpSubspace') -> None:
        if (self.p, self.ambient_dim) != (other.p, other.ambient_dim):
            raise ParameterError('Subspaces live in different ambient spaces')

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, FpSubspace):
            return NotImplemented
        return (
            self.p == other.p
            and self.ambient_dim == other.ambient_dim
            and np.array_equal(self.basis, other.basis)
        )

    def __hash__(self) -> int:
        return hash((self.p, self.ambient_dim, self.basis.tobytes()))

    def __repr__(self) -> str:
        return f'FpSubspace(p={self.p}, dim={self.dim}, ambient={self.ambient_dim})'

    def to_json(self) -> Dict[str, Any]:
        return {
            'p': self.p,
            'ambient_dim': self.ambient_dim,
            'dim': self.dim,
            'basis': self.basis.tolist(),
        }
