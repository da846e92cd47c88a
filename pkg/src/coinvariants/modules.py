"""Finite-level G-modules over F_p.

Two presentations cover every module the lab needs:

* ``MatrixModule``: an explicit action matrix for each group element; used
  for small modules (trivial, explicit quotients, Kronecker tensors).
* ``PermutationQuotientModule``: F_p[Omega] / Q for a G-set Omega and the
  G-span Q of a few relator vectors; regular, cyclic A/Ax, coset and tensor
  modules stay in this form so coinvariants never need |Omega|-sized matrices.
"""
import logging
from abc import ABC, abstractmethod
from dataclasses import dataclass
from typing import Callable, Dict, Optional, Tuple

import numpy as np

from src.groups.gsets import CosetGSet, GSet, ProductGSet, RegularGSet
from src.groups.level import LevelContext
from src.groups.matrices import encode, multiply_rows
from src.groups.orbits import orbit_labels
from src.groups.subgroups import SubgroupRealization, coset_representatives, reduced_right_cosets
from src.linalg.fp import FpSubspace, Matrix, ensure_dimension, rank
from src.utils.exceptions import ContainmentError, LevelContextError, ParameterError, StructuralError

logger = logging.getLogger(__name__)

# Upper bound on (elements x support) entries materialised per chunk.
IMAGE_CHUNK_ENTRIES = 500_000


@dataclass
class CoinvariantResult:
    subgroup: str
    dim: int
    projection: Optional[Matrix] = None


@dataclass(frozen=True)
class CyclicModuleSpec:
    """A_N / A_N x with x drawn from the augmentation ideal by ``seed``."""

    seed: int
    generator: Tuple[int, ...]


class GModule(ABC):
    def __init__(self, group: SubgroupRealization, provenance: str, label: str) -> None:
        self.group = group
        self.ctx: LevelContext = group.ctx
        self.p = group.ctx.p
        self.provenance = provenance
        self.label = label
        self._coinvariant_cache: Dict[Tuple[bytes, bool], int] = {}
        self.spec: Optional[CyclicModuleSpec] = None

    @property
    @abstractmethod
    def dim(self) -> int:
        ...

    @abstractmethod
    def _coinvariant_dimension(self, sub: SubgroupRealization, exhaustive: bool) -> int:
        ...

    def check_subgroup(self, sub: SubgroupRealization) -> None:
        if sub.ctx != self.ctx:
            raise LevelContextError(f'{sub.label} lives at {sub.ctx}, module {self.label} at {self.ctx}')
        if not self.group.contains_rows(sub.generators):
            raise ContainmentError(f'{sub.label} does not act on {self.label}')

    def coinvariant_dimension(self, sub: SubgroupRealization, exhaustive: bool = False) -> int:
        self.check_subgroup(sub)
        key = (np.sort(encode(sub.generators, self.ctx.modulus)).tobytes(), exhaustive)
        if key not in self._coinvariant_cache:
            self._coinvariant_cache[key] = self._coinvariant_dimension(sub, exhaustive)
        return self._coinvariant_cache[key]

    def __repr__(self) -> str:
        return f'{type(self).__name__}({self.label}, dim={self.dim})'


class MatrixModule(GModule):
    def __init__(
        self,
        group: SubgroupRealization,
        dim: int,
        action: Callable[[np.ndarray], Matrix],
        provenance: str,
        label: str,
    ) -> None:
        super().__init__(group, provenance, label)
        ensure_dimension(dim, label)
        self._dim = dim
        self._action = action
        self._matrices: Dict[bytes, Matrix] = {}

    @property
    def dim(self) -> int:
        return self._dim

    def action_matrix(self, g_row: np.ndarray) -> Matrix:
        g_row = np.asarray(g_row, dtype=np.int64).reshape(-1)
        key = g_row.tobytes()
        if key not in self._matrices:
            self._matrices[key] = np.asarray(self._action(g_row), dtype=np.int64) % self.p
        return self._matrices[key]

    def relation_space(self, sub: SubgroupRealization, exhaustive: bool = False) -> FpSubspace:
        """span{(g - 1) m}, as rows."""
        rows = sub.table.rows if exhaustive else sub.generators
        identity = np.eye(self.dim, dtype=np.int64)
        blocks = [((self.action_matrix(row) - identity) % self.p).T for row in rows]
        stacked = np.vstack(blocks) if blocks else np.zeros((0, self.dim), dtype=np.int64)
        return FpSubspace(stacked, self.p, self.dim)

    def _coinvariant_dimension(self, sub: SubgroupRealization, exhaustive: bool) -> int:
        return self.dim - self.relation_space(sub, exhaustive).dim

    def coinvariant_projection(self, sub: SubgroupRealization) -> Matrix:
        """Matrix of M -> M_T on the free coordinates of the relation space."""
        relations = self.relation_space(sub)
        return relations.quotient_coordinates(np.eye(self.dim, dtype=np.int64)).T

    def check_homomorphism(self, samples: int = 20, seed: int = 0) -> bool:
        """rho(gh) = rho(g) rho(h) on random pairs."""
        rng = np.random.default_rng(seed)
        firsts = self.group.random_rows(samples, rng)
        seconds = self.group.random_rows(samples, rng)
        products = multiply_rows(firsts, seconds, self.ctx.modulus)
        for g, h, gh in zip(firsts, seconds, products):
            expected = self.action_matrix(g) @ self.action_matrix(h) % self.p
            if not np.array_equal(self.action_matrix(gh), expected):
                return False
        return True

    @classmethod
    def trivial(cls, group: SubgroupRealization) -> 'MatrixModule':
        return cls(group, 1, lambda row: np.eye(1, dtype=np.int64), 'trivial', 'trivial')

    @classmethod
    def from_gset(cls, gset: GSet, group: SubgroupRealization, provenance: str = 'coset') -> 'MatrixModule':
        def action(row: np.ndarray) -> Matrix:
            perm = gset.permutation(row)
            matrix = np.zeros((gset.size, gset.size), dtype=np.int64)
            matrix[perm, np.arange(gset.size)] = 1
            return matrix

        return cls(group, gset.size, action, provenance, f'F_p[{gset.label}]')

    def tensor(self, other: 'MatrixModule') -> 'MatrixModule':
        if other.ctx != self.ctx:
            raise LevelContextError('Tensor factors live in different contexts')

        def action(row: np.ndarray) -> Matrix:
            return np.kron(self.action_matrix(row), other.action_matrix(row)) % self.p

        return MatrixModule(self.group, self.dim * other.dim, action, 'tensor', f'{self.label} (x) {other.label}')


class PermutationQuotientModule(GModule):
    def __init__(
        self,
        gset: GSet,
        group: SubgroupRealization,
        relators: Optional[Matrix] = None,
        provenance: str = 'regular',
        label: Optional[str] = None,
    ) -> None:
        super().__init__(group, provenance, label or f'F_p[{gset.label}]')
        self.gset = gset
        if relators is None:
            relators = np.zeros((0, gset.size), dtype=np.int64)
        self.relators = np.atleast_2d(np.asarray(relators, dtype=np.int64)) % self.p
        if self.relators.shape[1] != gset.size:
            raise ParameterError(f'Relators of length {self.relators.shape[1]} on a G-set of size {gset.size}')
        self._relation_space: Optional[FpSubspace] = None
        self._dim: Optional[int] = None

    @property
    def dim(self) -> int:
        if self._dim is None:
            size = self.gset.size
            if self._relation_space is not None:
                self._dim = size - self._relation_space.dim
            elif not self.relators.size:
                self._dim = size
            else:
                ensure_dimension(size, self.label)
                relations = self._projected_relations(np.arange(size), size, self.group.table.rows)
                self._dim = size - rank(relations, self.p)
        return self._dim

    def relation_space(self) -> FpSubspace:
        """Q = span{g r}, over every group element."""
        if self._relation_space is None:
            ensure_dimension(self.gset.size, self.label)
            rows = self._projected_relations(np.arange(self.gset.size), self.gset.size, self.group.table.rows)
            self._relation_space = FpSubspace(rows, self.p, self.gset.size)
        return self._relation_space

    def _projected_relations(self, labels: np.ndarray, classes: int, element_rows: np.ndarray) -> Matrix:
        """Rows pi(g r) for each element g and relator r, pi summing over label classes."""
        blocks = []
        for relator in self.relators:
            support = np.nonzero(relator)[0]
            if not support.size:
                continue
            values = relator[support]
            chunk = max(1, IMAGE_CHUNK_ENTRIES // support.size)
            for start in range(0, element_rows.shape[0], chunk):
                images = self.gset.images(element_rows[start:start + chunk], support)
                count = images.shape[0]
                targets = (np.arange(count)[:, None] * classes + labels[images]).reshape(-1)
                sums = np.bincount(targets, weights=np.tile(values, count), minlength=count * classes)
                blocks.append(sums.astype(np.int64).reshape(count, classes) % self.p)
        if not blocks:
            return np.zeros((0, classes), dtype=np.int64)
        return np.vstack(blocks)

    def _coinvariant_dimension(self, sub: SubgroupRealization, exhaustive: bool) -> int:
        if not exhaustive and self.relators.size and self._is_regular():
            return self._reduced_coinvariant_dimension(sub)
        # M_T = F_p[T\Omega] / pi(Q), and pi(g r) only depends on the coset T g.
        acting = sub.table.rows if exhaustive else sub.generators
        classes, labels = orbit_labels(self.gset.images(acting), self.gset.size)
        if not self.relators.size:
            return classes
        ensure_dimension(classes, f'{self.label} coinvariants')
        representatives = self.group.table.rows if exhaustive else coset_representatives(self.group, sub, 'right')
        relations = self._projected_relations(labels, classes, representatives)
        return classes - rank(relations, self.p)

    def _is_regular(self) -> bool:
        return isinstance(self.gset, RegularGSet) and self.gset.group is self.group

    def _reduced_coinvariant_dimension(self, sub: SubgroupRealization) -> int:
        """M_T for a quotient of the regular module, computed on G / G(p^l) for some G(p^l) inside T.

        With r reduced to F_p[G / G(p^l)], the relation of coset T g is sum_q r_q e_(T g q).
        """
        cosets = reduced_right_cosets(self.group, sub)
        classes, size = cosets.classes, cosets.quotient_size
        ensure_dimension(classes, f'{self.label} coinvariants')
        targets = (np.arange(classes)[:, None] * classes + cosets.products).reshape(-1)
        blocks = []
        for relator in self.relators:
            reduced = np.bincount(cosets.element_labels, weights=relator, minlength=size).astype(np.int64) % self.p
            sums = np.bincount(targets, weights=np.tile(reduced, classes), minlength=classes * classes)
            blocks.append(sums.astype(np.int64).reshape(classes, classes) % self.p)
        return classes - rank(np.vstack(blocks), self.p)

    def to_matrix_module(self) -> MatrixModule:
        """Explicit action on the quotient, coordinates on the free columns of Q."""
        relations = self.relation_space()
        free = np.asarray(relations.free_columns, dtype=np.int64)

        def action(row: np.ndarray) -> Matrix:
            perm = self.gset.permutation(row)
            moved = np.zeros((free.size, self.gset.size), dtype=np.int64)
            moved[np.arange(free.size), perm[free]] = 1
            return relations.quotient_coordinates(moved).T

        return MatrixModule(self.group, int(free.size), action, self.provenance, self.label)

    def tensor(self, other: 'PermutationQuotientModule') -> 'PermutationQuotientModule':
        """Diagonal action on F_p[Omega1 x Omega2] / (Q1 (x) F_p[Omega2] + F_p[Omega1] (x) Q2)."""
        if other.ctx != self.ctx:
            raise LevelContextError('Tensor factors live in different contexts')
        gset = ProductGSet(self.gset, other.gset)
        relators = []
        for relator in self.relators:
            for point in range(other.gset.size):
                basis = np.zeros(other.gset.size, dtype=np.int64)
                basis[point] = 1
                relators.append(np.kron(relator, basis))
        for relator in other.relators:
            for point in range(self.gset.size):
                basis = np.zeros(self.gset.size, dtype=np.int64)
                basis[point] = 1
                relators.append(np.kron(basis, relator))
        stacked = np.vstack(relators) if relators else None
        return PermutationQuotientModule(gset, self.group, stacked, 'tensor', f'{self.label} (x) {other.label}')


def trivial_module(group: SubgroupRealization) -> MatrixModule:
    return MatrixModule.trivial(group)


def regular_module(group: SubgroupRealization) -> PermutationQuotientModule:
    return PermutationQuotientModule(RegularGSet(group), group, None, 'regular', 'regular')


def augmentation_element(group: SubgroupRealization, seed: int) -> np.ndarray:
    """Seeded random element of the augmentation ideal of F_p[group]."""
    rng = np.random.default_rng(seed)
    p = group.ctx.p
    vector = rng.integers(0, p, size=group.order).astype(np.int64)
    identity = group.table.identity_index
    vector[identity] = (vector[identity] - vector.sum()) % p
    return vector % p


def cyclic_module(group: SubgroupRealization, seed: int) -> PermutationQuotientModule:
    """A / A x for the seeded x in the augmentation ideal."""
    x = augmentation_element(group, seed)
    module = PermutationQuotientModule(RegularGSet(group), group, x, 'cyclic-quotient', f'cyclic[seed={seed}]')
    module.spec = CyclicModuleSpec(seed, tuple(int(v) for v in x))
    return module


def coset_module(group: SubgroupRealization, sub: SubgroupRealization) -> PermutationQuotientModule:
    return PermutationQuotientModule(CosetGSet(group, sub), group, None, 'coset', f'F_p[G/{sub.label}]')


def tensor_module(first: GModule, second: GModule) -> GModule:
    """Diagonal action on first (x) second."""
    if isinstance(first, PermutationQuotientModule) and isinstance(second, PermutationQuotientModule):
        return first.tensor(second)
    left = first.to_matrix_module() if isinstance(first, PermutationQuotientModule) else first
    right = second.to_matrix_module() if isinstance(second, PermutationQuotientModule) else second
    return left.tensor(right)
