import logging
from dataclasses import dataclass
from enum import Enum
from functools import cached_property, lru_cache
from typing import Iterable, List, Optional, Tuple, Union

import numpy as np

from config.settings import settings
from src.groups.level import GroupElement, LevelContext
from src.groups.matrices import (
    check_key_range,
    conjugate_rows,
    decode,
    embed_copy,
    encode,
    identity_rows,
    multiply_rows,
    stack_rows,
)
from src.groups.orbits import class_representatives, orbit_labels
from src.utils.exceptions import (
    ContainmentError,
    LevelContextError,
    ParameterError,
    ResourceError,
    StructuralError,
)

logger = logging.getLogger(__name__)


class Family(str, Enum):
    G = 'G'
    H = 'H'
    HT = 'HT'
    T = 'T'
    TLJ = 'TLJ'
    CONJ_TLJ_PRIME = 'CONJ_TLJ_PRIME'
    CONJ_TLJ_DOUBLE_PRIME = 'CONJ_TLJ_DOUBLE_PRIME'


LEVEL_FAMILIES = (Family.G, Family.H, Family.HT, Family.T)
PAIR_FAMILIES = (Family.TLJ, Family.CONJ_TLJ_PRIME, Family.CONJ_TLJ_DOUBLE_PRIME)


@dataclass(frozen=True)
class SubgroupSpec:
    """One of the named subgroup families of G = G(p) inside SL2(Z_p)."""

    family: Family
    k: Optional[int] = None
    l: Optional[int] = None
    j: Optional[int] = None

    @classmethod
    def G(cls, k: int) -> 'SubgroupSpec':
        return cls(Family.G, k=k)

    @classmethod
    def H(cls, k: int) -> 'SubgroupSpec':
        return cls(Family.H, k=k)

    @classmethod
    def HT(cls, k: int) -> 'SubgroupSpec':
        return cls(Family.HT, k=k)

    @classmethod
    def T(cls, k: int) -> 'SubgroupSpec':
        return cls(Family.T, k=k)

    @classmethod
    def tlj(cls, l: int, j: int) -> 'SubgroupSpec':
        return cls(Family.TLJ, l=l, j=j)

    @classmethod
    def tlj_prime(cls, l: int, j: int) -> 'SubgroupSpec':
        return cls(Family.CONJ_TLJ_PRIME, l=l, j=j)

    @classmethod
    def tlj_double_prime(cls, l: int, j: int) -> 'SubgroupSpec':
        return cls(Family.CONJ_TLJ_DOUBLE_PRIME, l=l, j=j)

    @property
    def label(self) -> str:
        if self.family in LEVEL_FAMILIES:
            return f'{self.family.value}(p^{self.k})'
        suffix = {Family.TLJ: '', Family.CONJ_TLJ_PRIME: "'", Family.CONJ_TLJ_DOUBLE_PRIME: "''"}
        return f'T({self.l},{self.j}){suffix[self.family]}'

    def validate(self, ctx: LevelContext) -> None:
        if self.family in LEVEL_FAMILIES:
            if self.k is None:
                raise ParameterError(f'{self.family.value} needs a level k')
            ctx.check_level(self.k)
            return

        if self.l is None or self.j is None:
            raise ParameterError(f'{self.family.value} needs a pair (l, j)')
        ctx.check_level(self.l, 'l')
        if not 0 <= self.j <= self.l - 1:
            raise ParameterError(f'j={self.j} must satisfy 0 <= j <= l-1={self.l - 1}')
        if self.family is not Family.TLJ and self.j < 1:
            raise ParameterError('Conjugates of T(l,j) need j >= 1 so that N_j is integral')

    def expected_order(self, ctx: LevelContext) -> int:
        self.validate(ctx)
        p, N = ctx.p, ctx.N
        if self.family is Family.G:
            return p ** (3 * (N - self.k))
        if self.family in (Family.H, Family.HT):
            return p ** (3 * (N - 1) - (self.k - 1))
        if self.family is Family.T:
            return p ** (3 * (N - 1) - 2 * (self.k - 1))
        return p ** (3 * (N - self.l) + self.j)

    def __str__(self) -> str:
        return self.label


@dataclass(frozen=True)
class ProductSubgroupSpec:
    """A product of level families, one level per copy of G."""

    family: Family
    levels: Tuple[int, ...]

    def __post_init__(self) -> None:
        if self.family not in LEVEL_FAMILIES:
            raise ParameterError(f'Product subgroups use level families, not {self.family.value}')
        object.__setattr__(self, 'levels', tuple(int(k) for k in self.levels))

    @property
    def kappa(self) -> int:
        return min(self.levels)

    @property
    def factors(self) -> List[SubgroupSpec]:
        return [SubgroupSpec(self.family, k=k) for k in self.levels]

    @property
    def label(self) -> str:
        return f"{self.family.value}_({','.join(str(k) for k in self.levels)})"

    def validate(self, ctx: LevelContext) -> None:
        if len(self.levels) != ctx.copies:
            raise LevelContextError(f'{self.label} has {len(self.levels)} factors but t={ctx.copies}')
        single = ctx.single()
        for factor in self.factors:
            factor.validate(single)

    def expected_order(self, ctx: LevelContext) -> int:
        self.validate(ctx)
        order = 1
        for factor in self.factors:
            order *= factor.expected_order(ctx.single())
        return order

    def __str__(self) -> str:
        return self.label


AnySpec = Union[SubgroupSpec, ProductSubgroupSpec]


def _torus_generators(ctx: LevelContext, e: int) -> List[GroupElement]:
    # 1 + 2Z_2 is not procyclic, so -1 joins 1 + 2 as a generator of the torus.
    gens = [ctx.diag(1 + ctx.p ** e)]
    if ctx.p == 2 and e == 1:
        gens.append(ctx.element(-1, 0, 0, -1))
    return gens


def subgroup_generators(spec: SubgroupSpec, ctx: LevelContext) -> List[GroupElement]:
    """Generators of the image of ``spec`` in SL2(Z/p^N).

    Every family is lower unipotent x diagonal x upper unipotent, so a torus
    generator and one unipotent generator per off-diagonal entry suffice.
    """
    ctx = ctx.single()
    spec.validate(ctx)
    p = ctx.p
    family = spec.family

    if family is Family.G:
        return [ctx.upper(p ** spec.k), ctx.lower(p ** spec.k)] + _torus_generators(ctx, spec.k)
    if family is Family.H:
        return [ctx.lower(p), ctx.upper(p ** spec.k)] + _torus_generators(ctx, 1)
    if family is Family.HT:
        return [ctx.upper(p), ctx.lower(p ** spec.k)] + _torus_generators(ctx, 1)
    if family is Family.T:
        return [ctx.upper(p ** spec.k), ctx.lower(p ** spec.k)] + _torus_generators(ctx, 1)

    l, j = spec.l, spec.j
    gens = _torus_generators(ctx, l - j) + [ctx.upper(p ** l), ctx.lower(p ** l), ctx.diag(1 + p ** l)]
    if family is Family.TLJ:
        return gens

    conjugator = ctx.upper(p ** (j - 1)) if family is Family.CONJ_TLJ_PRIME else ctx.lower(p ** (j - 1))
    rows = conjugate_rows(conjugator.as_row(), stack_rows([g.as_row() for g in gens], 4), ctx.modulus)
    return [GroupElement.from_row(row, ctx) for row in rows]


def generator_rows(spec: AnySpec, ctx: LevelContext) -> np.ndarray:
    if isinstance(spec, SubgroupSpec):
        return stack_rows([g.as_row() for g in subgroup_generators(spec, ctx)], 4)

    spec.validate(ctx)
    batches = []
    for copy, factor in enumerate(spec.factors):
        single = stack_rows([g.as_row() for g in subgroup_generators(factor, ctx)], 4)
        batches.append(embed_copy(single, copy, ctx.copies))
    return stack_rows(batches, ctx.width)


class ElementTable:
    """Sorted keys and rows of an enumerated subgroup, with index lookup."""

    def __init__(self, rows: np.ndarray, modulus: int) -> None:
        rows = np.atleast_2d(np.asarray(rows, dtype=np.int64))
        keys = encode(rows, modulus)
        order = np.argsort(keys, kind='stable')
        self.modulus = modulus
        self.keys = keys[order]
        self.rows = rows[order]
        self.keys.setflags(write=False)
        self.rows.setflags(write=False)

    @property
    def size(self) -> int:
        return int(self.keys.size)

    @property
    def width(self) -> int:
        return int(self.rows.shape[1])

    def contains(self, rows: np.ndarray) -> np.ndarray:
        keys = encode(rows, self.modulus)
        positions = np.clip(np.searchsorted(self.keys, keys), 0, self.size - 1)
        return self.keys[positions] == keys

    def index_of(self, rows: np.ndarray) -> np.ndarray:
        keys = encode(rows, self.modulus)
        positions = np.clip(np.searchsorted(self.keys, keys), 0, self.size - 1)
        if not np.all(self.keys[positions] == keys):
            raise ContainmentError('Element lies outside the enumerated subgroup')
        return positions.astype(np.int64)

    @cached_property
    def identity_index(self) -> int:
        return int(self.index_of(identity_rows(1, self.width // 4))[0])

    def left_images(self, g_rows: np.ndarray, indices: Optional[np.ndarray] = None) -> np.ndarray:
        """images[i, x] = index of g_i * x for x in ``indices`` (default: all)."""
        g_rows = np.atleast_2d(g_rows)
        points = self.rows if indices is None else self.rows[indices]
        products = multiply_rows(g_rows[:, None, :], points[None, :, :], self.modulus)
        return self.index_of(products.reshape(-1, self.width)).reshape(g_rows.shape[0], -1)

    def right_images(self, g_rows: np.ndarray, indices: Optional[np.ndarray] = None) -> np.ndarray:
        """images[i, x] = index of x * g_i."""
        g_rows = np.atleast_2d(g_rows)
        points = self.rows if indices is None else self.rows[indices]
        products = multiply_rows(points[None, :, :], g_rows[:, None, :], self.modulus)
        return self.index_of(products.reshape(-1, self.width)).reshape(g_rows.shape[0], -1)


def close_under_generators(generators: np.ndarray, modulus: int, width: int, cap: int) -> np.ndarray:
    """Breadth-first closure of the identity under right multiplication by the generators."""
    check_key_range(modulus, width)
    gens = np.unique(np.atleast_2d(generators).reshape(-1, width), axis=0) if np.size(generators) else None
    frontier = identity_rows(1, width // 4)
    known = encode(frontier, modulus)
    if gens is None:
        return frontier

    while frontier.shape[0]:
        products = multiply_rows(frontier[:, None, :], gens[None, :, :], modulus).reshape(-1, width)
        keys, first = np.unique(encode(products, modulus), return_index=True)
        fresh = ~np.isin(keys, known, assume_unique=True)
        frontier = products[first[fresh]]
        known = np.union1d(known, keys[fresh])
        if known.size > cap:
            raise ResourceError(
                f'Subgroup closure passed the enumeration cap {cap}',
                required=int(known.size),
                cap=cap,
            )
    return decode(known, modulus, width)


class SubgroupRealization:
    """Generators of a subgroup of SL2(Z/p^N)^t with lazy enumeration."""

    def __init__(
        self,
        label: str,
        ctx: LevelContext,
        generators: np.ndarray,
        expected_order: Optional[int] = None,
    ) -> None:
        self.label = label
        self.ctx = ctx
        self.generators = np.atleast_2d(np.asarray(generators, dtype=np.int64)).reshape(-1, ctx.width)
        self.generators.setflags(write=False)
        self.expected_order = expected_order
        self._table: Optional[ElementTable] = None

    @classmethod
    def from_elements(cls, label: str, ctx: LevelContext, rows: np.ndarray) -> 'SubgroupRealization':
        table = ElementTable(rows, ctx.modulus)
        realization = cls(label, ctx, minimal_generators(table, ctx), expected_order=table.size)
        realization._table = table
        return realization

    @property
    def is_enumerated(self) -> bool:
        return self._table is not None

    @property
    def table(self) -> ElementTable:
        if self._table is None:
            cap = settings.ENUMERATION_CAP
            if self.expected_order is not None and self.expected_order > cap:
                raise ResourceError(
                    f'{self.label} has order {self.expected_order}, above the enumeration cap {cap}',
                    required=self.expected_order,
                    cap=cap,
                )
            rows = close_under_generators(self.generators, self.ctx.modulus, self.ctx.width, cap)
            self._table = ElementTable(rows, self.ctx.modulus)
            if self.expected_order is not None and self._table.size != self.expected_order:
                raise StructuralError(
                    f'{self.label} enumerated to order {self._table.size}, expected {self.expected_order}'
                )
            logger.debug('Enumerated %s: order %s', self.label, self._table.size)
        return self._table

    @property
    def order(self) -> int:
        return self.table.size

    def contains_rows(self, rows: np.ndarray) -> bool:
        return bool(np.all(self.table.contains(rows)))

    def contains(self, other: 'SubgroupRealization') -> bool:
        _check_same_context(self, other)
        return self.contains_rows(other.generators)

    def generator_elements(self) -> List[GroupElement]:
        if self.ctx.copies != 1:
            raise LevelContextError('Group elements are single-copy; use generator rows for products')
        return [GroupElement.from_row(row, self.ctx) for row in self.generators]

    def random_rows(self, count: int, rng: np.random.Generator) -> np.ndarray:
        return self.table.rows[rng.integers(0, self.order, size=count)]

    def __repr__(self) -> str:
        return f'SubgroupRealization({self.label}, p={self.ctx.p}, N={self.ctx.N})'


def _check_same_context(*subs: SubgroupRealization) -> None:
    contexts = {sub.ctx for sub in subs}
    if len(contexts) > 1:
        raise LevelContextError(f'Subgroups live in different contexts: {sorted(map(str, contexts))}')


def minimal_generators(table: ElementTable, ctx: LevelContext) -> np.ndarray:
    """Greedy generating set: add the first element not yet generated until all are."""
    gens: List[np.ndarray] = []
    generated = encode(identity_rows(1, ctx.copies), ctx.modulus)
    while generated.size < table.size:
        missing = np.nonzero(~np.isin(table.keys, generated))[0]
        gens.append(table.rows[missing[0]])
        rows = close_under_generators(np.vstack(gens), ctx.modulus, ctx.width, settings.ENUMERATION_CAP)
        generated = encode(rows, ctx.modulus)
    return stack_rows(gens, ctx.width)


@lru_cache(maxsize=None)
def realize(spec: AnySpec, ctx: LevelContext) -> SubgroupRealization:
    if isinstance(spec, SubgroupSpec):
        ctx = ctx.single()
    return SubgroupRealization(spec.label, ctx, generator_rows(spec, ctx), spec.expected_order(ctx))


def ambient_group(ctx: LevelContext) -> SubgroupRealization:
    """G = G(p), or its t-fold product, at level N."""
    if ctx.copies == 1:
        return realize(SubgroupSpec.G(1), ctx)
    return realize(ProductSubgroupSpec(Family.G, (1,) * ctx.copies), ctx)


def index(inner: SubgroupRealization, outer: SubgroupRealization) -> int:
    if not outer.contains(inner):
        raise ContainmentError(f'{inner.label} is not contained in {outer.label}')
    return outer.order // inner.order


def same_subgroup(first: SubgroupRealization, second: SubgroupRealization) -> bool:
    _check_same_context(first, second)
    return first.contains(second) and second.contains(first) and first.order == second.order


def join(*subs: SubgroupRealization, label: Optional[str] = None) -> SubgroupRealization:
    _check_same_context(*subs)
    ctx = subs[0].ctx
    gens = np.unique(stack_rows([sub.generators for sub in subs], ctx.width), axis=0)
    return SubgroupRealization(label or '<' + ', '.join(sub.label for sub in subs) + '>', ctx, gens)


def intersection(first: SubgroupRealization, second: SubgroupRealization) -> SubgroupRealization:
    _check_same_context(first, second)
    keys = np.intersect1d(first.table.keys, second.table.keys, assume_unique=True)
    rows = decode(keys, first.ctx.modulus, first.ctx.width)
    return SubgroupRealization.from_elements(f'{first.label} ∩ {second.label}', first.ctx, rows)


def conjugate_realization(sub: SubgroupRealization, g: Union[GroupElement, np.ndarray]) -> SubgroupRealization:
    """The subgroup g sub g^-1."""
    row = g.as_row() if isinstance(g, GroupElement) else np.asarray(g, dtype=np.int64)
    gens = conjugate_rows(row.reshape(1, -1), sub.generators, sub.ctx.modulus)
    return SubgroupRealization(f'{sub.label}^g', sub.ctx, gens, expected_order=sub.expected_order)


def coset_labels(group: SubgroupRealization, sub: SubgroupRealization, side: str = 'left') -> Tuple[int, np.ndarray]:
    """Label the elements of ``group`` by their coset of ``sub``.

    side='left' gives the cosets x*sub, side='right' the cosets sub*x.
    """
    _check_same_context(group, sub)
    if not group.contains(sub):
        raise ContainmentError(f'{sub.label} is not contained in {group.label}')
    table = group.table
    if side == 'left':
        images = table.right_images(sub.generators)
    elif side == 'right':
        images = table.left_images(sub.generators)
    else:
        raise ParameterError(f"side must be 'left' or 'right', got {side!r}")
    return orbit_labels(images, table.size)


def coset_representatives(group: SubgroupRealization, sub: SubgroupRealization, side: str = 'left') -> np.ndarray:
    """Rows of one representative per coset, ordered by coset label."""
    _, labels = coset_labels(group, sub, side)
    return group.table.rows[class_representatives(labels)]


def principal_level(sub: SubgroupRealization) -> int:
    """Smallest l with G(p^l) (in every copy) inside ``sub``; N when only the trivial level fits."""
    ctx = sub.ctx
    for level in range(1, ctx.N):
        if ctx.copies == 1:
            spec: AnySpec = SubgroupSpec.G(level)
        else:
            spec = ProductSubgroupSpec(Family.G, (level,) * ctx.copies)
        if sub.contains_rows(generator_rows(spec, ctx)):
            return level
    return ctx.N


@dataclass(frozen=True)
class ReducedCosets:
    """Right cosets sub*g of a group, read in its image mod p^level.

    ``element_labels[x]`` is the quotient index of group element x and
    ``products[i, q]`` the coset of r_i * q for the i-th coset representative.
    """

    level: int
    element_labels: np.ndarray
    classes: int
    products: np.ndarray

    @property
    def quotient_size(self) -> int:
        return int(self.products.shape[1])


@lru_cache(maxsize=32)
def reduced_right_cosets(group: SubgroupRealization, sub: SubgroupRealization) -> ReducedCosets:
    # G(p^level) is normal and lies in sub, so sub*g only depends on g mod p^level.
    ctx = group.ctx
    level = principal_level(sub)
    modulus = ctx.p ** level
    keys, element_labels = np.unique(encode(group.table.rows % modulus, modulus), return_inverse=True)
    quotient = ElementTable(decode(keys, modulus, ctx.width), modulus)
    classes, class_of = orbit_labels(quotient.left_images(sub.generators % modulus), quotient.size)
    representatives = quotient.rows[class_representatives(class_of)]
    products = class_of[quotient.left_images(representatives)]
    logger.debug('Cosets of %s read mod p^%s: %s classes in %s', sub.label, level, classes, quotient.size)
    return ReducedCosets(level, element_labels.reshape(-1).astype(np.int64), classes, products)


def iter_level_specs(ctx: LevelContext) -> Iterable[SubgroupSpec]:
    for family in LEVEL_FAMILIES:
        for k in range(1, ctx.N + 1):
            yield SubgroupSpec(family, k=k)
    for l in range(1, ctx.N + 1):
        for j in range(l):
            yield SubgroupSpec.tlj(l, j)
