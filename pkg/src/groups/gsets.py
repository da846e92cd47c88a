"""Finite G-sets on which the ambient group acts by permutations."""
from abc import ABC, abstractmethod
from functools import cached_property
from typing import Optional

import numpy as np

from src.groups.level import LevelContext
from src.groups.orbits import class_representatives
from src.groups.subgroups import SubgroupRealization, coset_labels


class GSet(ABC):
    """Points 0..size-1 with a left action of the ambient group."""

    label: str
    ctx: LevelContext

    @property
    @abstractmethod
    def size(self) -> int:
        ...

    @abstractmethod
    def images(self, g_rows: np.ndarray, points: Optional[np.ndarray] = None) -> np.ndarray:
        """images[i, x] = g_i . point x, for x in ``points`` (default: all)."""

    def permutation(self, g_row: np.ndarray) -> np.ndarray:
        return self.images(np.atleast_2d(g_row))[0]


class RegularGSet(GSet):
    """The group acting on itself by left multiplication."""

    def __init__(self, group: SubgroupRealization) -> None:
        self.group = group
        self.ctx = group.ctx
        self.label = f'regular[{group.label}]'

    @property
    def size(self) -> int:
        return self.group.order

    def images(self, g_rows: np.ndarray, points: Optional[np.ndarray] = None) -> np.ndarray:
        return self.group.table.left_images(g_rows, points)


class CosetGSet(GSet):
    """Left cosets x*S of an enumerated subgroup S of the group."""

    def __init__(self, group: SubgroupRealization, sub: SubgroupRealization) -> None:
        self.group = group
        self.sub = sub
        self.ctx = group.ctx
        self.label = f'{group.label}/{sub.label}'

    @cached_property
    def _cosets(self):
        count, labels = coset_labels(self.group, self.sub, side='left')
        return count, labels, class_representatives(labels)

    @property
    def size(self) -> int:
        return self._cosets[0]

    def images(self, g_rows: np.ndarray, points: Optional[np.ndarray] = None) -> np.ndarray:
        _, labels, representatives = self._cosets
        chosen = representatives if points is None else representatives[points]
        return labels[self.group.table.left_images(g_rows, chosen)]


class ProductGSet(GSet):
    """Diagonal action on pairs; point (x, y) is x * |second| + y."""

    def __init__(self, first: GSet, second: GSet) -> None:
        self.first = first
        self.second = second
        self.ctx = first.ctx
        self.label = f'{first.label} x {second.label}'

    @property
    def size(self) -> int:
        return self.first.size * self.second.size

    def images(self, g_rows: np.ndarray, points: Optional[np.ndarray] = None) -> np.ndarray:
        points = np.arange(self.size, dtype=np.int64) if points is None else np.asarray(points, dtype=np.int64)
        outer, inner = np.divmod(points, self.second.size)
        first_images = self.first.images(g_rows, np.unique(outer))
        second_images = self.second.images(g_rows, np.unique(inner))
        outer_pos = np.searchsorted(np.unique(outer), outer)
        inner_pos = np.searchsorted(np.unique(inner), inner)
        return first_images[:, outer_pos] * self.second.size + second_images[:, inner_pos]
