from typing import Tuple

import numpy as np
from scipy.sparse import coo_matrix
from scipy.sparse.csgraph import connected_components


def canonical_labels(labels: np.ndarray) -> np.ndarray:
    """Renumber labels so classes appear in order of their smallest member."""
    _, first, inverse = np.unique(labels, return_index=True, return_inverse=True)
    rank = np.empty(first.size, dtype=np.int64)
    rank[np.argsort(first, kind='stable')] = np.arange(first.size)
    return rank[inverse.reshape(-1)]


def orbit_labels(images: np.ndarray, size: int) -> Tuple[int, np.ndarray]:
    """Orbits of the group generated by the given point maps.

    ``images`` has one row per generator with ``images[g, x]`` the image of x.
    Orbits of a finite group are the weakly connected components of the graph
    with edges x -> g(x).
    """
    images = np.atleast_2d(np.asarray(images, dtype=np.int64))
    if images.size == 0:
        return size, np.arange(size, dtype=np.int64)

    sources = np.tile(np.arange(size, dtype=np.int64), images.shape[0])
    targets = images.reshape(-1)
    graph = coo_matrix(
        (np.ones(sources.size, dtype=np.int8), (sources, targets)),
        shape=(size, size),
    ).tocsr()
    count, labels = connected_components(graph, directed=True, connection='weak')
    return int(count), canonical_labels(labels)


def class_representatives(labels: np.ndarray) -> np.ndarray:
    """Smallest index in each class, ordered by class label."""
    _, first = np.unique(labels, return_index=True)
    return first.astype(np.int64)
