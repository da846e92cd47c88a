# Vectorised arithmetic on batches of elements of SL2(Z/q)^t.
#
# An element of the t-fold product is a row of 4t integers, copy i occupying
# columns 4i..4i+3 as (a, b, c, d). Rows are keyed by their base-q digits.
import logging
from typing import Iterable

import numpy as np

from src.utils.exceptions import ResourceError

logger = logging.getLogger(__name__)

MAX_KEY = np.iinfo(np.int64).max


def check_key_range(modulus: int, width: int) -> None:
    if modulus ** width > MAX_KEY:
        raise ResourceError(
            f'Elements with {width} entries mod {modulus} cannot be keyed in 64 bits',
            required=modulus ** width,
            cap=int(MAX_KEY),
        )


def multiply_rows(left: np.ndarray, right: np.ndarray, modulus: int) -> np.ndarray:
    """Copywise product of two equally shaped batches (broadcasting allowed)."""
    left = np.asarray(left, dtype=np.int64)
    right = np.asarray(right, dtype=np.int64)
    a1, b1, c1, d1 = (left[..., i::4] for i in range(4))
    a2, b2, c2, d2 = (right[..., i::4] for i in range(4))

    shape = np.broadcast_shapes(left.shape, right.shape)
    out = np.empty(shape, dtype=np.int64)
    out[..., 0::4] = (a1 * a2 + b1 * c2) % modulus
    out[..., 1::4] = (a1 * b2 + b1 * d2) % modulus
    out[..., 2::4] = (c1 * a2 + d1 * c2) % modulus
    out[..., 3::4] = (c1 * b2 + d1 * d2) % modulus
    return out


def invert_rows(rows: np.ndarray, modulus: int) -> np.ndarray:
    rows = np.asarray(rows, dtype=np.int64)
    out = np.empty_like(rows)
    out[..., 0::4] = rows[..., 3::4]
    out[..., 1::4] = (-rows[..., 1::4]) % modulus
    out[..., 2::4] = (-rows[..., 2::4]) % modulus
    out[..., 3::4] = rows[..., 0::4]
    return out


def conjugate_rows(g: np.ndarray, rows: np.ndarray, modulus: int) -> np.ndarray:
    """g x g^-1 for every row x."""
    return multiply_rows(multiply_rows(g, rows, modulus), invert_rows(g, modulus), modulus)


def identity_rows(count: int, copies: int) -> np.ndarray:
    return np.tile(np.array([1, 0, 0, 1] * copies, dtype=np.int64), (count, 1))


def encode(rows: np.ndarray, modulus: int) -> np.ndarray:
    rows = np.atleast_2d(np.asarray(rows, dtype=np.int64))
    keys = np.zeros(rows.shape[0], dtype=np.int64)
    for column in range(rows.shape[1]):
        keys = keys * modulus + rows[:, column]
    return keys


def decode(keys: np.ndarray, modulus: int, width: int) -> np.ndarray:
    keys = np.asarray(keys, dtype=np.int64).copy()
    rows = np.empty((keys.size, width), dtype=np.int64)
    for column in range(width - 1, -1, -1):
        rows[:, column] = keys % modulus
        keys //= modulus
    return rows


def embed_copy(rows: np.ndarray, copy: int, copies: int) -> np.ndarray:
    """Place single-copy rows in copy ``copy`` of the t-fold product."""
    rows = np.atleast_2d(np.asarray(rows, dtype=np.int64))
    out = identity_rows(rows.shape[0], copies)
    out[:, 4 * copy:4 * copy + 4] = rows
    return out


def stack_rows(batches: Iterable[np.ndarray], width: int) -> np.ndarray:
    batches = [np.atleast_2d(batch) for batch in batches if np.size(batch)]
    if not batches:
        return np.zeros((0, width), dtype=np.int64)
    return np.vstack(batches).astype(np.int64)
