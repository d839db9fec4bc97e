"""Bulk tally kernels over encoded event arrays.

Every kernel has a numba implementation and a pure-numpy one with identical
output. Set ``TRUSTFILTER_NUMBA=0`` to force the numpy path (it is also used
when numba is not importable).
"""

from __future__ import annotations

import os

import numpy as np

try:
    import numba
except ImportError:  # pragma: no cover - numba is a declared dependency
    numba = None

USE_NUMBA = numba is not None and os.environ.get("TRUSTFILTER_NUMBA", "1").lower() not in ("0", "false", "no")


_DENSE_FACTOR = 8


def _pair_keys(src: np.ndarray, dst: np.ndarray, n: int) -> np.ndarray:
    return src.astype(np.int64) * np.int64(n) + dst.astype(np.int64)


# -- pair tallies -------------------------------------------------------------


def tally_pairs_numpy(keys: np.ndarray, flag: np.ndarray) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    if keys.size == 0:
        empty = np.zeros(0, dtype=np.int64)
        return empty, empty.copy(), empty.copy()
    uniq, inverse = np.unique(keys, return_inverse=True)
    n_true = np.bincount(inverse, weights=flag.astype(np.int64), minlength=uniq.size).astype(np.int64)
    n_all = np.bincount(inverse, minlength=uniq.size).astype(np.int64)
    return uniq.astype(np.int64), n_true, n_all - n_true


def _is_dense(keys: np.ndarray) -> bool:
    # direct addressing pays off when the key range is not much wider than the input
    return int(keys.max()) - int(keys.min()) + 1 <= _DENSE_FACTOR * keys.size + 1024


if numba is not None:

    @numba.njit(cache=True)
    def _tally_dense(keys, flag):
        lo = keys.min()
        span = keys.max() - lo + 1
        seen = np.zeros(span, dtype=np.bool_)
        yes = np.zeros(span, dtype=np.int64)
        no = np.zeros(span, dtype=np.int64)
        for i in range(keys.size):
            k = keys[i] - lo
            seen[k] = True
            if flag[i]:
                yes[k] += 1
            else:
                no[k] += 1
        idx = np.flatnonzero(seen)
        return idx.astype(np.int64) + lo, yes[idx], no[idx]

    @numba.njit(cache=True)
    def _tally_sorted(keys, flag, order):
        n = keys.size
        uniq = np.empty(n, dtype=np.int64)
        n_true = np.zeros(n, dtype=np.int64)
        n_false = np.zeros(n, dtype=np.int64)
        g = -1
        prev = 0
        for i in range(n):
            j = order[i]
            k = keys[j]
            if g < 0 or k != prev:
                g += 1
                uniq[g] = k
                prev = k
            if flag[j]:
                n_true[g] += 1
            else:
                n_false[g] += 1
        m = g + 1
        return uniq[:m].copy(), n_true[:m].copy(), n_false[:m].copy()


def tally_pairs_numba(keys: np.ndarray, flag: np.ndarray) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    if keys.size == 0:
        empty = np.zeros(0, dtype=np.int64)
        return empty, empty.copy(), empty.copy()
    if _is_dense(keys):
        return _tally_dense(keys, flag)
    # numpy's sort beats the one numba compiles, so sort outside the kernel
    return _tally_sorted(keys, flag, np.argsort(keys))


def tally_pairs(src: np.ndarray, dst: np.ndarray, flag: np.ndarray, n: int) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    """Count flagged and unflagged events per directed ``(src, dst)`` index pair.

    Returns ``(keys, n_true, n_false)`` with ``keys = src * n + dst`` sorted
    ascending and unique.
    """
    keys = _pair_keys(np.asarray(src), np.asarray(dst), n)
    flag = np.asarray(flag, dtype=np.bool_)
    if USE_NUMBA:
        return tally_pairs_numba(keys, flag)
    return tally_pairs_numpy(keys, flag)


# -- accepted-before-first-rejection --------------------------------------------


def accepted_before_block_numpy(keys: np.ndarray, accepted: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    if keys.size == 0:
        empty = np.zeros(0, dtype=np.int64)
        return empty, empty.copy()
    order = np.argsort(keys, kind="stable")
    k_sorted = keys[order]
    acc_sorted = accepted[order]
    starts = np.flatnonzero(np.r_[True, k_sorted[1:] != k_sorted[:-1]])
    positions = np.arange(keys.size, dtype=np.int64)
    sentinel = np.int64(keys.size)
    rej_pos = np.where(acc_sorted, sentinel, positions)
    first = np.minimum.reduceat(rej_pos, starts)
    prefix = np.where(first < sentinel, first - starts, -1).astype(np.int64)
    return k_sorted[starts].astype(np.int64), prefix


if numba is not None:

    @numba.njit(cache=True)
    def _block_dense(keys, accepted):
        lo = keys.min()
        span = keys.max() - lo + 1
        # -2 marks keys not present; array order is stream order
        state = np.full(span, -2, dtype=np.int64)
        run = np.zeros(span, dtype=np.int64)
        for i in range(keys.size):
            k = keys[i] - lo
            if state[k] == -2:
                state[k] = -1
            if state[k] >= 0:
                continue
            if accepted[i]:
                run[k] += 1
            else:
                state[k] = run[k]
        idx = np.flatnonzero(state != -2)
        return idx.astype(np.int64) + lo, state[idx]

    @numba.njit(cache=True)
    def _block_sorted(keys, accepted, order):
        n = keys.size
        uniq = np.empty(n, dtype=np.int64)
        prefix = np.empty(n, dtype=np.int64)
        g = -1
        prev = 0
        run = 0
        blocked = False
        for i in range(n):
            j = order[i]
            k = keys[j]
            if g < 0 or k != prev:
                g += 1
                uniq[g] = k
                prefix[g] = -1
                prev = k
                run = 0
                blocked = False
            if blocked:
                continue
            if accepted[j]:
                run += 1
            else:
                prefix[g] = run
                blocked = True
        m = g + 1
        return uniq[:m].copy(), prefix[:m].copy()


def accepted_before_block_numba(keys: np.ndarray, accepted: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    if keys.size == 0:
        empty = np.zeros(0, dtype=np.int64)
        return empty, empty.copy()
    if _is_dense(keys):
        return _block_dense(keys, accepted)
    # the sort must be stable so each pair's events stay in stream order
    return _block_sorted(keys, accepted, np.argsort(keys, kind="stable"))


def accepted_before_block(src: np.ndarray, dst: np.ndarray, accepted: np.ndarray, n: int) -> tuple[np.ndarray, np.ndarray]:
    """Per directed pair, in stream order: accepted events before the first rejection.

    Returns ``(keys, prefix)``; ``prefix`` is -1 for pairs never rejected.
    """
    keys = _pair_keys(np.asarray(src), np.asarray(dst), n)
    accepted = np.asarray(accepted, dtype=np.bool_)
    if USE_NUMBA:
        return accepted_before_block_numba(keys, accepted)
    return accepted_before_block_numpy(keys, accepted)


def warm_up() -> None:
    """Compile the numba kernels now rather than on first use (no-op on the numpy path)."""
    if not USE_NUMBA:
        return
    flag = np.array([True, False])
    for keys in (np.array([0, 1], dtype=np.int64), np.array([0, 10**9], dtype=np.int64)):
        tally_pairs_numba(keys, flag)
        accepted_before_block_numba(keys, flag)
