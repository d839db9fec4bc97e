import os
import subprocess
import sys
from collections import Counter

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from trustfilter import _kernels

IMPLS_TALLY = [_kernels.tally_pairs_numpy, _kernels.tally_pairs_numba]
IMPLS_BLOCK = [_kernels.accepted_before_block_numpy, _kernels.accepted_before_block_numba]


def loop_tally(keys, flag):
    yes, no = Counter(), Counter()
    for k, f in zip(keys.tolist(), flag.tolist()):
        (yes if f else no)[k] += 1
        yes[k] += 0
        no[k] += 0
    ks = sorted(yes)
    return ks, [yes[k] for k in ks], [no[k] for k in ks]


def loop_block(keys, accepted):
    first: dict[int, int] = {}
    run = Counter()
    for k, a in zip(keys.tolist(), accepted.tolist()):
        if k in first and first[k] >= 0:
            continue
        first.setdefault(k, -1)
        if a:
            run[k] += 1
        else:
            first[k] = run[k]
    ks = sorted(first)
    return ks, [first[k] for k in ks]


def _arrays(key_strategy):
    return st.integers(0, 400).flatmap(
        lambda n: st.tuples(
            st.lists(key_strategy, min_size=n, max_size=n),
            st.lists(st.booleans(), min_size=n, max_size=n),
        )
    )


# narrow keys take the direct-addressing path, widely spread ones the sorting path
arrays = st.one_of(
    _arrays(st.integers(0, 30)),
    _arrays(st.sampled_from([0, 7, 10**9, 3 * 10**12, 2**40 + 5])),
)


@pytest.mark.parametrize("impl", IMPLS_TALLY, ids=["numpy", "numba"])
@given(data=arrays)
def test_tally_matches_loop(impl, data):
    keys = np.asarray(data[0], dtype=np.int64)
    flag = np.asarray(data[1], dtype=np.bool_)
    k, t, f = impl(keys, flag)
    assert (k.tolist(), t.tolist(), f.tolist()) == loop_tally(keys, flag)


@pytest.mark.parametrize("impl", IMPLS_BLOCK, ids=["numpy", "numba"])
@given(data=arrays)
def test_block_prefix_matches_loop(impl, data):
    keys = np.asarray(data[0], dtype=np.int64)
    acc = np.asarray(data[1], dtype=np.bool_)
    k, p = impl(keys, acc)
    assert (k.tolist(), p.tolist()) == loop_block(keys, acc)


def test_pair_dispatch_encodes_keys():
    src = np.array([0, 1, 0, 0])
    dst = np.array([1, 0, 1, 1])
    keys, acc, rej = _kernels.tally_pairs(src, dst, np.array([True, True, False, True]), 2)
    assert keys.tolist() == [1, 2]
    assert acc.tolist() == [2, 1]
    assert rej.tolist() == [1, 0]


def test_block_example():
    # pair (0,1): A A R A -> 2 before block; pair (1,0) never rejected
    src = np.array([0, 0, 1, 0, 0])
    dst = np.array([1, 1, 0, 1, 1])
    acc = np.array([True, True, True, False, True])
    keys, prefix = _kernels.accepted_before_block(src, dst, acc, 2)
    assert dict(zip(keys.tolist(), prefix.tolist())) == {1: 2, 2: -1}


@pytest.mark.parametrize("spread", [1, 10**7], ids=["dense", "sparse"])
def test_numba_paths_agree_with_numpy(spread):
    rng = np.random.default_rng(spread)
    keys = rng.integers(0, 300, 5000).astype(np.int64) * spread
    flag = rng.random(5000) < 0.6
    for a, b in zip(_kernels.tally_pairs_numpy(keys, flag), _kernels.tally_pairs_numba(keys, flag)):
        assert np.array_equal(a, b)
    for a, b in zip(
        _kernels.accepted_before_block_numpy(keys, flag), _kernels.accepted_before_block_numba(keys, flag)
    ):
        assert np.array_equal(a, b)


@pytest.mark.parametrize(("value", "expected"), [("0", "False"), ("1", "True")])
def test_env_flag_selects_backend(value, expected):
    proc = subprocess.run(
        [sys.executable, "-c", "from trustfilter import _kernels; print(_kernels.USE_NUMBA)"],
        env={**os.environ, "TRUSTFILTER_NUMBA": value},
        capture_output=True,
        text=True,
        check=True,
    )
    assert proc.stdout.strip() == expected
