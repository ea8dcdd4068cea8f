"""The accelerated alternating-series oracles, cross-checked by brute force."""

import math

import numpy as np
import pytest

from tauberian_lab.oracles import (
    alternating_partial_sum,
    alternating_sum,
    eta,
    eta_tail,
    log_two,
)


def test_log_two_matches_math():
    assert log_two() == pytest.approx(math.log(2.0), abs=1e-15)


def test_log_two_matches_brute_force():
    # 1e7-term partial sum carries ~5e-8 truncation error of its own
    brute = alternating_partial_sum(1.0, 10_000_000).real
    assert abs(log_two() - brute) <= 1e-7


def test_eta_two_is_pi_squared_over_twelve():
    assert eta(2.0).real == pytest.approx(math.pi ** 2 / 12.0, abs=1e-13)
    assert abs(eta(2.0).imag) < 1e-15


def test_eta_complex_matches_partial_sums():
    for s in (2.0 + 1.0j, 1.5 - 0.5j, 3.0 + 2.0j):
        brute = alternating_partial_sum(s, 1_000_000)
        assert abs(eta(s) - brute) <= 1e-9


def test_eta_vectorized_shape():
    s = np.asarray([1.0 + 0j, 2.0 + 0j, 2.0 + 1.0j])
    vals = eta(s)
    assert vals.shape == (3,)
    assert vals[0].real == pytest.approx(math.log(2.0), abs=1e-14)


def test_eta_tail_complements_partial_sum():
    s = 1.3 + 0.4j
    for first in (2, 7, 12):
        head = alternating_partial_sum(s, first - 1)
        assert abs(head + eta_tail(s, first) - eta(s)) <= 1e-12


def test_eta_tail_rejects_bad_start():
    with pytest.raises(ValueError):
        eta_tail(2.0, 0)


def test_alternating_sum_geometric():
    # sum (-1)^k r^k = 1/(1+r) for |r| < 1
    for r in (0.3, 0.9):
        got = alternating_sum(lambda k, r=r: r ** k.astype(float))
        assert got == pytest.approx(1.0 / (1.0 + r), rel=1e-13)


def test_alternating_sum_batched():
    rs = np.asarray([0.2, 0.5, 0.8])
    got = alternating_sum(lambda k: rs[None, :] ** k[:, None].astype(float))
    np.testing.assert_allclose(got, 1.0 / (1.0 + rs), rtol=1e-13)
