import numpy as np
import pytest
from scipy.integrate import trapezoid

from waveletls.core.wavelet import (
    FILTER_REGISTRY,
    check_filter,
    eval_phi,
    eval_phi_periodized,
    get_evaluator,
    make_filter,
    periodized_block,
)
from waveletls.utils.errors import DomainError, RegistryError, TranslateIndexError

FILTERS = sorted(FILTER_REGISTRY)
SMOOTH_FILTERS = ["db4tap", "coif24tap"]


def dyadic_refinement(h, level):
    """phi on the grid m / 2**level of [0, L-1], refined from its integer values."""
    size = h.size
    last = size - 1
    M = np.zeros((last + 1, last + 1))
    for i in range(last + 1):
        for j in range(last + 1):
            if 0 <= 2 * i - j < size:
                M[i, j] = np.sqrt(2.0) * h[2 * i - j]
    w, V = np.linalg.eig(M)
    v = np.real(V[:, np.argmin(np.abs(w - 1.0))])
    values = v / v.sum()
    for j in range(1, level + 1):
        half = 2 ** (j - 1)
        refined = np.zeros(last * 2**j + 1)
        for m in range(refined.size):
            total = 0.0
            for k in range(size):
                index = m - k * half
                if 0 <= index < values.size:
                    total += h[k] * values[index]
            refined[m] = np.sqrt(2.0) * total
        values = refined
    return values


class TestFilters:
    @pytest.mark.parametrize("name,length", [("haar", 2), ("db4tap", 4), ("coif24tap", 24)])
    def test_registry_lengths(self, name, length):
        f = make_filter(name)
        assert f.length == length
        assert f.support == (0, length - 1)

    @pytest.mark.parametrize("name", FILTERS)
    def test_filter_invariants(self, name):
        h = make_filter(name).h
        assert abs(h.sum() - np.sqrt(2.0)) < 1e-12
        assert abs(np.dot(h, h) - 1.0) < 1e-10
        for m in range(1, h.size // 2):
            assert abs(np.dot(h[: h.size - 2 * m], h[2 * m :])) < 1e-10

    def test_haar_coefficients(self):
        np.testing.assert_allclose(make_filter("haar").h, [1 / np.sqrt(2.0)] * 2, atol=1e-15)

    def test_unknown_filter(self):
        with pytest.raises(RegistryError, match="sym8"):
            make_filter("sym8")
        with pytest.raises(KeyError):
            make_filter("sym8")

    def test_check_filter_rejects_bad_sum(self):
        with pytest.raises(RegistryError):
            check_filter(np.array([1.0, 1.0]))

    def test_check_filter_rejects_odd_length(self):
        with pytest.raises(RegistryError):
            check_filter(np.array([0.5, 0.5, 0.5]))

    def test_filters_are_read_only(self):
        with pytest.raises(ValueError):
            make_filter("db4tap").h[0] = 0.0


class TestEvalPhi:
    def test_haar_is_indicator(self):
        ev = get_evaluator("haar")
        assert eval_phi(ev, 0.3) == 1.0
        assert eval_phi(ev, 0.0) == 1.0
        assert eval_phi(ev, 1.0) == 0.0
        assert eval_phi(ev, -0.2) == 0.0

    def test_haar_is_exactly_one_at_full_depth(self, rng):
        ev = get_evaluator("haar")
        np.testing.assert_array_equal(eval_phi(ev, rng.random(500)), 1.0)

    @pytest.mark.parametrize("name", FILTERS)
    def test_translates_sum_to_one(self, name, rng):
        values = get_evaluator(name).translates(rng.random(200))
        np.testing.assert_allclose(values.sum(axis=1), 1.0, atol=1e-14)

    @pytest.mark.parametrize("name", FILTERS)
    def test_batch_matches_single_points(self, name, rng):
        ev = get_evaluator(name)
        t = rng.random(40)
        batch = ev.translates(t)
        for i in (0, 13, 39):
            np.testing.assert_array_equal(ev.translates(t[i : i + 1])[0], batch[i])

    def test_d4_integer_values(self):
        ev = get_evaluator("db4tap")
        assert eval_phi(ev, 1.0) == pytest.approx((1 + np.sqrt(3.0)) / 2, abs=1e-12)
        assert eval_phi(ev, 2.0) == pytest.approx((1 - np.sqrt(3.0)) / 2, abs=1e-12)
        assert eval_phi(ev, 0.0) == pytest.approx(0.0, abs=1e-12)

    def test_zero_outside_support(self):
        ev = get_evaluator("db4tap")
        assert eval_phi(ev, -0.5) == 0.0
        assert eval_phi(ev, 3.5) == 0.0
        np.testing.assert_array_equal(eval_phi(ev, np.array([-10.0, 100.0])), [0.0, 0.0])

    def test_non_finite_rejected(self):
        ev = get_evaluator("db4tap")
        with pytest.raises(DomainError):
            eval_phi(ev, np.nan)
        with pytest.raises(DomainError):
            eval_phi(ev, np.array([0.5, np.inf]))

    def test_array_shape(self):
        ev = get_evaluator("coif24tap")
        assert eval_phi(ev, np.linspace(0, 23, 7)).shape == (7,)

    def test_d4_matches_dyadic_refinement(self):
        level = 6
        h = make_filter("db4tap").h
        oracle = dyadic_refinement(h, level)
        grid = np.arange(oracle.size) / 2**level
        values = eval_phi(get_evaluator("db4tap"), grid)
        np.testing.assert_allclose(values[:-1], oracle[:-1], atol=1e-8)

    @pytest.mark.parametrize("name", FILTERS)
    def test_two_scale_relation(self, name, rng):
        ev = get_evaluator(name)
        h = ev.filter.h
        x = rng.uniform(0.0, h.size - 1, size=1000)
        refined = sum(np.sqrt(2.0) * h[k] * eval_phi(ev, 2 * x - k) for k in range(h.size))
        np.testing.assert_allclose(eval_phi(ev, x), refined, atol=1e-7)

    @pytest.mark.parametrize("name", FILTERS)
    def test_partition_of_unity(self, name, rng):
        ev = get_evaluator(name)
        x = rng.integers(0, 2**20, size=1000) / 2**20
        total = sum(eval_phi(ev, x + m) for m in range(ev.size))
        np.testing.assert_allclose(total, 1.0, atol=1e-9)

    @pytest.mark.parametrize("name", SMOOTH_FILTERS)
    def test_orthonormal_translates(self, name):
        ev = get_evaluator(name)
        per_unit = 2**12
        grid = np.arange((ev.size) * per_unit + 1) / per_unit
        phi = eval_phi(ev, grid)
        for shift in range(ev.size):
            shifted = np.zeros_like(phi)
            offset = shift * per_unit
            shifted[offset:] = phi[: phi.size - offset]
            inner = trapezoid(phi * shifted, grid)
            assert inner == pytest.approx(1.0 if shift == 0 else 0.0, abs=1e-4)

    def test_haar_orthonormal_by_midpoints(self):
        ev = get_evaluator("haar")
        mid = (np.arange(4096) + 0.5) / 4096
        assert np.mean(eval_phi(ev, mid) ** 2) == pytest.approx(1.0, abs=1e-12)
        assert np.mean(eval_phi(ev, mid) * eval_phi(ev, mid - 1.0)) == 0.0

    def test_product_columns_converge(self, rng):
        ev = get_evaluator("db4tap")
        for x in rng.random(20):
            assert ev.column_spread(x) < 1e-9


class TestPeriodized:
    def test_haar_level_zero(self):
        ev = get_evaluator("haar")
        np.testing.assert_array_equal(eval_phi_periodized(ev, 0, 0, np.array([0.0, 0.4, 1.0])), [1.0, 1.0, 1.0])

    def test_d4_against_direct_sum(self):
        ev = get_evaluator("db4tap")
        expected = 2**1.5 * sum(eval_phi(ev, 8 * (0.7 - l) - 5) for l in (-1, 0, 1))
        assert eval_phi_periodized(ev, 3, 5, 0.7) == pytest.approx(expected, abs=1e-10)

    @pytest.mark.parametrize("name", FILTERS)
    @pytest.mark.parametrize("J", [0, 1, 2, 3, 4])
    def test_rows_sum_to_scale(self, name, J, rng):
        block = periodized_block(get_evaluator(name), J, rng.random(200))
        np.testing.assert_allclose(block.sum(axis=1), 2 ** (J / 2), atol=1e-8)

    @pytest.mark.parametrize("name", SMOOTH_FILTERS)
    @pytest.mark.parametrize("J", [1, 2, 3])
    def test_matches_wrapped_translates(self, name, J, rng):
        ev = get_evaluator(name)
        # dyadic points keep every shifted argument exact
        x = rng.integers(0, 2**16 + 1, size=50) / 2**16
        block = periodized_block(ev, J, x)
        width = 2**J
        for k in range(width):
            direct = sum(
                eval_phi(ev, width * x - width * l - k) for l in range(-ev.filter.length, 2)
            )
            np.testing.assert_allclose(block[:, k], np.sqrt(width) * direct, atol=1e-10)

    def test_translate_range(self):
        ev = get_evaluator("db4tap")
        with pytest.raises(TranslateIndexError):
            eval_phi_periodized(ev, 2, 4, 0.5)
        with pytest.raises(IndexError):
            eval_phi_periodized(ev, 2, -1, 0.5)

    def test_points_outside_unit_interval(self):
        with pytest.raises(DomainError):
            periodized_block(get_evaluator("db4tap"), 2, np.array([0.5, 1.5]))

    def test_negative_level(self):
        with pytest.raises(DomainError):
            periodized_block(get_evaluator("haar"), -1, np.array([0.5]))
