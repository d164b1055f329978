import numpy as np
import pytest

from sktap.quadrature import InvalidDimensionError, gauss_expect, normal_nodes


class TestNodes:
    @pytest.mark.parametrize("order", [2, 5, 80, 200])
    def test_weights_sum_to_one(self, order):
        x, w = normal_nodes(order)
        assert x.shape == w.shape == (order,)
        np.testing.assert_allclose(w.sum(), 1.0, rtol=1e-14)

    def test_read_only(self):
        x, w = normal_nodes(10)
        with pytest.raises(ValueError):
            w[0] = 1.0


class TestGaussExpect:
    @pytest.mark.parametrize("order", [2, 3, 40, 80])
    def test_constant(self, order):
        assert gauss_expect(lambda z: np.ones_like(z), order=order) == pytest.approx(1.0, abs=1e-14)

    @pytest.mark.parametrize("order", [2, 3, 80])
    def test_second_moment(self, order):
        assert gauss_expect(lambda z: z**2, order=order) == pytest.approx(1.0, abs=1e-13)

    def test_fourth_moment(self):
        assert gauss_expect(lambda z: z**4, order=10) == pytest.approx(3.0, abs=1e-12)

    def test_independence_2d(self):
        assert gauss_expect(lambda a, b: a * b, d=2, order=20) == pytest.approx(0.0, abs=1e-14)

    def test_3d_product_moments(self):
        val = gauss_expect(lambda a, b, c: a**2 * b**2 * c**2, d=3, order=8)
        assert val == pytest.approx(1.0, abs=1e-12)

    def test_smooth_integrand_matches_closed_form(self):
        # E exp(tZ) = exp(t^2/2)
        assert gauss_expect(lambda z: np.exp(0.7 * z), order=40) == pytest.approx(np.exp(0.245), rel=1e-14)

    @pytest.mark.parametrize("d", [0, 4])
    def test_bad_dimension(self, d):
        with pytest.raises(InvalidDimensionError):
            gauss_expect(lambda *z: 1.0, d=d)

    def test_overflowing_order_rejected(self):
        with pytest.raises(ValueError):
            normal_nodes(1000)
