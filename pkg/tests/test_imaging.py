import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from uwvo.errors import ParameterError, ShapeError
from uwvo.imaging import (
    EPS_T,
    HazeParams,
    NormalizationParams,
    apply_degradation,
    estimate_ambient,
    estimate_transmission,
    invert,
    normalize_transmission,
    restore_radiance,
)


def full(value, shape=(16, 16, 3)):
    return np.full(shape, value, dtype=float)


class TestForwardModel:
    def test_scalar_example(self):
        out = apply_degradation(full(0.8), np.full((16, 16), 0.5), [0.6, 0.6, 0.6])
        assert np.allclose(out, 0.7)

    def test_unit_transmission_is_identity(self, rng):
        d = rng.random((16, 16, 3))
        assert np.array_equal(apply_degradation(d, np.ones((16, 16)), [0.2, 0.5, 0.6]), d)

    def test_minimal_transmission_approaches_ambient(self, rng):
        d = rng.random((16, 16, 3))
        a = np.array([0.1, 0.4, 0.5])
        out = apply_degradation(d, np.full((16, 16), EPS_T), a)
        assert np.all(np.abs(out - a) <= EPS_T * np.abs(d - a) + 1e-15)

    def test_per_channel_transmission(self):
        t = np.stack([np.full((16, 16), v) for v in (0.2, 0.5, 1.0)], axis=-1)
        out = apply_degradation(full(1.0), t, [0.0, 0.0, 0.0])
        assert np.allclose(out[0, 0], [0.2, 0.5, 1.0])

    def test_shape_mismatch(self):
        with pytest.raises(ShapeError):
            apply_degradation(full(0.5), np.ones((8, 8)), [0.5] * 3)

    def test_restore_example(self):
        d = restore_radiance(full(0.7), np.full((16, 16), 0.5), [0.6] * 3)
        assert np.allclose(d, 0.8)

    def test_restore_constant_ambient(self):
        a = [0.2, 0.4, 0.6]
        img = np.broadcast_to(np.array(a), (16, 16, 3))
        assert np.allclose(restore_radiance(img, np.full((16, 16), 0.3), a), img)

    def test_restore_rejects_tiny_transmission(self):
        with pytest.raises(ParameterError):
            restore_radiance(full(0.5), np.full((16, 16), 1e-4), [0.5] * 3)

    @settings(max_examples=50, deadline=None)
    @given(seed=st.integers(0, 2**31 - 1))
    def test_roundtrip_property(self, seed):
        rng = np.random.default_rng(seed)
        d = rng.random((12, 10, 3))
        t = rng.uniform(0.05, 1.0, (12, 10))
        a = rng.random(3)
        back = restore_radiance(apply_degradation(d, t, a), t, a)
        assert np.max(np.abs(back - d)) < 1e-6


class TestAmbient:
    def test_uniform_image(self):
        c = np.array([0.3, 0.5, 0.7])
        assert np.allclose(estimate_ambient(np.broadcast_to(c, (20, 20, 3))), c)

    def test_black_image(self):
        assert np.array_equal(estimate_ambient(np.zeros((20, 20, 3))), np.zeros(3))

    def test_fully_hazed_region_wins(self, rng):
        # far region equals the ambient light, near region is dim texture
        amb = np.array([0.1, 0.42, 0.5])
        img = rng.uniform(0.0, 0.08, (40, 40, 3))
        img[:10] = amb
        assert np.allclose(estimate_ambient(img, 5), amb, atol=1e-12)


def dark_prior_scene(rng, shape=(64, 64), spacing=4):
    """Bright texture with one black pixel per spacing x spacing block, hazed by a smooth ramp."""
    h, w = shape
    clean = rng.uniform(0.3, 0.9, (h, w, 3))
    clean[::spacing, ::spacing] = 0.0
    t = np.tile(np.linspace(0.2, 0.9, h)[:, None], (1, w))
    amb = np.array([0.2, 0.5, 0.6])
    return apply_degradation(clean, t, amb), t, amb


class TestTransmission:
    def test_black_scene_is_clear(self):
        t = estimate_transmission(np.zeros((16, 16, 3)), [0.5, 0.5, 0.5], 3)
        assert np.allclose(t, 1.0)

    def test_ambient_everywhere_is_fully_hazed(self):
        # dark-channel ratio 1 leaves only the haze retention 1 - omega
        a = np.array([0.2, 0.5, 0.6])
        t = estimate_transmission(np.broadcast_to(a, (16, 16, 3)), a, 3)
        assert np.allclose(t, 0.05)

    def test_bad_parameters(self):
        with pytest.raises(ParameterError):
            estimate_transmission(full(0.5), [0.5, 0.0, 0.5], 3)
        with pytest.raises(ParameterError):
            estimate_transmission(full(0.5), [0.5] * 3, 4)

    def test_range_and_rescale_invariance(self, rng):
        img = rng.uniform(0.1, 0.5, (20, 20, 3))
        a = np.array([0.3, 0.5, 0.6])
        t = estimate_transmission(img, a, 5)
        assert t.min() >= EPS_T and t.max() <= 1.0
        t2 = estimate_transmission(img * 1.5, a * 1.5, 5)
        assert np.allclose(t, t2, atol=1e-12)

    def test_recovers_transmission_when_prior_holds(self, rng):
        img, t, amb = dark_prior_scene(rng)
        est = estimate_transmission(img, amb, 5)
        # each 5x5 window holds a black pixel, so 1 - est = 0.95 * max(1 - t) over the window
        expected = 1.0 - 0.95 * (1.0 - t)
        inner = (slice(4, -4), slice(4, -4))
        assert np.max(np.abs(est[inner] - expected[inner])) < 0.95 * 0.7 / 63 * 2 + 1e-12


class TestInvert:
    def test_values(self):
        assert np.allclose(invert(np.array([[0.5, 1.0]])), [[2.0, 1.0]])

    def test_reciprocal(self, rng):
        t = rng.uniform(0.01, 1.0, (8, 8))
        assert np.allclose(invert(t) * t, 1.0, rtol=0, atol=1e-12)

    def test_rejects_out_of_range(self):
        with pytest.raises(ParameterError):
            invert(np.array([[0.0, 0.5]]))


class TestNormalization:
    def test_alpha_zero_disables_weighting(self, rng):
        t = rng.uniform(0.01, 1.0, (8, 8))
        w = normalize_transmission(invert(t), NormalizationParams(0.0, 3.0))
        assert np.array_equal(w, np.ones_like(t))

    def test_two_pixel_example(self):
        t = np.array([[0.2, 1.0]])
        w = normalize_transmission(invert(t), NormalizationParams(1.0, 4.0))
        assert np.allclose(w, [[0.95, 1.75]])
        assert w.min() >= 0.75 and w.max() <= 1.75

    def test_aqualoc_setting_on_clear_map(self):
        w = normalize_transmission(np.ones((4, 4)), NormalizationParams(0.25, 4.0))
        assert np.allclose(w, 1.1875, rtol=0, atol=1e-15)

    def test_rejects_sigma_at_least_one(self):
        with pytest.raises(ParameterError):
            NormalizationParams(4.0, 4.0)
        with pytest.raises(ParameterError):
            NormalizationParams(-0.1, 4.0)
        with pytest.raises(ParameterError):
            NormalizationParams(0.1, 0.0)

    @settings(max_examples=60, deadline=None)
    @given(seed=st.integers(0, 2**31 - 1), alpha=st.floats(0.0, 3.0), beta=st.floats(3.5, 20.0))
    def test_range_affinity_monotonicity(self, seed, alpha, beta):
        rng = np.random.default_rng(seed)
        t = rng.uniform(EPS_T, 1.0, (9, 7))
        params = NormalizationParams(alpha, beta)
        w = normalize_transmission(invert(t), params)
        tt = 1.0 / invert(t)
        sigma = float(np.max(alpha * tt)) / beta
        assert w.min() >= 1.0 - sigma
        assert w.max() == alpha * tt.max() + 1.0 - sigma
        i, j = rng.integers(0, t.size, 2)
        lhs = w.ravel()[i] - w.ravel()[j]
        assert abs(lhs - alpha * (tt.ravel()[i] - tt.ravel()[j])) < 1e-12
        order = np.argsort(tt.ravel())
        assert np.all(np.diff(w.ravel()[order]) >= 0)
        assert w.min() > 0


def test_haze_params_transmission_decreases_with_depth():
    haze = HazeParams((0.3, 0.2, 0.1), (0.1, 0.4, 0.5))
    t = haze.transmission(np.array([[1.0, 2.0, 5.0]]))
    assert np.all(np.diff(t[0], axis=0) < 0)
