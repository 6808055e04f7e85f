import math

import numpy as np
import pytest

from nhc.errors import ProviderError
from nhc.integrate import IntegratorOptions, default_rtol, integrate, sample_grid


def test_exponential_decay():
    res = integrate(lambda t, y: -y, 0.0, [1.0], 3.0, dt_sample=0.5)
    assert res.failure is None
    assert np.allclose(res.y[:, 0], np.exp(-res.t), rtol=1e-9, atol=0)


def test_complex_rotation():
    res = integrate(lambda t, y: 1j * y, 0.0, np.array([1.0 + 0j]), 2 * math.pi, dt_sample=0.1)
    assert np.allclose(res.y[:, 0], np.exp(1j * res.t), atol=1e-8)


def test_samples_hit_exactly():
    res = integrate(lambda t, y: -y, 0.0, [1.0], 1.0, dt_sample=0.3)
    assert np.array_equal(res.t, sample_grid(0.0, 1.0, 0.3))
    assert res.t[-1] == 1.0 and res.t[1] == 0.3


def test_sample_grid():
    assert np.array_equal(sample_grid(1.0, 1.0, 0.1), [1.0])
    assert len(sample_grid(0.0, 1.0, None)) == 101
    g = sample_grid(0.0, 1.0, 0.25)
    assert np.allclose(g, [0, 0.25, 0.5, 0.75, 1.0])
    with pytest.raises(ValueError):
        sample_grid(1.0, 0.0, 0.1)
    with pytest.raises(ValueError):
        sample_grid(0.0, 1.0, -0.1)


def test_monitor_brackets_crossing():
    res = integrate(lambda t, y: -np.ones_like(y), 0.0, [1.0], 2.0, dt_sample=0.25,
                    monitor=lambda t, y: (y[0] > 0.5, y[0]))
    assert res.failure.reason == "positivity-loss"
    assert abs(res.failure.t - 0.5) <= 1e-3
    assert res.t[-1] <= 0.5


def test_post_step_is_applied():
    seen = []

    def post(y):
        seen.append(1)
        return np.abs(y)

    integrate(lambda t, y: -y, 0.0, [1.0], 1.0, dt_sample=0.5, post_step=post)
    assert seen


def test_step_underflow_reported():
    res = integrate(lambda t, y: y * y, 0.0, [1.0], 2.0, dt_sample=0.1)
    assert res.failure is not None and res.failure.reason == "step-failure"
    assert res.failure.t == pytest.approx(1.0, abs=1e-3)


def test_provider_failure_reported():
    def rhs(t, y):
        if t > 0.5:
            raise ProviderError("no data")
        return -y

    res = integrate(rhs, 0.0, [1.0], 1.0, dt_sample=0.1)
    assert res.failure.reason == "provider-failure"


def test_tolerance_environment_override(monkeypatch):
    monkeypatch.setenv("NHC_DEFAULT_TOL", "1e-6")
    assert default_rtol() == 1e-6
    assert IntegratorOptions().rtol == 1e-6
    monkeypatch.setenv("NHC_DEFAULT_TOL", "-1")
    with pytest.raises(ValueError):
        default_rtol()
    monkeypatch.delenv("NHC_DEFAULT_TOL")
    assert default_rtol() == 1e-9


def test_looser_tolerance_takes_fewer_steps():
    rhs = lambda t, y: np.array([y[1], -y[0]])
    tight = integrate(rhs, 0.0, [1.0, 0.0], 10.0, dt_sample=10.0, opts=IntegratorOptions(rtol=1e-10))
    loose = integrate(rhs, 0.0, [1.0, 0.0], 10.0, dt_sample=10.0, opts=IntegratorOptions(rtol=1e-5))
    assert loose.n_steps < tight.n_steps
