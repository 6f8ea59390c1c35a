from collections import OrderedDict

import numpy as np
import numpy.testing as npt

from ..config import TrainConfig
from ..latent_stats import LatentStats
from ..optimizer import AdamW


def test_first_step():
    opt = AdamW(beta1=0.9, beta2=0.95, eps=0., weight_decay=0.1)
    params = OrderedDict(a=np.array([1., -2.]), b=np.array([3.]))
    grads = OrderedDict(a=np.array([0.5, -4.]))
    opt.step(params, grads, lr=0.1)
    # bias correction makes the first update lr * sign(g)
    npt.assert_allclose(params['a'], np.array([1., -2.]) * (1 - 0.01) - 0.1 * np.sign([0.5, -4.]))
    npt.assert_array_equal(params['b'], [3.])
    assert opt.t == OrderedDict(a=1)


def test_matches_reference_recursion():
    rng = np.random.default_rng(0)
    b1, b2, eps, wd, lr = 0.9, 0.99, 1e-8, 0.05, 0.01
    opt = AdamW(b1, b2, eps, wd)
    p = rng.standard_normal(4)
    params = OrderedDict(w=p.copy())
    m = np.zeros(4)
    v = np.zeros(4)
    for t in range(1, 6):
        g = rng.standard_normal(4)
        opt.step(params, OrderedDict(w=g), lr)
        p = p * (1 - lr * wd)
        m = b1 * m + (1 - b1) * g
        v = b2 * v + (1 - b2) * g**2
        p = p - lr * (m / (1 - b1**t)) / (np.sqrt(v / (1 - b2**t)) + eps)
    npt.assert_allclose(params['w'], p, rtol=1e-12)


def test_per_tensor_step_counts():
    opt = AdamW.from_config(TrainConfig())
    params = OrderedDict(a=np.ones(2), b=np.ones(2))
    opt.step(params, OrderedDict(a=np.ones(2)), 0.1)
    opt.step(params, OrderedDict(a=np.ones(2), b=np.ones(2)), 0.1)
    assert dict(opt.t) == {'a': 2, 'b': 1}


def test_state_roundtrip():
    rng = np.random.default_rng(1)
    opt = AdamW()
    params = OrderedDict(a=rng.standard_normal(3), b=rng.standard_normal((2, 2)))
    for _ in range(3):
        opt.step(params, OrderedDict((k, rng.standard_normal(v.shape)) for k, v in params.items()),
                 0.01)
    restored = AdamW().load_state(opt.state_tensors())
    other = OrderedDict((k, v.copy()) for k, v in params.items())
    g = OrderedDict((k, rng.standard_normal(v.shape)) for k, v in params.items())
    opt.step(params, g, 0.01)
    restored.step(other, g, 0.01)
    for k in params:
        npt.assert_array_equal(params[k], other[k])


def test_latent_stats():
    rng = np.random.default_rng(2)
    tokens = 3 + 2 * rng.standard_normal((50, 16, 4))
    stats = LatentStats.from_tokens(tokens)
    z = stats.standardize(tokens)
    npt.assert_allclose(z.reshape((-1, 4)).mean(0), 0, atol=1e-12)
    npt.assert_allclose(z.reshape((-1, 4)).std(0), 1)
    npt.assert_allclose(stats.destandardize(z), tokens)

    constant = LatentStats.from_tokens(np.ones((3, 4)))
    assert np.all(constant.std > 0)
    again = LatentStats.from_tensors(stats.to_tensors())
    npt.assert_array_equal(again.mean, stats.mean)
