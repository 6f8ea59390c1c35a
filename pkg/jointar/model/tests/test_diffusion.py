import numpy as np
import numpy.testing as npt
import pytest
from scipy.special import expit

from ...tests.decorators import set_sampling_params_iftrue
from ...tests.flags import SMALL_SAMPLES
from ...codec.visual import encode_tokens, decode_tokens
from ...data.scenes import ALL_SPECS, render
from ...evaluation.metrics import toy_fid
from ...training.optimizer import AdamW
from ...tests.instance import tiny_model
from ..config import tiny_config
from ..params import init_params
from ..diffusion import (DiffusionSchedule,
                         DiffusionHead,
                         diffusion_loss,
                         diffusion_sample,
                         timestep_embedding)


def test_schedule():
    schedule = DiffusionSchedule(1000, 100)
    ab = schedule.alpha_bar
    assert ab[0] == 1.
    assert np.all(np.diff(ab) < 0)
    assert ab[-1] < 1e-3
    assert np.all((schedule.betas[1:] > 0) & (schedule.betas[1:] <= 0.999))
    steps = schedule.timesteps
    assert steps[0] == 0 and steps[-1] == 1000 and len(steps) == 101
    assert np.all(np.diff(steps) > 0)

    with pytest.raises(ValueError):
        DiffusionSchedule(5, 1)
    with pytest.raises(ValueError):
        DiffusionSchedule(100, 101)


def test_noise():
    schedule = DiffusionSchedule(50, 10)
    x0 = np.ones((2, 3))
    eps = -np.ones((2, 3))
    npt.assert_array_equal(schedule.noise(x0, np.array([0, 0]), eps), x0)
    x_t = schedule.noise(x0, np.array([10, 50]), eps)
    ab = schedule.alpha_bar[[10, 50]][:, None]
    npt.assert_allclose(x_t, np.sqrt(ab) - np.sqrt(1 - ab) * np.ones((2, 3)))


def test_timestep_embedding():
    emb = timestep_embedding(np.array([0, 7]), 8)
    assert emb.shape == (2, 8)
    npt.assert_allclose(emb[0], [1] * 4 + [0] * 4)
    npt.assert_allclose((emb[:, :4]**2 + emb[:, 4:]**2), 1)


def test_loss_gradient():
    config, params = tiny_model()
    head = DiffusionHead.from_params(params, config)
    schedule = DiffusionSchedule.from_config(config)
    rng = np.random.default_rng(0)
    N = 3
    x0 = rng.standard_normal((N, config.token_dim))
    z = rng.standard_normal((N, config.d_model))
    t = rng.integers(1, config.T_train + 1, size=N)
    eps = rng.standard_normal((N, config.token_dim))
    loss, grads, dz = diffusion_loss(head, schedule, x0, z, t=t, eps=eps, return_grad=True)
    npt.assert_allclose(loss, diffusion_loss(head, schedule, x0, z, t=t, eps=eps))
    h = 1e-6

    for name in ['diffusion.w1', 'diffusion.b2', 'diffusion.w3']:
        direction = rng.standard_normal(params[name].shape)
        shifted = params.copy()
        shifted[name] = params[name] + h * direction
        up = diffusion_loss(DiffusionHead.from_params(shifted, config), schedule, x0, z,
                            t=t, eps=eps)
        shifted[name] = params[name] - h * direction
        down = diffusion_loss(DiffusionHead.from_params(shifted, config), schedule, x0, z,
                              t=t, eps=eps)
        npt.assert_allclose((up - down) / (2 * h), (grads[name] * direction).sum(),
                            rtol=1e-5, atol=1e-8)

    direction = rng.standard_normal(z.shape)
    up = diffusion_loss(head, schedule, x0, z + h * direction, t=t, eps=eps)
    down = diffusion_loss(head, schedule, x0, z - h * direction, t=t, eps=eps)
    npt.assert_allclose((up - down) / (2 * h), (dz * direction).sum(), rtol=1e-5, atol=1e-8)


def test_sample_shapes_and_determinism():
    config, params = tiny_model()
    head = DiffusionHead.from_params(params, config)
    schedule = DiffusionSchedule.from_config(config)
    z = np.random.default_rng(0).standard_normal((4, config.d_model))
    a = diffusion_sample(head, schedule, z, np.random.default_rng(1))
    b = diffusion_sample(head, schedule, z, np.random.default_rng(1))
    assert a.shape == (4, config.token_dim)
    npt.assert_array_equal(a, b)
    one = diffusion_sample(head, schedule, z[0], np.random.default_rng(1))
    assert one.shape == (config.token_dim,)
    assert np.all(np.abs(a) <= 1e3)


class GaussianDenoiser(object):

    """
    Exact noise prediction for x0 ~ N(mu, s^2 I).
    """

    def __init__(self, schedule, mu, s, token_dim):
        self.schedule = schedule
        self.mu, self.s = mu, s
        self.token_dim = token_dim

    def predict(self, x_t, t, z):
        ab = self.schedule.alpha_bar[t][:, None]
        return (np.sqrt(1 - ab) * (x_t - np.sqrt(ab) * self.mu) /
                (ab * self.s**2 + 1 - ab))


class MixtureDenoiser(object):

    """
    Exact noise prediction for x0 ~ (N(-1, s^2) + N(1, s^2)) / 2 per coordinate.
    """

    def __init__(self, schedule, s, token_dim):
        self.schedule = schedule
        self.s = s
        self.token_dim = token_dim

    def predict(self, x_t, t, z):
        ab = self.schedule.alpha_bar[t][:, None]
        var = ab * self.s**2 + 1 - ab
        # posterior weight of the +1 component
        w = expit(2 * np.sqrt(ab) * x_t / var)
        shrink = self.s**2 * np.sqrt(ab) / var
        x0_mean = (w * (1 + shrink * (x_t - np.sqrt(ab))) +
                   (1 - w) * (-1 + shrink * (x_t + np.sqrt(ab))))
        return (x_t - np.sqrt(ab) * x0_mean) / np.sqrt(1 - ab)


@set_sampling_params_iftrue(SMALL_SAMPLES, nsample=500)
def test_sampler_gaussian_target(nsample=4000):
    schedule = DiffusionSchedule(200, 200)
    head = GaussianDenoiser(schedule, mu=1.5, s=0.5, token_dim=2)
    x = diffusion_sample(head, schedule, np.zeros((nsample, 1)), np.random.default_rng(0))
    npt.assert_allclose(x.mean(0), 1.5, atol=0.1)
    npt.assert_allclose(x.var(0), 0.25, rtol=0.25)


@set_sampling_params_iftrue(SMALL_SAMPLES, nsample=500)
def test_sampler_mixture_target(nsample=4000):
    schedule = DiffusionSchedule(200, 200)
    head = MixtureDenoiser(schedule, s=0.1, token_dim=1)
    x = diffusion_sample(head, schedule, np.zeros((nsample, 1)), np.random.default_rng(1))[:, 0]
    assert np.mean(np.abs(np.abs(x) - 1) < 0.4) > 0.95
    npt.assert_allclose(np.mean(x > 0), 0.5, atol=0.1)


class ZeroHead(object):

    def predict(self, x_t, t, z):
        return np.zeros_like(x_t)


class ExactNoiseHead(object):

    """
    Recovers the injected noise from x_t given the clean tokens.
    """

    def __init__(self, schedule, x0):
        self.schedule = schedule
        self.x0 = x0

    def predict(self, x_t, t, z):
        ab = self.schedule.alpha_bar[t][:, None]
        return (x_t - np.sqrt(ab) * self.x0) / np.sqrt(1 - ab)


@set_sampling_params_iftrue(SMALL_SAMPLES, ndraw=2000)
def test_zero_head_loss_is_one(ndraw=10000):
    # E||eps||^2 / token_dim = 1
    schedule = DiffusionSchedule(100, 10)
    rng = np.random.default_rng(5)
    x0 = rng.standard_normal((ndraw, 4))
    loss = diffusion_loss(ZeroHead(), schedule, x0, np.zeros((ndraw, 3)), rng)
    npt.assert_allclose(loss, 1., atol=0.05)


def test_exact_noise_head_loss_is_zero():
    schedule = DiffusionSchedule(100, 10)
    rng = np.random.default_rng(6)
    x0 = rng.standard_normal((500, 4))
    loss = diffusion_loss(ExactNoiseHead(schedule, x0), schedule, x0, np.zeros((500, 3)), rng)
    npt.assert_allclose(loss, 0., atol=1e-20)


def _token_images(tokens):
    return np.array([decode_tokens(t.reshape((16, 16)), 0, 16) for t in tokens])


@set_sampling_params_iftrue(SMALL_SAMPLES, nsample=200)
def test_strided_sampler_matches_full_chain(nsample=500):
    # images whose 16 tokens are jointly N(mu, 0.3^2 I) around a clean render
    mu = encode_tokens(render(ALL_SPECS[17]), 0).reshape(-1)
    full = DiffusionSchedule(1000, 1000)
    strided = DiffusionSchedule(1000, 100)
    z = np.zeros((nsample, 1))

    def images(schedule, seed):
        head = GaussianDenoiser(schedule, mu=mu, s=0.3, token_dim=mu.shape[0])
        return _token_images(diffusion_sample(head, schedule, z, np.random.default_rng(seed)))

    reference = images(full, 0)
    floor = toy_fid(images(full, 1), reference)
    distance = toy_fid(images(strided, 2), reference)
    assert floor > 0
    # the same-size noise floor fluctuates from draw to draw
    assert distance < 2 * floor


def _conditional_target(z, rng, s):
    # mean of x0 given the two one-hot conditions
    means = np.array([[1.25, 0.5], [-0.5, 1.]])
    return means[z.argmax(1)] + s * rng.standard_normal((z.shape[0], 2))


@pytest.mark.slow
def test_trained_head_learns_gaussian_target():
    config = tiny_config(token_dim=2, d_model=4, n_heads=2, head_width=64, d_time=16,
                         T_train=100, sample_steps=100)
    params = init_params(config, np.random.default_rng(0))
    head = DiffusionHead.from_params(params, config)
    schedule = DiffusionSchedule.from_config(config)
    optimizer = AdamW(weight_decay=0.)
    rng = np.random.default_rng(1)
    conditions = np.eye(4)[:2]
    s = 0.5

    for step in range(6000):
        z = conditions[rng.integers(2, size=256)]
        x0 = _conditional_target(z, rng, s)
        _, grads, _ = diffusion_loss(head, schedule, x0, z, rng, return_grad=True)
        optimizer.step(params, grads, 3e-3 if step < 4000 else 1e-3)

    for c, mean in [(0, [1.25, 0.5]), (1, [-0.5, 1.])]:
        z = np.tile(conditions[c], (1000, 1))
        x = diffusion_sample(head, schedule, z, np.random.default_rng(10 + c))
        assert np.all(np.abs(x.mean(0) - mean) < 0.1)
        npt.assert_allclose(x.var(0), s**2, rtol=0.25)
