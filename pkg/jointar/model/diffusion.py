r"""
Per-token diffusion head.

A small MLP predicts the noise $\epsilon$ added to a continuous token
$x_0$ given the noisy token $x_t$, the backbone output $z$ and a
sinusoidal embedding of $t$:

.. math::

    x_t = \sqrt{\bar\alpha_t}\, x_0 + \sqrt{1-\bar\alpha_t}\,\epsilon,
    \qquad
    L = \|\hat\epsilon(x_t, t, z) - \epsilon\|^2 / \text{token\_dim}.

Sampling runs ancestral DDPM steps over a strided subset of the
training timesteps, starting from $N(0, I)$.
"""
import numpy as np

from ..utils.tools import timethis
from .layers import silu_forward, silu_backward, linear_grads
from .params import DIFFUSION_PREFIX

COSINE_OFFSET = 0.008
MAX_BETA = 0.999


class DiffusionSchedule(object):

    def __init__(self, T_train=1000, sample_steps=100, x0_clip=5.):
        """
        Cosine noise schedule.

        Parameters
        ----------

        T_train : int
            Number of training timesteps, at least 10.

        sample_steps : int
            Length of the strided sampling subsequence, in [1, T_train].

        x0_clip : float
            Bound applied to the predicted clean token during sampling.
        """
        if T_train < 10:
            raise ValueError('T_train must be at least 10')
        if not 1 <= sample_steps <= T_train:
            raise ValueError('sample_steps must be in [1, T_train]')
        self.T_train = T_train
        self.sample_steps = sample_steps
        self.x0_clip = x0_clip

        s = COSINE_OFFSET
        grid = np.arange(T_train + 1) / T_train
        f = np.cos((grid + s) / (1 + s) * np.pi / 2)**2
        alpha_bar = f / f[0]
        betas = np.clip(1 - alpha_bar[1:] / alpha_bar[:-1], 0, MAX_BETA)
        self.betas = np.concatenate([[0.], betas])
        self.alpha_bar = np.concatenate([[1.], np.cumprod(1 - betas)])

        # timesteps[0] = 0 is the clean end of the chain
        self.timesteps = np.round(np.linspace(0, T_train, sample_steps + 1)).astype(int)

    @staticmethod
    def from_config(config, sample_steps=None):
        return DiffusionSchedule(config.T_train,
                                 sample_steps or config.sample_steps,
                                 config.x0_clip)

    def noise(self, x0, t, eps):
        ab = self.alpha_bar[t][..., None]
        return np.sqrt(ab) * x0 + np.sqrt(1 - ab) * eps

    def posterior(self, x_t, x0_hat, t, t_prev):
        """
        Mean and variance of q(x_{t_prev} | x_t, x0_hat).
        """
        ab_t = self.alpha_bar[t]
        ab_prev = self.alpha_bar[t_prev]
        alpha = ab_t / ab_prev
        beta = 1 - alpha
        mean = (np.sqrt(ab_prev) * beta / (1 - ab_t) * x0_hat +
                np.sqrt(alpha) * (1 - ab_prev) / (1 - ab_t) * x_t)
        var = beta * (1 - ab_prev) / (1 - ab_t)
        return mean, var


def timestep_embedding(t, d_time):
    """
    Sinusoidal embedding [cos(t w), sin(t w)] with geometric frequencies.
    """
    t = np.asarray(t, float)
    half = d_time // 2
    freqs = np.exp(-np.log(10000.) * np.arange(half) / half)
    args = t[..., None] * freqs
    return np.concatenate([np.cos(args), np.sin(args)], axis=-1)


class DiffusionHead(object):

    """
    Noise-prediction MLP over concat(x_t, z, temb(t)).
    """

    def __init__(self, params, d_time):
        self.params = params
        self.d_time = d_time
        self.token_dim = params[DIFFUSION_PREFIX + 'w3'].shape[1]
        self.d_model = (params[DIFFUSION_PREFIX + 'w1'].shape[0]
                        - self.token_dim - d_time)

    @staticmethod
    def from_params(params, config):
        return DiffusionHead(params, config.d_time)

    def _weights(self, name):
        return self.params[DIFFUSION_PREFIX + name]

    def forward(self, x_t, t, z):
        dtype = self._weights('w1').dtype
        temb = timestep_embedding(t, self.d_time).astype(dtype)
        inp = np.concatenate([x_t, z, temb], axis=-1)
        h1, c1 = silu_forward(inp.dot(self._weights('w1')) + self._weights('b1'))
        h2, c2 = silu_forward(h1.dot(self._weights('w2')) + self._weights('b2'))
        out = h2.dot(self._weights('w3')) + self._weights('b3')
        return out, (inp, h1, c1, h2, c2)

    def predict(self, x_t, t, z):
        return self.forward(x_t, t, z)[0]

    def backward(self, cache, dout):
        """
        Gradients of the head parameters and of the conditioning `z`.
        """
        inp, h1, c1, h2, c2 = cache
        grads = {}
        grads[DIFFUSION_PREFIX + 'w3'], grads[DIFFUSION_PREFIX + 'b3'] = linear_grads(h2, dout)
        d2 = silu_backward(c2, dout.dot(self._weights('w3').T))
        grads[DIFFUSION_PREFIX + 'w2'], grads[DIFFUSION_PREFIX + 'b2'] = linear_grads(h1, d2)
        d1 = silu_backward(c1, d2.dot(self._weights('w2').T))
        grads[DIFFUSION_PREFIX + 'w1'], grads[DIFFUSION_PREFIX + 'b1'] = linear_grads(inp, d1)
        dinp = d1.dot(self._weights('w1').T)
        dz = dinp[..., self.token_dim:self.token_dim + self.d_model]
        return grads, dz


def diffusion_loss(head, schedule, x0, z, rng=None, t=None, eps=None, return_grad=False):
    """
    Mean noise-prediction loss over a set of tokens.

    Parameters
    ----------

    head : DiffusionHead or object with `predict(x_t, t, z)`

    schedule : DiffusionSchedule

    x0 : np.float((N, token_dim)) or np.float(token_dim)
        Standardized clean tokens.

    z : np.float((N, d_model)) or np.float(d_model)
        Conditioning backbone outputs.

    rng : np.random.Generator
        Source of t, uniform on {1, ..., T_train}, and of the noise,
        unless both are given.

    t, eps : arrays (optional)
        Fixed timesteps and noise.

    return_grad : bool
        Also return head gradients and the gradient with respect to `z`;
        needs a `DiffusionHead`.

    Returns
    -------

    loss : float
        Mean over tokens of ||eps_hat - eps||^2 / token_dim.
    """
    x0 = np.asarray(x0)
    z = np.asarray(z)
    single = x0.ndim == 1
    x0 = np.atleast_2d(x0)
    z = np.atleast_2d(z)
    N, td = x0.shape
    if t is None:
        t = rng.integers(1, schedule.T_train + 1, size=N)
    if eps is None:
        eps = rng.standard_normal((N, td))
    t = np.asarray(t).reshape(N)
    eps = np.asarray(eps, dtype=x0.dtype).reshape(N, td)
    x_t = schedule.noise(x0, t, eps).astype(x0.dtype)

    if not return_grad:
        eps_hat = head.predict(x_t, t, z)
        return ((eps_hat - eps)**2).sum() / (N * td)

    eps_hat, cache = head.forward(x_t, t, z)
    resid = eps_hat - eps
    loss = (resid**2).sum() / (N * td)
    grads, dz = head.backward(cache, 2 * resid / (N * td))
    if single:
        dz = dz[0]
    return loss, grads, dz


@timethis
def diffusion_sample(head, schedule, z, rng):
    """
    Ancestral sampling of clean tokens conditioned on `z`.

    Parameters
    ----------

    head : DiffusionHead or object with `predict` and `token_dim`

    schedule : DiffusionSchedule

    z : np.float(d_model) or np.float((N, d_model))

    rng : np.random.Generator

    Returns
    -------

    x0 : np.float(token_dim) or np.float((N, token_dim))
    """
    z = np.asarray(z)
    single = z.ndim == 1
    z = np.atleast_2d(z)
    N = z.shape[0]
    x = rng.standard_normal((N, head.token_dim)).astype(z.dtype)
    steps = schedule.timesteps
    clip = schedule.x0_clip
    for i in range(len(steps) - 1, 0, -1):
        t, t_prev = steps[i], steps[i - 1]
        tt = np.full(N, t)
        eps_hat = head.predict(x, tt, z)
        ab = schedule.alpha_bar[t]
        x0_hat = np.clip((x - np.sqrt(1 - ab) * eps_hat) / np.sqrt(ab), -clip, clip)
        mean, var = schedule.posterior(x, x0_hat, t, t_prev)
        if t_prev > 0:
            x = mean + np.sqrt(var) * rng.standard_normal(x.shape)
        else:
            x = mean
        x = x.astype(z.dtype)
    return x[0] if single else x
