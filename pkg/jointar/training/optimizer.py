r"""
Adam with decoupled weight decay.

For each tensor receiving a gradient at step $t$ (its own count):

.. math::

    \theta \leftarrow \theta (1 - \eta \lambda_{wd}), \quad
    m \leftarrow \beta_1 m + (1-\beta_1) g, \quad
    v \leftarrow \beta_2 v + (1-\beta_2) g^2, \quad
    \theta \leftarrow \theta - \eta \frac{m / (1-\beta_1^t)}{\sqrt{v/(1-\beta_2^t)} + \epsilon}.

Tensors without a gradient are left untouched, decay included.
"""
from collections import OrderedDict

import numpy as np

STATE_PREFIX = 'optim.'


class AdamW(object):

    def __init__(self, beta1=0.9, beta2=0.95, eps=1e-8, weight_decay=0.01):
        self.beta1 = beta1
        self.beta2 = beta2
        self.eps = eps
        self.weight_decay = weight_decay
        self.m = OrderedDict()
        self.v = OrderedDict()
        self.t = OrderedDict()

    @staticmethod
    def from_config(config):
        return AdamW(config.beta1, config.beta2, config.adam_eps, config.weight_decay)

    def step(self, params, grads, lr):
        """
        Update `params` in place.
        """
        b1, b2 = self.beta1, self.beta2
        for name, g in grads.items():
            p = params[name]
            if name not in self.m:
                self.m[name] = np.zeros_like(p)
                self.v[name] = np.zeros_like(p)
                self.t[name] = 0
            self.t[name] += 1
            t = self.t[name]
            m, v = self.m[name], self.v[name]
            p *= (1 - lr * self.weight_decay)
            m *= b1
            m += (1 - b1) * g
            v *= b2
            v += (1 - b2) * g * g
            mhat = m / (1 - b1**t)
            vhat = v / (1 - b2**t)
            p -= lr * mhat / (np.sqrt(vhat) + self.eps)
        return params

    def state_tensors(self):
        """
        Moments and step counts as named arrays, for checkpoints.
        """
        out = OrderedDict()
        for name in self.m:
            out[STATE_PREFIX + 'm.' + name] = self.m[name]
            out[STATE_PREFIX + 'v.' + name] = self.v[name]
            out[STATE_PREFIX + 't.' + name] = np.array([self.t[name]], np.float64)
        return out

    def load_state(self, tensors):
        """
        Restore from the output of `state_tensors` (prefix included).
        """
        self.m.clear()
        self.v.clear()
        self.t.clear()
        mprefix = STATE_PREFIX + 'm.'
        for key, value in tensors.items():
            if not key.startswith(mprefix):
                continue
            name = key[len(mprefix):]
            self.m[name] = np.array(value)
            self.v[name] = np.array(tensors[STATE_PREFIX + 'v.' + name])
            self.t[name] = int(tensors[STATE_PREFIX + 't.' + name][0])
        return self
