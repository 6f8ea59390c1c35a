import numpy as np
import numpy.testing as npt
import pandas as pd
import pytest

from ...errors import EmptyBatch, GradientCheckFailure
from ...model.diffusion import DiffusionSchedule
from ...model.params import TEXT_HEAD_PREFIX, DIFFUSION_PREFIX
from ...model.config import tiny_config
from ...sequence.batching import collate
from ...tests.instance import tiny_model
from ..gradcheck import grad_check, random_streams, relative_error, GradCheckReport
from ..objective import unified_loss


def _batch(config, n_gen, n_und, seed=0):
    items = random_streams(config, np.random.default_rng(seed), n_gen=n_gen, n_und=n_und)
    return collate(items, config.token_dim, config.d_model, config.dtype)


def _loss(params, batch, config, lambda_text, mode='both', seed=1):
    schedule = DiffusionSchedule.from_config(config)
    return unified_loss(params, batch, config, lambda_text, schedule,
                        np.random.default_rng(seed), mode=mode)


def _has(grads, prefix):
    return any(name.startswith(prefix) for name in grads)


def test_combination():
    config, params = tiny_model()
    batch = _batch(config, 2, 2)
    (L, Lv, Lt), grads = _loss(params, batch, config, 0.3)
    npt.assert_allclose(L, Lv + 0.3 * Lt)
    assert Lv > 0 and Lt > 0
    assert list(grads) == list(params)
    L2, Lv2, Lt2 = _loss(params, batch, config, 0.3, mode='func')
    assert (L2, Lv2, Lt2) == (L, Lv, Lt)


def test_generation_only_batch():
    config, params = tiny_model()
    (L, Lv, Lt), grads = _loss(params, _batch(config, 2, 0), config, 1.)
    assert Lt == 0. and L == Lv
    assert not _has(grads, TEXT_HEAD_PREFIX)
    assert _has(grads, DIFFUSION_PREFIX)


def test_understanding_only_batch():
    config, params = tiny_model()
    (L, Lv, Lt), grads = _loss(params, _batch(config, 0, 2), config, 0.5)
    assert Lv == 0.
    npt.assert_allclose(L, 0.5 * Lt)
    assert not _has(grads, DIFFUSION_PREFIX)
    assert _has(grads, TEXT_HEAD_PREFIX)


def test_zero_lambda_leaves_text_head():
    config, params = tiny_model()
    (L, Lv, Lt), grads = _loss(params, _batch(config, 1, 1), config, 0.)
    assert Lt > 0 and L == Lv
    assert not _has(grads, TEXT_HEAD_PREFIX)


def test_lambda_scales_text_gradient():
    config, params = tiny_model()
    batch = _batch(config, 2, 2, seed=3)
    results = dict((lam, _loss(params, batch, config, lam)) for lam in [0.5, 1., 2.])
    (_, Lv, Lt), g1 = results[1.]
    for lam, ((L, Lv_lam, Lt_lam), _) in results.items():
        assert (Lv_lam, Lt_lam) == (Lv, Lt)
        npt.assert_allclose(L, Lv + lam * Lt)

    g_half, g2 = results[0.5][1], results[2.][1]
    for name in g1:
        if name.startswith(TEXT_HEAD_PREFIX):
            npt.assert_allclose(g2[name], 2 * g1[name], rtol=1e-12, err_msg=name)
            npt.assert_allclose(g_half[name], 0.5 * g1[name], rtol=1e-12, err_msg=name)
        elif name.startswith(DIFFUSION_PREFIX):
            npt.assert_array_equal(g2[name], g1[name], err_msg=name)
            npt.assert_array_equal(g_half[name], g1[name], err_msg=name)
        else:
            # affine in lambda through the backbone
            npt.assert_allclose(g2[name] - g1[name], 2 * (g1[name] - g_half[name]),
                                rtol=1e-6, atol=1e-10, err_msg=name)


def test_errors():
    config, params = tiny_model()
    with pytest.raises(EmptyBatch):
        _loss(params, collate([], config.token_dim, config.d_model), config, 1.)
    with pytest.raises(ValueError):
        _loss(params, _batch(config, 1, 1), config, 1., mode='hessian')


def test_grad_check_passes():
    for lambda_text in [1., 0.]:
        report = grad_check(tiny_config(), lambda_text=lambda_text, n_coords=5)
        assert report.passed, str(report)
        assert len(report.table) == len(tiny_model()[1])
        report.check()


@pytest.mark.slow
def test_grad_check_two_layers():
    config = tiny_config(n_layers=2)
    report = grad_check(config, n_coords=20, seed=3)
    assert report.passed, str(report)


def test_grad_check_report():
    table = pd.DataFrame.from_records([('a', 1e-7, (0,)), ('b', 0.3, (1, 2))],
                                      columns=['name', 'max_rel_error', 'coordinate'])
    report = GradCheckReport(table, 1e-4)
    assert not report.passed
    assert list(report.failures()['name']) == ['b']
    with pytest.raises(GradientCheckFailure) as e:
        report.check()
    assert e.value.name == 'b'
    assert 'FAIL' in str(report)


def test_relative_error():
    assert relative_error(1., 1.) == 0
    npt.assert_allclose(relative_error(2., 1.), 0.5)
    # tiny values are compared in absolute terms
    npt.assert_allclose(relative_error(1e-9, 0.), 1e-4)
