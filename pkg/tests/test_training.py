import numpy as np
import pytest

from scanorder.cover_merge import dafner_weights, sfc_from_weights
from scanorder.grid import GridSize
from scanorder.learner.anneal import AnnealSchedule, anneal, mean_dafner_weights, set_energy
from scanorder.learner.networks import Evaluator, Generator, NetConfig
from scanorder.learner.training import (
    SGD,
    Adam,
    TrainConfig,
    TrainingDivergedError,
    evaluator_loss,
    ground_truth,
    set_weights,
    train,
)
from scanorder.objectives import LZW, Objective, normalized_objective
from scanorder.order import validate_order

NET = NetConfig(width=4, res_blocks=1, gnn_blocks=2, dtype="float64")


@pytest.fixture(scope="module")
def blobs():
    """Small images with a bright blob, so every order has a defined autocorrelation."""
    rng = np.random.default_rng(0)
    yy, xx = np.mgrid[:8, :8]
    out = []
    for _ in range(12):
        cy, cx = rng.uniform(1, 6, 2)
        out.append(np.exp(-((yy - cy) ** 2 + (xx - cx) ** 2) / 4) + 0.05 * rng.random((8, 8)))
    return np.array(out)


def _cfg(**kw):
    base = dict(batch_size=4, iterations=6, eval_every=3, net=NET, seed=0)
    base.update(kw)
    return TrainConfig(**base)


def test_config_validation():
    with pytest.raises(ValueError):
        TrainConfig(p_dafner=0.7, p_noise=0.4)
    with pytest.raises(ValueError):
        TrainConfig(p_dafner=-0.1)
    with pytest.raises(ValueError):
        TrainConfig(optimizer="rmsprop")
    with pytest.raises(ValueError):
        TrainConfig(lr_schedule="step")
    cfg = TrainConfig()
    assert (cfg.p_dafner, cfg.p_noise, cfg.objective.lags) == (0.25, 0.25, (6,))


def test_evaluator_loss_examples():
    t = np.array([0.2, 0.5, 0.7])
    assert evaluator_loss(t, t) == 0
    assert evaluator_loss(t + 0.1, t) == pytest.approx(0.01)
    assert evaluator_loss([0.1, 0.4, 0.9], [0.3, 0.4, 0.6]) == pytest.approx((0.04 + 0 + 0.09) / 3)


def test_ground_truth_is_the_objective_pipeline(blobs):
    w = np.random.default_rng(1).normal(size=dafner_weights(blobs[0]).shape)
    order = sfc_from_weights(GridSize(8, 8), w)
    for kind in (Objective(), Objective(LZW)):
        np.testing.assert_array_equal(ground_truth(blobs, w, kind), normalized_objective(blobs, order, kind))


def test_training_is_deterministic(blobs):
    a = train(blobs, _cfg(), heldout=blobs[:3])
    b = train(blobs, _cfg(), heldout=blobs[:3])
    assert a.history.evaluator_loss == b.history.evaluator_loss
    assert a.history.generator_loss == b.history.generator_loss
    assert a.history.heldout_objective == b.history.heldout_objective
    for (k, x), (_, y) in zip(a.generator.params.items(), b.generator.params.items()):
        assert np.array_equal(x, y), k


def test_history_shape(blobs):
    res = train(blobs, _cfg(), heldout=blobs[:3])
    h = res.history
    assert h.iteration == list(range(1, 7))
    assert len(h.evaluator_loss) == len(h.generator_loss) == 6
    assert all(np.isfinite(h.evaluator_loss))
    assert h.eval_iteration[-1] == 6
    assert all(-1 <= v <= 0 for v in h.heldout_objective)
    rows = list(h.rows())
    assert rows[2]["heldout_objective"] is not None and rows[0]["heldout_objective"] is None


def test_zero_learning_rates_freeze_parameters(blobs):
    gen, ev = Generator(NET, 3), Evaluator(NET, 4)
    before = {k: v.copy() for k, v in {**gen.params, **{"e" + k: v for k, v in ev.params.items()}}.items()}
    res = train(blobs, _cfg(lr_generator=0.0, lr_evaluator=0.0), heldout=blobs[:3], generator=gen, evaluator=ev)
    after = {**res.generator.params, **{"e" + k: v for k, v in res.evaluator.params.items()}}
    for k, v in before.items():
        np.testing.assert_array_equal(after[k], v)
    assert len(set(res.history.heldout_objective)) == 1


def test_pure_dafner_mixture_targets(blobs, monkeypatch):
    """With p_dafner = 1 every evaluator target comes from mean Dafner weights of the batch."""
    seen = []
    import scanorder.learner.training as tr

    real = tr.ground_truth

    def spy(images, wbar, kind):
        seen.append((images.copy(), np.array(wbar)))
        return real(images, wbar, kind)

    monkeypatch.setattr(tr, "ground_truth", spy)
    train(blobs, _cfg(p_dafner=1.0, p_noise=0.0, iterations=3))
    assert len(seen) == 3
    for images, wbar in seen:
        np.testing.assert_allclose(wbar, mean_dafner_weights(images), atol=1e-12)


def test_divergence_is_reported(blobs):
    gen = Generator(NET, 0)
    for v in gen.params.values():
        v[...] = np.nan
    with pytest.raises(TrainingDivergedError):
        train(blobs, _cfg(), generator=gen)


def test_sgd_momentum_and_clipping():
    gen = Generator(NetConfig(width=2, res_blocks=1, gnn_blocks=1), 0)
    start = {k: v.copy() for k, v in gen.params.items()}
    for g in gen.grads.values():
        g[...] = 1.0
    opt = SGD(gen, lr=0.1, momentum=0.9, clip_norm=1.0)
    norm = opt.step()
    n = sum(v.size for v in gen.params.values())
    assert norm == pytest.approx(np.sqrt(n))
    for k, v in gen.params.items():
        np.testing.assert_allclose(start[k] - v, 0.1 / np.sqrt(n))
    opt.step()  # velocity 0.9 * v + g
    for k, v in gen.params.items():
        np.testing.assert_allclose(start[k] - v, 0.1 / np.sqrt(n) * (1 + 1.9))


def test_adam_first_step_moves_each_coordinate_by_lr():
    gen = Generator(NetConfig(width=2, res_blocks=1, gnn_blocks=1), 0)
    start = {k: v.copy() for k, v in gen.params.items()}
    rng = np.random.default_rng(0)
    for g in gen.grads.values():
        g[...] = rng.normal(size=g.shape)
    Adam(gen, lr=0.01).step()
    for k, v in gen.params.items():
        np.testing.assert_allclose(start[k] - v, 0.01 * np.sign(gen.grads[k]), atol=1e-5)


def test_cosine_schedule_reaches_zero(blobs, monkeypatch):
    rates = []
    real = Adam.step

    def spy(self):
        rates.append(self.lr)
        return real(self)

    monkeypatch.setattr(Adam, "step", spy)
    train(blobs, _cfg(iterations=4, lr_generator=0.2, lr_evaluator=0.2))
    gen_rates = rates[::2]
    assert gen_rates[0] == pytest.approx(0.2)
    assert np.all(np.diff(gen_rates) < 0) and gen_rates[-1] < 0.2 * 0.15


def test_set_weights_is_batch_mean(blobs):
    gen = Generator(NET, 0)
    np.testing.assert_allclose(set_weights(gen, blobs, chunk=5), gen(blobs).mean(0), atol=1e-12)


def test_anneal_zero_steps_returns_dafner_init(blobs):
    res = anneal(blobs[:4], schedule=AnnealSchedule(steps=0))
    np.testing.assert_array_equal(res.weights, mean_dafner_weights(blobs[:4]))
    assert res.energy == res.initial_energy


def test_anneal_improves_and_best_trace_monotone(blobs):
    res = anneal(blobs[:4], schedule=AnnealSchedule(steps=400), seed=2)
    assert res.energy <= res.initial_energy
    assert np.all(np.diff(res.best_trace) <= 0)
    assert res.energy == pytest.approx(set_energy(blobs[:4], res.weights))
    validate_order(sfc_from_weights(GridSize(8, 8), res.weights))


def test_anneal_is_seeded(blobs):
    a = anneal(blobs[:2], schedule=AnnealSchedule(steps=200), seed=5)
    b = anneal(blobs[:2], schedule=AnnealSchedule(steps=200), seed=5)
    np.testing.assert_array_equal(a.weights, b.weights)


def test_mean_dafner_order_is_valid(blobs):
    validate_order(sfc_from_weights(GridSize(8, 8), mean_dafner_weights(blobs)))


def test_schedule_explicit_and_calibrated_temperatures():
    sched = AnnealSchedule(steps=11, t_start=1.0)
    assert sched.temperature(0) == 1.0
    assert sched.temperature(10) == pytest.approx(1e-3)
    with pytest.raises(ValueError):
        AnnealSchedule(steps=11).temperature(0)
    assert AnnealSchedule(steps=11).temperature(10, t_start=2.0) == pytest.approx(2e-3)
