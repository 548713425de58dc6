import json
import math

import numpy as np
import pytest

from sparse_isotonic.algorithms import RecoveryMethod, ipir_fit
from sparse_isotonic.bench import (
    AnchorModel,
    ExperimentConfig,
    discrepancy_mc,
    estimate_gap_pk,
    gen_anchor_instance,
    gen_noisy_input_instance,
    l2_error_mc,
    load_experiment_config,
    make_rng,
    misclassification_q_mc,
    recovery_experiment,
)
from sparse_isotonic.core import ActiveSet, ArgumentError, ContractError, NoiseModel, SizeGuardError


def threshold(t, d=1, model=NoiseModel.NOISY_OUTPUT, sigma=0.0):
    return AnchorModel(np.full((1, d), t), ActiveSet((0,), d), sigma, model)


def test_noiseless_labels_follow_anchors():
    ds, model = gen_anchor_instance(200, 4, 2, 6, 0.0, 1)
    assert set(np.unique(ds.labels)) <= {0.0, 1.0}
    Z = model.anchors[:, :2]
    expected = np.any(np.all(Z[None] <= ds.features[:, None, :2], axis=2), axis=1)
    assert np.array_equal(ds.labels, expected.astype(float))
    assert model.active.indices == (0, 1)


def test_anchor_at_origin_gives_constant_one():
    model = AnchorModel(np.zeros((1, 3)), ActiveSet((0, 1), 3), 0.5)
    rng = make_rng(4)
    ds = model.sample(500, rng)
    assert np.all(model.f(ds.features) == 1.0)
    noise = ds.labels - 1.0
    assert abs(noise.mean()) < 0.1 and noise.std() == pytest.approx(0.5, rel=0.1)


def test_generator_is_deterministic():
    a, _ = gen_anchor_instance(50, 5, 3, 10, 0.3, (7, 50, 5, 0))
    b, _ = gen_anchor_instance(50, 5, 3, 10, 0.3, (7, 50, 5, 0))
    c, _ = gen_anchor_instance(50, 5, 3, 10, 0.3, (7, 50, 5, 1))
    assert a.features.tobytes() == b.features.tobytes()
    assert a.labels.tobytes() == b.labels.tobytes()
    assert a.features.tobytes() != c.features.tobytes()


def test_generator_validation():
    with pytest.raises(ArgumentError):
        gen_anchor_instance(10, 2, 3, 1, 0.1, 0)
    with pytest.raises(ArgumentError):
        gen_anchor_instance(10, 3, 1, 1, -0.1, 0)


def test_noisy_input_without_noise():
    ds, model = gen_noisy_input_instance(300, 4, 2, 5, 0.0, 2)
    assert np.array_equal(ds.labels, model.f(ds.features))
    assert ds.noise_model is NoiseModel.NOISY_INPUT


def test_noisy_input_unreachable_anchor():
    model = AnchorModel(np.ones((1, 3)), ActiveSet((0, 1, 2), 3), 0.0, NoiseModel.NOISY_INPUT)
    ds = model.sample(200, make_rng(0))
    assert np.all(ds.labels == 0.0)


def test_l2_error_examples():
    ds, model = gen_anchor_instance(150, 2, 2, 4, 0.0, 8)
    fit = ipir_fit(ds, 2)
    assert l2_error_mc(fit, fit, 5000, 0).value == 0.0
    zero = lambda X: np.zeros(X.shape[0])
    est = l2_error_mc(zero, threshold(0.0), 5000, 1)
    assert est.value == pytest.approx(1.0)
    est = l2_error_mc(threshold(0.6), threshold(0.5), 200_000, 2)
    assert abs(est.value - math.sqrt(0.1)) < 3 * est.stderr


def test_discrepancy_examples():
    a = threshold(0.3)
    assert discrepancy_mc(a, a, 1000, 0).value == 0.0
    comp = lambda X: (X[:, 0] < 0.3).astype(float)
    assert discrepancy_mc(a, comp, 1000, 0).value == 1.0
    est = discrepancy_mc(a, threshold(0.7), 100_000, 1)
    assert abs(est.value - 0.4) < 3 * est.stderr


def test_misclassification_examples():
    truth = threshold(0.5, model=NoiseModel.NOISY_INPUT)
    assert misclassification_q_mc(truth, truth, 2000, 0).value == 0.0
    zero = lambda X: np.zeros(X.shape[0])
    est = misclassification_q_mc(zero, truth, 100_000, 1)
    assert abs(est.value - 0.5) < 3 * est.stderr
    noisy = threshold(0.5, model=NoiseModel.NOISY_INPUT, sigma=0.1)
    floor = misclassification_q_mc(noisy, noisy, 100_000, 2)
    assert 0.0 < floor.value < 0.2
    with pytest.raises(ContractError):
        misclassification_q_mc(zero, threshold(0.5), 10, 0)


def test_gap_examples():
    est = estimate_gap_pk(threshold(0.5), 0, 100_000, 3)
    assert abs(est.value - 0.5) < 3 * est.stderr
    _, model = gen_anchor_instance(10, 5, 3, 10, math.sqrt(0.1), 4)
    for k in (3, 4):
        est = estimate_gap_pk(model, k, 100_000, (4, k))
        assert abs(est.value) < 3 * est.stderr


def test_recovery_noiseless_all_methods():
    cfg = ExperimentConfig(ns=(200, 250), ds=(5,), sigma=0.0, trials=2, seed=7)
    table = recovery_experiment(cfg)
    for m in cfg.methods:
        for n in cfg.ns:
            assert table.percent(m, n, 5) == 100.0


def test_recovery_is_deterministic_and_order_free():
    cfg = ExperimentConfig(ns=(40, 60), ds=(5, 6), trials=3, seed=3)
    a = recovery_experiment(cfg)
    b = recovery_experiment(cfg, workers=2)
    assert a.to_csv() == b.to_csv()
    assert a.to_json() == b.to_json()
    header = a.to_csv().splitlines()[0]
    assert header == "n,ipir_d5,ipir_d6,lpsr_d5,lpsr_d6,slpsr_d5,slpsr_d6"
    payload = json.loads(a.to_json())
    assert len(payload["trials"]) == 2 * 2 * 3 * 3


def test_budget_guard():
    cfg = ExperimentConfig(ns=(50,), ds=(60,), s=5, trials=20, max_solver_calls=1000)
    with pytest.raises(SizeGuardError):
        recovery_experiment(cfg)


def test_config_loading(repo, tmp_path):
    cfg = load_experiment_config(repo / "configs" / "table1.cfg")
    assert cfg.ns == (50, 100, 150, 200, 250)
    assert cfg.ds == (5, 10, 20, 50)
    assert cfg.sigma == pytest.approx(math.sqrt(0.1))
    assert cfg.methods == (RecoveryMethod.IPIR, RecoveryMethod.LPSR, RecoveryMethod.SLPSR)
    assert load_experiment_config(repo / "configs" / "table1.cfg", trials=3).trials == 3
    path = tmp_path / "v.cfg"
    path.write_text("[experiment]\nvariance = 0.25\nd = 5\n")
    assert load_experiment_config(path).sigma == pytest.approx(0.5)
    path.write_text("[experiment]\nbogus = 1\n")
    with pytest.raises(ArgumentError):
        load_experiment_config(path)
    path.write_text("[other]\n")
    with pytest.raises(ArgumentError):
        load_experiment_config(path)
    path.write_text("[experiment]\nn = 10, x\n")
    with pytest.raises(ArgumentError):
        load_experiment_config(path)


@pytest.mark.slow
def test_recovery_rate_grows_with_n():
    cfg = ExperimentConfig(ns=(30, 60, 120), ds=(5,), trials=50, seed=11)
    table = recovery_experiment(cfg)
    for m in cfg.methods:
        rates = [table.percent(m, n, 5) for n in cfg.ns]
        assert all(b >= a - 5 for a, b in zip(rates, rates[1:])), (m, rates)
