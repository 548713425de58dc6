import itertools
import json

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from oracles import dominance, dykstra_isotonic, exhaustive_binary_ipir
from sparse_isotonic.algorithms import (
    IpirSearch,
    RecoveryConfig,
    RecoveryMethod,
    Rule,
    SparseFit,
    hinge_objective,
    ipir_fit,
    ipir_search,
    lpsr,
    lpsr_solve,
    predict,
    predict_many,
    recover_support,
    slpsr,
    slpsr_rounds,
    tsir_fit,
    violating_patterns,
)
from sparse_isotonic.bench import gen_anchor_instance, gen_noisy_input_instance
from sparse_isotonic.core import ActiveSet, ArgumentError, Dataset, NoiseModel, SizeGuardError
from sparse_isotonic.exact import FitResult, brute_force_binary, solve_fixed

INPUT = NoiseModel.NOISY_INPUT


def random_input(rng, n, d, levels=4):
    return Dataset(rng.integers(0, levels, size=(n, d)).astype(float), rng.integers(0, 2, n), INPUT)


# ---------------------------------------------------------------- IPIR


def test_ipir_full_support_is_fixed_solver():
    rng = np.random.default_rng(0)
    ds = Dataset(rng.random((15, 3)), rng.random(15))
    fit = ipir_fit(ds, 3)
    ref = solve_fixed(ds, [0, 1, 2])
    assert fit.active.indices == (0, 1, 2)
    assert np.array_equal(fit.fitted, ref.fitted)


def test_ipir_single_coordinate_against_brute_force():
    ds = random_input(np.random.default_rng(3), 10, 3)
    fit = ipir_fit(ds, 1)
    best = min(brute_force_binary(ds, [k]).objective for k in range(3))
    assert fit.objective == best


@settings(max_examples=60)
@given(st.integers(2, 12), st.integers(1, 4), st.data())
def test_ipir_binary_global_optimum(n, d, data):
    s = data.draw(st.integers(1, d))
    rng = np.random.default_rng(data.draw(st.integers(0, 2**32 - 1)))
    ds = random_input(rng, n, d)
    fit = ipir_fit(ds, s)
    assert fit.objective == exhaustive_binary_ipir(ds.features, ds.labels, s)


@settings(max_examples=40)
@given(st.integers(2, 9), st.integers(1, 3), st.data())
def test_ipir_l2_global_optimum(n, d, data):
    s = data.draw(st.integers(1, d))
    rng = np.random.default_rng(data.draw(st.integers(0, 2**32 - 1)))
    X = rng.integers(0, 3, size=(n, d)).astype(float)
    y = rng.random(n)
    fit = ipir_fit(Dataset(X, y), s)
    best = min(
        float(np.sum((y - dykstra_isotonic(y, dominance(X[:, list(A)]))) ** 2))
        for A in itertools.combinations(range(d), s)
    )
    assert fit.objective == pytest.approx(best, abs=1e-8)


@settings(max_examples=25)
@given(st.integers(0, 2**32 - 1), st.sampled_from([NoiseModel.NOISY_OUTPUT, INPUT]))
def test_pruned_search_matches_exhaustive(seed, model):
    ds, _ = gen_anchor_instance(40, 8, 3, 5, 0.3, seed, model)
    a = ipir_search(ds, 3, prune=True)
    b = ipir_search(ds, 3, prune=False)
    assert a.best_subset == b.best_subset
    assert a.best_objective == pytest.approx(b.best_objective, rel=1e-12, abs=1e-12)
    assert b.evaluated == b.subsets == 56
    assert a.evaluated <= b.evaluated


@pytest.mark.parametrize("model", [NoiseModel.NOISY_OUTPUT, INPUT])
def test_pruning_on_larger_instance(model):
    ds, _ = gen_anchor_instance(150, 10, 3, 10, 0.3, 21, model)
    a = ipir_search(ds, 3)
    b = ipir_search(ds, 3, prune=False)
    assert a.best_subset == b.best_subset
    assert a.best_objective == pytest.approx(b.best_objective, rel=1e-12)
    assert a.evaluated < b.evaluated


def test_ipir_tie_goes_to_smallest_subset():
    X = np.tile(np.linspace(0, 1, 6)[:, None], (1, 4))
    ds = Dataset(X, [0, 0, 0, 1, 1, 1], INPUT)
    assert ipir_search(ds, 2).best_subset == (0, 1)
    search = IpirSearch()
    search.offer((2, 3), 1.0)
    search.offer((0, 3), 1.0 + 1e-15)
    search.offer((1, 2), 1.5)
    assert search.best_subset == (0, 3)


def test_ipir_recovers_support_on_generator():
    hits = 0
    for trial in range(5):
        ds, model = gen_anchor_instance(150, 5, 3, 10, np.sqrt(0.1), (7, 150, 5, trial))
        hits += ipir_fit(ds, 3).active == model.active
    assert hits >= 4


def test_ipir_respects_exclusions():
    ds, _ = gen_anchor_instance(60, 5, 2, 5, 0.0, 11)
    assert ipir_search(ds, 2).best_subset == (0, 1)
    excl = RecoveryConfig(RecoveryMethod.IPIR, ((0, 1),))
    best = ipir_search(ds, 2, excl).best_subset
    assert best != (0, 1)


def test_ipir_guards():
    ds = Dataset(np.zeros((3, 64)), [0.0, 0.5, 1.0])
    with pytest.raises(SizeGuardError):
        ipir_search(ds, 5)
    with pytest.raises(ArgumentError):
        ipir_search(ds, 0)
    with pytest.raises(ArgumentError):
        ipir_search(Dataset(np.zeros((3, 2)), [0.0, 0.5, 1.0]), 3)


# ---------------------------------------------------------------- LPSR


def test_lpsr_noiseless_threshold():
    rng = np.random.default_rng(60)
    X = rng.random((60, 5))
    ds = Dataset(X, (X[:, 0] >= 0.5).astype(float))
    assert lpsr(ds, 1).indices == (0,)


def test_lpsr_constant_labels():
    ds = Dataset(np.random.default_rng(0).random((10, 4)), np.full(10, 0.3))
    sol = lpsr_solve(ds, 2)
    assert sol.active.indices == (0, 1)
    assert sol.objective == 0.0


def _violation_counts(ds):
    X, y = ds.features, ds.labels
    counts = np.zeros(ds.d, dtype=int)
    for i in range(ds.n):
        for j in range(ds.n):
            if y[i] > y[j]:
                counts += X[i] > X[j]
    return counts


@settings(max_examples=60)
@given(st.integers(3, 25), st.integers(1, 6), st.integers(0, 2**32 - 1))
def test_lpsr_single_coordinate_is_argmax_count(n, d, seed):
    # with s = 1 every hinge is linear in v, so the LP picks the coordinate
    # that strictly orders the most violating pairs
    rng = np.random.default_rng(seed)
    ds = Dataset(rng.random((n, d)), rng.random(n))
    counts = _violation_counts(ds)
    if counts.max() == 0:
        return
    k = lpsr(ds, 1).indices[0]
    assert counts[k] == counts.max()
    assert slpsr(ds, 1).indices == (k,)


@settings(max_examples=40)
@given(st.integers(3, 14), st.integers(2, 5), st.data())
def test_lp_forms_agree(n, d, data):
    s = data.draw(st.integers(1, d))
    rng = np.random.default_rng(data.draw(st.integers(0, 2**32 - 1)))
    ds = Dataset(rng.integers(0, 3, size=(n, d)).astype(float), rng.random(n))
    pinned = data.draw(st.sets(st.integers(0, d - 1), max_size=d - s))
    sols = {}
    for form in ("dual", "primal", "literal"):
        for method in ("simplex", "highs"):
            sols[form, method] = lpsr_solve(ds, s, pinned, form=form, lp_method=method)
    ref = sols["dual", "simplex"].objective
    for sol in sols.values():
        assert sol.objective == pytest.approx(ref, abs=1e-7)
        assert hinge_objective(violating_patterns(ds), sol.v) == pytest.approx(ref, abs=1e-6)
        assert sol.v.sum() == pytest.approx(s)
        assert np.all(sol.v[list(pinned)] == 0)
        assert not set(sol.active.indices) & pinned


def test_patterns_merge_duplicates():
    X = np.array([[1.0, 0.0], [0.0, 1.0], [0.5, 0.5]])
    ds = Dataset(X, [1.0, 0.0, 0.0])
    pats = violating_patterns(ds)
    assert pats.size == 1
    assert np.array_equal(pats.patterns[0], [True, False])
    assert pats.weights[0] == 2.0


def test_lpsr_refuses_exclusions():
    ds = Dataset(np.random.default_rng(0).random((10, 3)), np.random.default_rng(1).random(10))
    with pytest.raises(ArgumentError):
        recover_support(ds, 2, RecoveryConfig(RecoveryMethod.LPSR, ((0, 1),)))


# ---------------------------------------------------------------- S-LPSR


def _negated(seed, n=80, d=4):
    rng = np.random.default_rng(seed)
    X = rng.random((n, d))
    X[:, 1] = 1.0 - X[:, 0]
    return Dataset(X, (X[:, 0] >= 0.5).astype(float))


def test_slpsr_exclusion_pins_partner():
    ds = _negated(1)
    cfg = RecoveryConfig(RecoveryMethod.SLPSR, ((0, 1),))
    rounds = slpsr_rounds(ds, 2, cfg)
    assert rounds[0].active.indices == (0,)
    assert rounds[1].active.indices[0] != 1
    assert rounds[1].v[1] == 0.0
    assert 1 not in slpsr(ds, 2, cfg).indices


@settings(max_examples=30)
@given(st.integers(0, 2**32 - 1))
def test_slpsr_never_returns_excluded_pairs(seed):
    rng = np.random.default_rng(seed)
    d = 5
    ds = Dataset(rng.random((20, d)), rng.random(20))
    pairs = ((0, 1), (2, 3))
    found = set(slpsr(ds, 2, RecoveryConfig(RecoveryMethod.SLPSR, pairs)).indices)
    assert not any(set(p) <= found for p in pairs)


def test_slpsr_fresh_data_uses_folds():
    ds, model = gen_anchor_instance(300, 6, 3, 5, 0.0, 5)
    rounds = slpsr_rounds(ds, 3, RecoveryConfig(fresh_data=True))
    assert len(rounds) == 3
    found = slpsr(ds, 3, RecoveryConfig(fresh_data=True))
    assert found.s == 3
    with pytest.raises(ArgumentError):
        slpsr(ds.subset([0, 1]), 3, RecoveryConfig(fresh_data=True))


def test_slpsr_exhausted_by_exclusions():
    ds = _negated(2, d=2)
    with pytest.raises(ArgumentError):
        slpsr(ds, 2, RecoveryConfig(RecoveryMethod.SLPSR, ((0, 1),)))


# ---------------------------------------------------------------- TSIR


def test_tsir_with_true_support_matches_fixed_solver():
    ds, model = gen_anchor_instance(200, 5, 3, 10, 0.0, 3)
    fit = tsir_fit(ds, 3, RecoveryConfig(RecoveryMethod.SLPSR))
    assert fit.active == model.active
    assert np.array_equal(fit.fitted, solve_fixed(ds, model.active).fitted)
    assert fit.method == "tsir-slpsr"


@settings(max_examples=30)
@given(st.integers(4, 12), st.integers(2, 4), st.integers(0, 2**32 - 1))
def test_tsir_stage_two_is_exact_and_not_better_than_ipir(n, d, seed):
    ds = random_input(np.random.default_rng(seed), n, d)
    s = min(2, d)
    fit = tsir_fit(ds, s, RecoveryConfig(RecoveryMethod.SLPSR))
    assert fit.objective == brute_force_binary(ds, fit.active).objective
    assert fit.objective >= ipir_fit(ds, s).objective


# ---------------------------------------------------------------- prediction


def _fit(X, F, rule, active=None):
    X = np.asarray(X, float)
    active = ActiveSet(tuple(range(X.shape[1])) if active is None else active, X.shape[1])
    return SparseFit(FitResult(np.asarray(F, float), 0.0, active, NoiseModel.NOISY_OUTPUT), rule, X)


def test_prediction_vacuous_rules():
    X = [[0.4, 0.4], [0.6, 0.6]]
    assert predict(_fit(X, [0.2, 0.7], "min"), np.array([0.1, 0.1])) == 0.0
    assert predict(_fit(X, [0.2, 0.7], "max"), np.array([0.9, 0.9])) == 1.0


def test_prediction_at_training_points():
    X = [[0.4, 0.4], [0.6, 0.6], [0.2, 0.9]]
    F = [0.2, 0.7, 0.5]
    for rule in ("min", "max"):
        assert np.array_equal(predict_many(_fit(X, F, rule), np.array(X)), F)


def test_prediction_between_comparable_points():
    X = [[0.2, 0.2], [0.8, 0.8]]
    x = np.array([0.5, 0.5])
    assert predict(_fit(X, [0.2, 0.7], Rule.MIN), x) == 0.2
    assert predict(_fit(X, [0.2, 0.7], Rule.MAX), x) == 0.7


def test_prediction_ignores_inactive_coordinates():
    fit = _fit([[0.2, 0.9], [0.8, 0.1]], [0.0, 1.0], "min", active=(0,))
    assert predict(fit, np.array([0.9, 0.0])) == 1.0
    assert predict(fit, np.array([0.5, 5.0])) == 0.0
    with pytest.raises(ArgumentError):
        predict(fit, np.array([0.5]))


@settings(max_examples=50)
@given(st.integers(1, 20), st.integers(1, 3), st.integers(0, 2**32 - 1))
def test_prediction_monotone_and_ordered(n, d, seed):
    rng = np.random.default_rng(seed)
    ds = Dataset(rng.random((n, d)), rng.random(n))
    fmin = ipir_fit(ds, d, "min")
    fmax = ipir_fit(ds, d, "max")
    a = rng.random((200, d))
    b = np.maximum(a, rng.random((200, d)))
    for f in (fmin, fmax):
        assert np.all(predict_many(f, a) <= predict_many(f, b))
    assert np.all(predict_many(fmin, a) <= predict_many(fmax, a))


def test_fit_round_trip_through_json():
    ds, _ = gen_noisy_input_instance(30, 4, 2, 3, 0.05, 9)
    fit = ipir_fit(ds, 2, "max")
    back = SparseFit.from_dict(json.loads(json.dumps(fit.to_dict())))
    pts = np.random.default_rng(0).random((50, 4))
    assert np.array_equal(predict_many(back, pts), predict_many(fit, pts))
    assert back.rule is Rule.MAX and back.active == fit.active
    with pytest.raises(ArgumentError):
        SparseFit.from_dict({"rule": "min"})
