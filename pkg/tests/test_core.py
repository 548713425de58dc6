import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st
from hypothesis.extra.numpy import arrays

from sparse_isotonic.core import (
    ActiveSet,
    ArgumentError,
    DataFormatError,
    Dataset,
    NoiseModel,
    build_comparability,
    dominates,
    q_indicator,
    read_dataset_csv,
    read_points_csv,
    transitive_reduction,
    write_dataset_csv,
)


def two_points(a, b):
    return Dataset(np.array([a, b]), [0.0, 0.0])


def test_q_indicator_examples():
    ds = two_points((0.3, 0.9), (0.5, 0.1))
    assert q_indicator(ds, 0, 1, 0) == 0
    assert q_indicator(ds, 0, 1, 1) == 1
    assert q_indicator(ds, 1, 0, 0) == 1


def test_q_indicator_ties_and_identity():
    ds = two_points((0.4, 0.2), (0.4, 0.7))
    assert q_indicator(ds, 0, 1, 0) == q_indicator(ds, 1, 0, 0) == 0
    assert all(q_indicator(ds, 0, 0, k) == 0 for k in range(2))


def test_q_indicator_rejects_bad_index():
    ds = two_points((0.1, 0.2), (0.3, 0.4))
    with pytest.raises(ArgumentError):
        q_indicator(ds, 0, 2, 0)
    with pytest.raises(ArgumentError):
        q_indicator(ds, 0, 1, 5)


def test_dominates_examples():
    assert dominates(two_points((0.3, 0.1), (0.9, 0.5)), 0, 1, ActiveSet((1,), 2))
    assert not dominates(two_points((0.3, 0.9), (0.5, 0.1)), 0, 1, ActiveSet((0, 1), 2))
    ds = two_points((0.3, 0.9), (0.5, 0.1))
    assert dominates(ds, 0, 0, [0, 1]) and dominates(ds, 1, 1, [0])


def test_build_comparability_examples():
    rel = build_comparability(two_points((0.3, 0.9), (0.5, 0.1)), [0, 1])
    assert np.array_equal(rel.dominance, np.eye(2, dtype=bool))

    chain = Dataset(np.array([[0.1, 0.7], [0.5, 0.2], [0.9, 0.3]]), [0, 0, 0])
    rel = build_comparability(chain, [0])
    assert np.array_equal(rel.dominance, np.triu(np.ones((3, 3), dtype=bool)))

    dup = two_points((0.2, 0.2), (0.2, 0.2))
    rel = build_comparability(dup, [0, 1])
    assert rel.dominance[0, 1] and rel.dominance[1, 0]


def test_active_set_validation():
    assert ActiveSet((2, 0), 3).indices == (0, 2)
    assert ActiveSet.from_one_based([1, 3], 3).one_based() == [1, 3]
    for bad in [(), (0, 0), (3,), (-1,)]:
        with pytest.raises(ArgumentError):
            ActiveSet(bad, 3)


def test_dataset_validation():
    with pytest.raises(ArgumentError):
        Dataset(np.zeros((3, 2)), [0, 1])
    with pytest.raises(ArgumentError):
        Dataset(np.zeros((2, 2)), [0.5, 1.5])
    with pytest.raises(ArgumentError):
        Dataset(np.zeros((2, 2)), [0.5, 1.0], NoiseModel.NOISY_INPUT)
    with pytest.raises(ArgumentError):
        Dataset(np.array([[np.nan]]), [0.0])
    ok = Dataset(np.zeros((2, 2)), [-0.3, 1.4], strict_range=False)
    assert ok.n == 2 and ok.d == 2


coords = arrays(np.float64, st.tuples(st.integers(2, 12), st.integers(1, 4)),
                elements=st.sampled_from([0.0, 0.25, 0.5, 0.75, 1.0]))


@given(coords)
def test_q_antisymmetry(X):
    ds = Dataset(X, np.zeros(X.shape[0]))
    n, d = X.shape
    for i in range(n):
        for j in range(n):
            for k in range(d):
                total = q_indicator(ds, i, j, k) + q_indicator(ds, j, i, k)
                assert total == int(X[i, k] != X[j, k])


@given(coords, st.data())
def test_mutual_dominance_is_equality(X, data):
    d = X.shape[1]
    active = data.draw(st.sets(st.integers(0, d - 1), min_size=1))
    ds = Dataset(X, np.zeros(X.shape[0]))
    cols = sorted(active)
    for i in range(ds.n):
        for j in range(ds.n):
            both = dominates(ds, i, j, active) and dominates(ds, j, i, active)
            assert both == bool(np.all(X[i, cols] == X[j, cols]))


@given(arrays(np.float64, st.tuples(st.integers(1, 50), st.integers(1, 4)),
              elements=st.sampled_from([0.0, 0.3, 0.6, 0.9])), st.data())
def test_comparability_matches_pairwise(X, data):
    d = X.shape[1]
    active = data.draw(st.sets(st.integers(0, d - 1), min_size=1))
    ds = Dataset(X, np.zeros(X.shape[0]))
    rel = build_comparability(ds, active)
    expected = np.array([[dominates(ds, i, j, active) for j in range(ds.n)] for i in range(ds.n)])
    assert np.array_equal(rel.dominance, expected)


@given(arrays(np.float64, st.tuples(st.integers(1, 15), st.integers(1, 3)),
              elements=st.sampled_from([0.0, 0.5, 1.0])))
def test_transitive_reduction_preserves_order(X):
    rel = build_comparability(Dataset(X, np.zeros(X.shape[0])), range(X.shape[1]))
    tail, head = transitive_reduction(rel.dominance)
    n = X.shape[0]
    R = np.eye(n, dtype=bool)
    R[tail, head] = True
    while True:
        nxt = R | ((R.astype(int) @ R.astype(int)) > 0)
        if np.array_equal(nxt, R):
            break
        R = nxt
    assert np.array_equal(R, rel.dominance)


def test_csv_round_trip(tmp_path):
    X = np.array([[0.1, 0.2], [0.3, 0.4]])
    ds = Dataset(X, [0.25, 0.75])
    path = tmp_path / "d.csv"
    write_dataset_csv(ds, path)
    back = read_dataset_csv(path, "output")
    assert np.array_equal(back.features, X)
    assert np.array_equal(back.labels, ds.labels)


def test_csv_errors_carry_line_numbers(tmp_path):
    path = tmp_path / "bad.csv"
    path.write_text("x1,x2,y\n0.1,0.2,0.3\n0.1,oops,0.3\n")
    with pytest.raises(DataFormatError) as err:
        read_dataset_csv(path, "output")
    assert "3" in str(err.value)
    path.write_text("a,b,c\n0.1,0.2,0.3\n")
    with pytest.raises(DataFormatError):
        read_dataset_csv(path, "output")


def test_points_dimension_check(repo):
    pts = read_points_csv(repo / "data" / "query_points.csv", 3)
    assert pts.shape == (3, 3)
    with pytest.raises(DataFormatError):
        read_points_csv(repo / "data" / "query_points.csv", 2)
