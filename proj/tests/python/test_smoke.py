import csv
import io
import itertools
import json

import numpy as np
import pytest

import tvcs


def small_structure():
    return tvcs.matrix_view_structure(3, 4, [2, 1, 2], [1, 2, 1, 1], 4)


def brute_force(v, structure):
    a, s = tvcs.constraint_matrix(structure)
    best, best_x = -1.0, None
    for bits in itertools.product([0, 1], repeat=len(v)):
        x = np.array(bits)
        if np.all(a @ x <= s):
            value = float(np.sum(x * np.square(v)))
            if value > best:
                best, best_x = value, x
    return best, best_x


def test_version():
    assert tvcs.__version__ == "0.1.0"


def test_structure_round_trip():
    s = small_structure()
    assert s.num_groups() == 1 + 3 + 4
    t = tvcs.Structure.from_json(s.to_json())
    assert t.to_json() == s.to_json()
    assert tvcs.validate_structure(s) == []


def test_invalid_structure_reported():
    s = tvcs.Structure(3, 2, [tvcs.Group([0, 1], 1), tvcs.Group([1, 2], 1)])
    assert tvcs.validate_structure(s)
    with pytest.raises(ValueError):
        tvcs.project([1.0, 2.0, 3.0], s)


def test_constraint_matrix_is_totally_unimodular():
    a, s = tvcs.constraint_matrix(small_structure())
    assert a.shape == (1 + 3 + 4, 12)
    assert s[0] == 4
    assert (a.sum(axis=0) <= 3).all()
    assert tvcs.check_totally_unimodular(a.tolist(), 4)
    assert not tvcs.check_totally_unimodular([[1, 1, 0], [0, 1, 1], [1, 0, 1]], 3)


def test_project_matches_exhaustive_search():
    s = small_structure()
    rng = np.random.default_rng(7)
    for _ in range(20):
        v = rng.standard_normal(12)
        r = tvcs.project(v, s, seed=3)
        best, _ = brute_force(v, s)
        got = float(np.sum(np.square(r["projected"])))
        assert got == pytest.approx(best, rel=1e-9, abs=1e-12)
        assert np.array_equal(r["projected"], np.where(r["support"] == 1, v, 0.0))
        ref = tvcs.project_bruteforce(v, s)
        assert float(np.sum(np.square(ref["projected"]))) == pytest.approx(best, rel=1e-12)


def test_project_is_deterministic():
    s = tvcs.gen_random_structure(6, seed=11)
    v = np.random.default_rng(1).standard_normal(36)
    a = tvcs.project(v, s, seed=5)
    b = tvcs.project(v, s, seed=5)
    assert np.array_equal(a["support"], b["support"])
    assert a["iterations"] == b["iterations"]


def test_projection_error_raised():
    budgets = [3, 2, 4, 1, 3, 2, 5, 3, 2, 4]
    s = tvcs.matrix_view_structure(10, 10, budgets, budgets, 17)
    v = np.random.default_rng(4).standard_normal(100)
    with pytest.raises(tvcs.ProjectionError, match="gap"):
        tvcs.project(v, s, max_iterations=1)
    assert issubclass(tvcs.ProjectionError, RuntimeError)


def test_least_squares_recovers_model():
    s = small_structure()
    w_bar = tvcs.gen_true_model(s, seed=9)
    x, y = tvcs.gen_regression_data(w_bar, 3, 4, 60, noise_sd=0.0, seed=10)
    trace = tvcs.solve_least_squares(x, y, 3, 4, s, iterations=300)
    assert tvcs.selection_recall(trace.w, w_bar) == pytest.approx(1.0)
    assert trace.objective[-1] <= trace.objective[0]


def test_metrics():
    m = tvcs.metrics(np.array([1, 1, 0, 0], dtype=np.uint8), np.array([1, 0, 1, 0], dtype=np.uint8))
    assert (m["tp"], m["fp"], m["tn"], m["fn"]) == (1, 1, 1, 1)
    assert m["mcc"] == pytest.approx(0.0)
    assert tvcs.auc_score([0.9, 0.1, 0.8, 0.2], np.array([1, 0, 1, 0], dtype=np.uint8)) == 1.0


def test_crowd_accuracy_and_solver():
    q = tvcs.gen_crowd_model(4, 3, seed=1)
    priors = [0.5, 0.5, 0.5]
    s = tvcs.crowd_structure(4, 3, 2, 2, 6)
    full = np.ones(12, dtype=np.uint8)
    none = np.zeros(12, dtype=np.uint8)
    assert tvcs.exact_expected_accuracy(q, priors, none) == pytest.approx(0.5)
    assert 0.5 < tvcs.exact_expected_accuracy(q, priors, full) <= 1.0
    trace = tvcs.solve_crowd(q, s, iterations=5, samples=8, seed=2)
    w = np.asarray(trace.w)
    assert ((w >= 0.0) & (w <= 1.0)).all()
    assert np.count_nonzero(w) <= 6


def test_run_experiment_tables():
    cfg = {"trials": 2, "side": 4, "sample_sizes": [20, 40], "seed": 3}
    out = tvcs.run_experiment("regression", json.dumps(cfg))
    rows = list(csv.DictReader(io.StringIO(out["aggregate_csv"])))
    assert rows
    assert json.loads(out["config"])["trials"] == 2
    again = tvcs.run_experiment("regression", json.dumps(cfg))
    assert again["trials_csv"] == out["trials_csv"]
    with pytest.raises(ValueError):
        tvcs.run_experiment("regression", json.dumps({"sample_size": 3}))
