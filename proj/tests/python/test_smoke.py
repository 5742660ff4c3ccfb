import json
import math
import os
import subprocess

import pytest

import stackline


def test_chi2_sf_two_dof_is_exponential():
    for x in (0.5, 2.0, 7.0):
        assert stackline.chi2_sf(x, 2) == pytest.approx(math.exp(-x / 2), rel=1e-12)


def test_chi_square_two_by_two():
    stat, dof, p = stackline.chi_square([[10, 20], [20, 10]])
    assert stat == pytest.approx(20 / 3, rel=1e-12)
    assert dof == 1
    assert p == pytest.approx(math.erfc(math.sqrt(stat / 2)), rel=1e-10)


def test_chi2_sf_rejects_negative_statistic():
    with pytest.raises(stackline.DomainError):
        stackline.chi2_sf(-1.0, 1)


def test_roc_auc_hand_example():
    points, auc = stackline.roc_auc([0, 0, 1, 1], [0.1, 0.4, 0.35, 0.8])
    assert auc == pytest.approx(0.75)
    assert points[0] == (0.0, 0.0)
    assert points[-1] == (1.0, 1.0)


def test_scores_hand_example():
    s = stackline.scores([1, 1, 1, 0, 0], [1, 1, 0, 0, 1])
    assert s["accuracy"]["binary"] == pytest.approx(3 / 5)
    assert s["precision"]["binary"] == pytest.approx(2 / 3)
    assert s["recall"]["binary"] == pytest.approx(2 / 3)
    assert s["recall"]["macro"] == pytest.approx((2 / 3 + 1 / 2) / 2)


def test_learner_separates_a_line():
    x = [[i / 10.0] for i in range(-20, 21) if i != 0]
    y = [1 if row[0] > 0 else 0 for row in x]
    model = stackline.make_learner("logreg")
    model.fit(x, y, 7)
    assert model.predict(x) == y
    assert json.loads(model.to_json())["type"] == "logreg"


def test_unknown_learner_is_config_error():
    with pytest.raises(stackline.ConfigError):
        stackline.make_learner("forest")
    assert issubclass(stackline.ConfigError, stackline.StacklineError)


def test_stack_fit_predicts_probabilities():
    x = [[(i % 13) / 13.0, ((i * 7) % 11) / 11.0] for i in range(80)]
    y = [1 if a + b > 1.0 else 0 for a, b in x]
    model = stackline.stack_fit(x, y, {"base_learners": [{"kind": "logreg"}, {"kind": "nb"}], "n_folds": 4})
    proba = model.predict_proba(x)
    assert len(proba) == 80
    assert all(0.0 <= p <= 1.0 for p in proba)
    assert len(model.meta_weights()) == 2


def test_pipeline_end_to_end(tmp_path):
    data = tmp_path / "survey.csv"
    rows, cols = stackline.generate_synth(data, {"n_rows": 600, "seed": 3})
    assert rows == 600
    assert stackline.csv_shape(str(data))[:2] == (rows, cols)

    out = tmp_path / "out"
    cfg = {"input": str(data), "output_dir": str(out), "seed": 3}
    pre = stackline.run_preprocess(cfg)
    assert pre["status"] == "ok"
    assert stackline.run_select(cfg)["status"] == "ok"
    stackline.run_train(cfg, ["stacking.n_folds=3"])
    report = stackline.run_evaluate(cfg, out / "model.json")
    assert 0.5 < report["auc"] <= 1.0

    n = stackline.run_predict(out / "model.json", data, tmp_path / "pred.csv")
    assert n == 600
    model = stackline.load_model(str(out / "model.json"))
    assert len(model.meta_weights()) == 4


def test_bad_override_is_config_error():
    with pytest.raises(stackline.ConfigError):
        stackline.resolve_config({}, ["stacking.n_folds=1"])


def test_cli_synth_and_exit_codes(tmp_path):
    cli = os.environ.get("STACKLINE_CLI")
    if not cli:
        pytest.skip("STACKLINE_CLI not set")
    target = tmp_path / "s.csv"
    done = subprocess.run([cli, "synth", "-o", str(target), "--rows", "50"], capture_output=True)
    assert done.returncode == 0
    assert stackline.csv_shape(str(target))[0] == 50
    bad = subprocess.run([cli, "train", "--set", "stacking.n_folds=0"], capture_output=True)
    assert bad.returncode == 2
