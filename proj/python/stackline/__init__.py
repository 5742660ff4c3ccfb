"""Stacked ensemble classification toolkit."""

import json as _json

from ._stackline import (
    BalanceError,
    ConfigError,
    DivergenceError,
    DomainError,
    Learner,
    ParseError,
    PipelineError,
    SchemaError,
    SelectionError,
    ShapeError,
    StacklineError,
    StackingModel,
    StatError,
    StratificationError,
    TrainingError,
    __version__,
    chi2_sf,
    chi_square,
    csv_shape,
    learner_kinds,
    load_model,
    regularized_gamma_p,
    regularized_gamma_q,
    roc_auc,
    scores,
)
from . import _stackline as _core


def _text(config):
    if config is None:
        return ""
    if isinstance(config, str):
        return config
    return _json.dumps(config)


def default_config():
    return _json.loads(_core.default_config())


def resolve_config(config=None, overrides=()):
    return _json.loads(_core.resolve_config(_text(config), list(overrides)))


def generate_synth(path, config=None):
    return _core.generate_synth(str(path), _text(config))


def make_learner(kind, params=None):
    return Learner(kind, _text(params))


def stack_fit(x, y, config=None):
    return _core.stack_fit(x, y, _text(config))


def run_preprocess(config, overrides=()):
    return _json.loads(_core.run_preprocess(_text(config), list(overrides)))


def run_select(config, overrides=()):
    return _json.loads(_core.run_select(_text(config), list(overrides)))


def run_train(config, overrides=()):
    return _json.loads(_core.run_train(_text(config), list(overrides)))


def run_evaluate(config, model, split="test", overrides=()):
    return _json.loads(_core.run_evaluate(_text(config), str(model), split, list(overrides)))


def run_compare(config, overrides=()):
    return _core.run_compare(_text(config), list(overrides))


def run_predict(model, input, output, encoded=False):
    return _core.run_predict(str(model), str(input), str(output), encoded)
