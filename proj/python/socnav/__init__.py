"""Socially adaptive path planning: scenarios, oracle demos, RRT* and GAN-RRT*, metrics."""

import json

from . import _socnav

Error = _socnav.Error


def _dump(doc):
    if doc is None or isinstance(doc, str):
        return doc
    return json.dumps(doc)


def error_code(err):
    """Machine-readable code of a socnav.Error."""
    return str(err).split(":", 1)[0]


def generate(count=1, width=324, height=257, pedestrians=3, seed=0, empty_map=False):
    return [json.loads(s) for s in _socnav.generate(count, width, height, pedestrians, seed, empty_map)]


def oracle_demo(scenario, config=None):
    return json.loads(_socnav.oracle_demo(_dump(scenario), _dump(config) or ""))


def plan(scenario, planner="rrtstar", model=None, config=None, seed=None):
    """Returns the path document, or None when the planner fails."""
    out = _socnav.plan(_dump(scenario), planner, _dump(model), _dump(config) or "", seed)
    return None if out is None else json.loads(out)


def evaluate(scenario, demo, plan_path, config=None):
    return json.loads(_socnav.evaluate(_dump(scenario), _dump(demo), _dump(plan_path), _dump(config) or ""))


def h_signature(scenario, path, include_pedestrians=True):
    return _socnav.h_signature(_dump(scenario), _dump(path), include_pedestrians)


def same_homotopy(scenario, a, b):
    return _socnav.same_homotopy(_dump(scenario), _dump(a), _dump(b))


def dissimilarity(a, b, symmetric=False):
    return _socnav.dissimilarity(_dump(a), _dump(b), symmetric)


def features(scenario, x, y, config=None):
    return _socnav.features(_dump(scenario), x, y, _dump(config) or "")


def create_pair(seed=0):
    return json.loads(_socnav.create_pair(seed))


def train(scenarios, demos, out, split="75:25", seed=0, config=None):
    return json.loads(_socnav.train(str(scenarios), str(demos), str(out), split, seed, _dump(config) or ""))


def default_config():
    return json.loads(_socnav.default_config())
