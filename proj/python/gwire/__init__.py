"""Sparse Frechet sufficient dimension reduction with graphical predictor structure."""

import json

from ._gwire import (
    GwireError,
    __version__,
    bounded_transform,
    cholesky_sample,
    covariance,
    cross_validate,
    cume_kernel,
    default_glasso_penalty,
    extract_directions,
    fit,
    general_loss,
    glasso,
    ladle,
    lambda_max,
    neighborhoods_from_precision,
    norms,
    precision,
    sample_covariance,
    sir_kernel,
    standardize_directions,
    sym_eig,
    sym_inv_sqrt,
    theta_update,
    wire_kernel,
)
from . import _gwire


def distance(a, b):
    """Metric between two response records such as {"type": "sphere", "values": [...]}."""
    return _gwire._distance(json.dumps(a), json.dumps(b))


def pairwise_distances(responses, bound=False, jobs=1):
    return _gwire._pairwise_distances(json.dumps(list(responses)), bound, jobs)


def generate(example, n, p, seed, covariance="sigma1"):
    """One synthetic dataset; "responses" (examples 1 and 2) is a list of records."""
    out = _gwire._generate(example, n, p, covariance, seed)
    if "responses" in out:
        out["responses"] = json.loads(out["responses"])
    return out


def run_scenario(config, jobs=1):
    """Runs a scenario given as "key = value" text and returns the report as a dict."""
    return json.loads(_gwire._run_scenario(config, jobs))


__all__ = [name for name in dir() if not name.startswith("_") and name != "json"]
