"""Doubling iterations, Riccati flows and their long-time limits.

Canonical forms are described by dicts with keys ``r``, ``e``, ``c`` and
``d``; they are passed to the extension as JSON.
"""

import json

from . import _sympflow
from ._sympflow import (
    AssumptionError,
    HypothesisError,
    Instance,
    PoleError,
    Prediction,
    SpecError,
    SympflowError,
    UsageError,
    digamma_det,
    digamma_det_exact,
    example_instance,
    general_limit,
    kappa,
    kappa_numeric,
    make_J,
    mat_exp,
    rde_solve,
    run_sda_dare,
    run_sda_nme,
    singular_times,
)

__all__ = [
    "AssumptionError",
    "HypothesisError",
    "Instance",
    "PoleError",
    "Prediction",
    "SpecError",
    "SympflowError",
    "UsageError",
    "build_J",
    "digamma_det",
    "digamma_det_exact",
    "elementary_limit",
    "example_instance",
    "exp_J",
    "general_limit",
    "kappa",
    "kappa_numeric",
    "make_J",
    "make_instance",
    "mat_exp",
    "rde_solve",
    "run_sda_dare",
    "run_sda_nme",
    "sda_class",
    "singular_times",
]


def _spec(spec):
    return spec if isinstance(spec, str) else json.dumps(spec)


def build_J(spec):
    """Canonical form as a dense 2n x 2n matrix."""
    return _sympflow.build_J(_spec(spec))


def exp_J(spec, t):
    """Closed-form exponential of the canonical form at time t."""
    return _sympflow.exp_J(_spec(spec), t)


def make_instance(spec, seed):
    """Seeded H = S J S^{-1} with a Hermitian initial value W0."""
    return _sympflow.make_instance(_spec(spec), seed)


def elementary_limit(instance, kind, direction="plus"):
    """Prediction for a single-block instance as a dict."""
    return json.loads(_sympflow.elementary_limit_json(instance, kind, direction))


def sda_class(spec):
    """Convergence verdict of the doubling iteration for a canonical form."""
    return json.loads(_sympflow.sda_class_json(_spec(spec)))
