"""Bayesian estimation of spatiotemporal log-ARCH models with latent factors."""

import json

import numpy as np

from ._logarch import (
    LogarchError,
    correlation_network,
    log_chi2_density,
    log_squared,
    mixture_density,
    mixture_table,
    queen_contiguity,
    row_normalize,
    simulate,
    summarize_trace,
)
from . import _logarch

__all__ = [
    "LogarchError",
    "correlation_network",
    "fit",
    "log_chi2_density",
    "log_squared",
    "mixture_density",
    "mixture_table",
    "queen_contiguity",
    "row_normalize",
    "select",
    "simulate",
    "summarize",
    "summarize_trace",
]


def _covariates(x, n, periods):
    if x is None:
        return [np.zeros((n, 0)) for _ in range(periods)]
    if isinstance(x, np.ndarray):
        if x.ndim != 3:
            raise ValueError("x must have shape (T, n, k)")
        return [np.ascontiguousarray(x[t]) for t in range(x.shape[0])]
    return [np.asarray(a, dtype=float) for a in x]


def fit(y, y0, x, weights, q=2, *, prior=None, **options):
    """Run one chain. `y` is n x T, `y0` the period-0 vector, `x` a (T, n, k)
    array or a list of n x k matrices. Returns draws, volatility and manifest."""
    y = np.asarray(y, dtype=float)
    out = _logarch.fit(y, np.asarray(y0, dtype=float), _covariates(x, y.shape[0], y.shape[1]),
                       np.asarray(weights, dtype=float), q,
                       prior_json=json.dumps(prior) if prior else "", **options)
    out["draws"] = {k: np.asarray(v) for k, v in out["draws"].items()}
    out["manifest"] = json.loads(out["manifest"])
    return out


def select(y, y0, x, weights, q_list, *, prior=None, **options):
    """DIC for each factor count in `q_list`; returns the report as a dict."""
    y = np.asarray(y, dtype=float)
    text = _logarch.select(y, np.asarray(y0, dtype=float), _covariates(x, y.shape[0], y.shape[1]),
                           np.asarray(weights, dtype=float), list(q_list),
                           prior_json=json.dumps(prior) if prior else "", **options)
    return json.loads(text)


def summarize(draws):
    """Median and 95% interval for every trace in a `fit(...)["draws"]` dict."""
    return [summarize_trace(name, list(values)) for name, values in draws.items() if name != "loglik"]
