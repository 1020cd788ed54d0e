"""Optimal control of semilinear spectral fractional equations with box constraints."""

import json

from ._fracocp import (
    ConfigError,
    RunConfig,
    SolverError,
    eigenvalues,
    eval_expr,
    gradient,
    load_config,
    parse_config,
    state_solve,
)
from . import _fracocp

__all__ = [
    "ConfigError",
    "RunConfig",
    "SolverError",
    "certify",
    "converge",
    "eigenvalues",
    "eval_expr",
    "gradient",
    "load_config",
    "parse_config",
    "solve",
    "state_solve",
    "validate_family",
]


def _config(cfg):
    if isinstance(cfg, RunConfig):
        return cfg
    if isinstance(cfg, dict):
        return parse_config(json.dumps(cfg))
    return load_config(str(cfg))


def solve(cfg):
    """Optimize and certify. Returns (report dict, {"u", "y", "q", "d"} arrays)."""
    text, fields = _fracocp.solve(_config(cfg))
    return json.loads(text), fields


def certify(cfg, u, y=None, q=None):
    return json.loads(_fracocp.certify(_config(cfg), u, y, q))


def converge(cfg, n_list=()):
    return json.loads(_fracocp.converge(_config(cfg), list(n_list)))


def validate_family(cfg):
    return json.loads(_fracocp.validate_family(_config(cfg)))
