"""Exact differential polynomial ring and its text format."""

from .parse import DiffSystem, load_system, parse_point, parse_poly, parse_polys, parse_system
from .ring import (
    BASE,
    JET,
    PARAM,
    STATE,
    DiffPolynomial,
    Var,
    base,
    const,
    derive_formal,
    derive_multi,
    evaluate_point,
    jet,
    param,
    rename,
    state,
    substitute,
    to_str,
)

__all__ = [
    "BASE",
    "JET",
    "PARAM",
    "STATE",
    "DiffPolynomial",
    "DiffSystem",
    "Var",
    "base",
    "const",
    "derive_formal",
    "derive_multi",
    "evaluate_point",
    "jet",
    "load_system",
    "param",
    "parse_point",
    "parse_poly",
    "parse_polys",
    "parse_system",
    "rename",
    "state",
    "substitute",
    "to_str",
]
