"""Numeric modes shared by every computation in the toolkit.

All probability mass is held either as exact rationals (fractions.Fraction
inside object-dtype numpy arrays) or as float64.  The mode travels with the
array dtype; NumericMode bundles the dtype choice with the tolerance used
whenever a computed quantity is compared against a bound or an invariant.
Exact mode compares with tolerance zero.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Any

import numpy as np


@dataclass(frozen=True)
class NumericMode:
    name: str
    exact: bool
    tolerance: Any  # 0 for exact mode, a small float otherwise

    @property
    def dtype(self):
        return object if self.exact else np.float64


EXACT = NumericMode(name="exact-rational", exact=True, tolerance=0)
FLOAT64 = NumericMode(name="float64", exact=False, tolerance=1e-12)


def mode_of(weights: np.ndarray) -> NumericMode:
    """Infer the numeric mode an array of weights was built in."""
    return EXACT if weights.dtype == object else FLOAT64


def coerce_number(x, mode: NumericMode):
    """Bring one scalar into the given mode.

    Exact mode accepts ints, Fractions, decimal strings, and floats (every
    float is a finite binary rational, so Fraction(x) is lossless).  Float
    mode converts anything float() accepts.
    """
    if mode.exact:
        if isinstance(x, Fraction):
            return x
        if isinstance(x, bool):
            raise TypeError("booleans are not probability weights")
        if isinstance(x, int):
            return Fraction(x)
        if isinstance(x, str):
            return Fraction(x)  # decimal string, parsed exactly
        if isinstance(x, float):
            return Fraction(x)
        raise TypeError(f"cannot represent {type(x).__name__} exactly")
    return float(Fraction(x)) if isinstance(x, str) else float(x)


def zeros(shape, mode: NumericMode) -> np.ndarray:
    """Zero-initialized accumulator array in the given mode.

    Object-dtype zeros start as python ints, which absorb Fraction addition
    without losing exactness.
    """
    return np.zeros(shape, dtype=mode.dtype)


def as_float(x) -> float:
    return float(x)
