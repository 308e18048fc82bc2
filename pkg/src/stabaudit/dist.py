"""Finite alphabets, distributions, joints, and total-variation geometry.

Distributions live on ordered finite alphabets.  Weights are either exact
rationals (object-dtype arrays of fractions.Fraction) or float64; the two
modes share every operation.  Total variation between P and Q on a common
alphabet is

    tv(P, Q) = (1/2) * sum_x |P(x) - Q(x)|,

and the overlap coefficient is 1 - tv(P, Q).  Joints add named axes with
marginalization, slicing on an observed symbol (conditioning), axis merging,
and products of independent marginals.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from fractions import Fraction
from functools import cached_property, reduce
from typing import Any, Iterable, Mapping, Sequence

import numpy as np

from .numeric import EXACT, FLOAT64, NumericMode, coerce_number, mode_of, zeros

#: absolute tolerance on total mass for float-mode construction
MASS_ATOL = 1e-12


class DomainMismatchError(ValueError):
    """Operands live on different alphabets or axis layouts."""


class ConditioningError(ValueError):
    """Conditioning on an event of zero probability."""


class ArityError(ValueError):
    """A joint does not have the axis count an operation requires."""


@dataclass(frozen=True)
class Alphabet:
    """Ordered finite symbol set with a name used for axis lookup."""

    name: str
    symbols: tuple

    def __post_init__(self):
        object.__setattr__(self, "symbols", tuple(self.symbols))
        if not self.symbols:
            raise ValueError(f"alphabet {self.name!r} is empty")
        if len(set(self.symbols)) != len(self.symbols):
            raise ValueError(f"alphabet {self.name!r} repeats a symbol")

    @cached_property
    def index(self) -> dict:
        return {s: i for i, s in enumerate(self.symbols)}

    def __len__(self) -> int:
        return len(self.symbols)

    def __contains__(self, symbol) -> bool:
        return symbol in self.index

    @classmethod
    def of_size(cls, name: str, n: int) -> "Alphabet":
        return cls(name, tuple(range(n)))


def _validated_weights(weights, shape, where: str) -> np.ndarray:
    w = np.asarray(weights)
    if w.dtype != object:
        w = w.astype(np.float64)
    w = w.copy()
    if w.shape != shape:
        raise DomainMismatchError(f"{where}: weights shape {w.shape} != {shape}")
    exact = w.dtype == object
    flat = w.ravel()
    if exact:
        for x in flat:
            if not isinstance(x, (int, Fraction)):
                raise TypeError(f"{where}: exact weights must be int or Fraction, got {type(x).__name__}")
            if x < 0:
                raise ValueError(f"{where}: negative weight {x}")
        total = sum(flat)
        if total != 1:
            raise ValueError(f"{where}: mass is {total}, expected exactly 1")
    else:
        if not np.all(np.isfinite(flat)):
            raise ValueError(f"{where}: non-finite weight")
        if np.any(flat < 0):
            raise ValueError(f"{where}: negative weight")
        total = flat.sum()
        if abs(total - 1.0) > MASS_ATOL:
            raise ValueError(f"{where}: mass is {total!r}, off by more than {MASS_ATOL}")
    w.setflags(write=False)
    return w


@dataclass(frozen=True, eq=False)
class Dist:
    """Probability distribution over one alphabet.

    Mass must be exactly 1 in exact mode and within MASS_ATOL in float mode;
    the constructor enforces this, so a Dist is always valid by construction.
    """

    alphabet: Alphabet
    weights: np.ndarray

    def __post_init__(self):
        w = _validated_weights(self.weights, (len(self.alphabet),), f"dist[{self.alphabet.name}]")
        object.__setattr__(self, "weights", w)

    @property
    def is_exact(self) -> bool:
        return self.weights.dtype == object

    @property
    def mode(self) -> NumericMode:
        return mode_of(self.weights)

    def __len__(self) -> int:
        return len(self.alphabet)

    def weight(self, symbol):
        return self.weights[self.alphabet.index[symbol]]

    __getitem__ = weight

    def support(self) -> tuple:
        return tuple(s for s, w in zip(self.alphabet.symbols, self.weights) if w > 0)

    def expect(self, fn) -> Any:
        """Expectation of fn(symbol) under this distribution."""
        return sum(w * fn(s) for s, w in zip(self.alphabet.symbols, self.weights) if w != 0)

    def as_float(self) -> "Dist":
        if not self.is_exact:
            return self
        return Dist(self.alphabet, self.weights.astype(np.float64))

    @classmethod
    def uniform(cls, alphabet: Alphabet, mode: NumericMode = FLOAT64) -> "Dist":
        n = len(alphabet)
        if mode.exact:
            w = np.array([Fraction(1, n)] * n, dtype=object)
        else:
            w = np.full(n, 1.0 / n)
            w[-1] = 1.0 - w[:-1].sum()  # close the float gap exactly
        return cls(alphabet, w)

    @classmethod
    def point_mass(cls, alphabet: Alphabet, symbol, mode: NumericMode = FLOAT64) -> "Dist":
        w = zeros(len(alphabet), mode)
        w[alphabet.index[symbol]] = Fraction(1) if mode.exact else 1.0
        return cls(alphabet, w)

    @classmethod
    def from_mapping(cls, alphabet: Alphabet, mapping: Mapping, mode: NumericMode = FLOAT64) -> "Dist":
        w = zeros(len(alphabet), mode)
        for symbol, value in mapping.items():
            w[alphabet.index[symbol]] = coerce_number(value, mode)
        return cls(alphabet, w)


@dataclass(frozen=True, eq=False)
class Joint:
    """Joint distribution over an ordered tuple of uniquely named axes."""

    axes: tuple[Alphabet, ...]
    weights: np.ndarray

    def __post_init__(self):
        axes = tuple(self.axes)
        object.__setattr__(self, "axes", axes)
        names = [a.name for a in axes]
        if len(set(names)) != len(names):
            raise ValueError(f"axis names must be unique, got {names}")
        shape = tuple(len(a) for a in axes)
        w = _validated_weights(self.weights, shape, f"joint[{','.join(names)}]")
        object.__setattr__(self, "weights", w)

    @property
    def arity(self) -> int:
        return len(self.axes)

    @property
    def axis_names(self) -> tuple[str, ...]:
        return tuple(a.name for a in self.axes)

    @property
    def is_exact(self) -> bool:
        return self.weights.dtype == object

    @property
    def mode(self) -> NumericMode:
        return mode_of(self.weights)

    def axis(self, name: str) -> int:
        for i, a in enumerate(self.axes):
            if a.name == name:
                return i
        raise DomainMismatchError(f"no axis named {name!r} in {self.axis_names}")

    def weight(self, symbols: Sequence) -> Any:
        idx = tuple(a.index[s] for a, s in zip(self.axes, symbols))
        return self.weights[idx]

    def marginal(self, *names: str):
        """Sum out every axis not listed; axes come back in the listed order.

        Returns a Dist when one name is given, a Joint otherwise.
        """
        if not names:
            raise ArityError("marginal needs at least one axis name")
        keep = [self.axis(n) for n in names]
        drop = tuple(i for i in range(self.arity) if i not in keep)
        w = self.weights.sum(axis=drop) if drop else self.weights
        # realign to the requested order
        current = [i for i in range(self.arity) if i not in drop]
        perm = [current.index(i) for i in keep]
        w = np.transpose(w, perm)
        if len(names) == 1:
            return Dist(self.axes[keep[0]], w)
        return Joint(tuple(self.axes[i] for i in keep), w)

    def condition(self, name: str, symbol):
        """Condition on one axis taking an observed symbol.

        Returns the renormalized slice over the remaining axes, as a Dist
        when a single axis remains.
        """
        ax = self.axis(name)
        sl = [slice(None)] * self.arity
        sl[ax] = self.axes[ax].index[symbol]
        w = self.weights[tuple(sl)]
        mass = w.sum()
        if mass == 0:
            raise ConditioningError(f"P({name}={symbol!r}) = 0")
        w = w / mass
        rest = tuple(a for i, a in enumerate(self.axes) if i != ax)
        if len(rest) == 1:
            return Dist(rest[0], w)
        return Joint(rest, w)

    def merge(self, names: Sequence[str], new_name: str) -> "Joint":
        """Fuse the listed axes into one axis of symbol tuples.

        The merged axis sits where the first listed axis was; its symbols
        are tuples in itertools.product order of the listed axes.
        """
        if len(names) < 2:
            raise ArityError("merge needs at least two axes")
        picked = [self.axis(n) for n in names]
        rest = [i for i in range(self.arity) if i not in picked]
        order = picked + rest
        w = np.transpose(self.weights, order)
        merged_size = int(np.prod([len(self.axes[i]) for i in picked]))
        w = w.reshape((merged_size,) + tuple(len(self.axes[i]) for i in rest))
        merged = Alphabet(
            new_name,
            tuple(itertools.product(*(self.axes[i].symbols for i in picked))),
        )
        # put the merged axis back at the position of the first constituent
        slot = sum(1 for i in rest if i < picked[0])
        axes = [self.axes[i] for i in rest]
        axes.insert(slot, merged)
        w = np.moveaxis(w, 0, slot)
        return Joint(tuple(axes), np.ascontiguousarray(w))

    def reorder(self, *names: str) -> "Joint":
        if sorted(names) != sorted(self.axis_names):
            raise DomainMismatchError(f"reorder needs all of {self.axis_names}, got {names}")
        perm = [self.axis(n) for n in names]
        return Joint(tuple(self.axes[i] for i in perm), np.transpose(self.weights, perm))

    def to_dist(self) -> Dist:
        if self.arity != 1:
            raise ArityError(f"to_dist needs arity 1, have {self.arity}")
        return Dist(self.axes[0], self.weights)

    def as_float(self) -> "Joint":
        if not self.is_exact:
            return self
        return Joint(self.axes, self.weights.astype(np.float64))


def _aligned(p, q) -> tuple[np.ndarray, np.ndarray]:
    if isinstance(p, Dist) and isinstance(q, Dist):
        if p.alphabet != q.alphabet:
            raise DomainMismatchError("distributions on different alphabets")
    elif isinstance(p, Joint) and isinstance(q, Joint):
        if p.axes != q.axes:
            raise DomainMismatchError("joints with different axis layouts")
    else:
        raise DomainMismatchError(f"cannot compare {type(p).__name__} with {type(q).__name__}")
    a, b = p.weights, q.weights
    if (a.dtype == object) != (b.dtype == object):
        a = a.astype(np.float64) if a.dtype == object else a
        b = b.astype(np.float64) if b.dtype == object else b
    return a, b


def tv_distance(p, q):
    """Total variation distance, exact (Fraction) when both operands are."""
    a, b = _aligned(p, q)
    total = abs(a - b).sum()
    return total / 2 if a.dtype == object else float(total) / 2.0


def overlap(p, q):
    """Overlap coefficient 1 - tv(p, q)."""
    return 1 - tv_distance(p, q)


def marginal(j: Joint, *names: str):
    return j.marginal(*names)


def condition(j: Joint, name: str, symbol):
    return j.condition(name, symbol)


def product(*dists: Dist) -> Joint:
    """Independent product of marginals as a joint with one axis each."""
    if len(dists) < 2:
        raise ArityError("product needs at least two distributions")
    w = reduce(np.multiply.outer, [d.weights for d in dists])
    return Joint(tuple(d.alphabet for d in dists), w)


def product_weights(j: Joint) -> np.ndarray:
    """Weights of the product of j's own marginals, in j's layout."""
    vecs = []
    for i in range(j.arity):
        drop = tuple(k for k in range(j.arity) if k != i)
        vecs.append(j.weights.sum(axis=drop))
    return reduce(np.multiply.outer, vecs)


@dataclass(frozen=True)
class Diagnostics:
    ok: bool
    is_exact: bool
    mass_error: float
    min_weight: float
    messages: tuple[str, ...]


def validate(obj) -> Diagnostics:
    """Re-check the mass and sign invariants of a Dist or Joint."""
    w = obj.weights.ravel()
    messages = []
    if obj.is_exact:
        total = sum(w)
        mass_error = float(total - 1)
        if total != 1:
            messages.append(f"mass {total} != 1")
        mn = min(w)
    else:
        total = w.sum()
        mass_error = float(total - 1.0)
        if abs(mass_error) > MASS_ATOL:
            messages.append(f"mass off by {mass_error!r}")
        if not np.all(np.isfinite(w)):
            messages.append("non-finite weight")
        mn = w.min()
    if mn < 0:
        messages.append(f"negative weight {mn}")
    return Diagnostics(
        ok=not messages,
        is_exact=obj.is_exact,
        mass_error=mass_error,
        min_weight=float(mn),
        messages=tuple(messages),
    )


@dataclass(frozen=True, eq=False)
class TransitionKernel:
    """Row-stochastic map from one alphabet to another."""

    src: Alphabet
    dst: Alphabet
    matrix: np.ndarray

    def __post_init__(self):
        m = np.asarray(self.matrix)
        if m.dtype != object:
            m = m.astype(np.float64)
        m = m.copy()
        if m.shape != (len(self.src), len(self.dst)):
            raise DomainMismatchError(
                f"kernel shape {m.shape} != ({len(self.src)}, {len(self.dst)})"
            )
        exact = m.dtype == object
        for i, row in enumerate(m):
            total = sum(row) if exact else row.sum()
            bad = (total != 1) if exact else abs(total - 1.0) > MASS_ATOL
            if bad or (min(row) if exact else row.min()) < 0:
                raise ValueError(f"row {i} of kernel {self.src.name}->{self.dst.name} is not a distribution")
        m.setflags(write=False)
        object.__setattr__(self, "matrix", m)

    def row(self, symbol) -> np.ndarray:
        return self.matrix[self.src.index[symbol]]

    def push(self, p: Dist) -> Dist:
        if p.alphabet != self.src:
            raise DomainMismatchError("push: distribution not on kernel source")
        return Dist(self.dst, p.weights @ self.matrix if p.weights.dtype != object else (p.weights[:, None] * self.matrix).sum(axis=0))

    def joint_with(self, p: Dist) -> Joint:
        """P(a, b) = p(a) * K(b | a) over axes (src, dst)."""
        if p.alphabet != self.src:
            raise DomainMismatchError("joint_with: distribution not on kernel source")
        return Joint((self.src, self.dst), p.weights[:, None] * self.matrix)
