"""Parametric losses, risks, and exact deviation laws.

A loss maps (observation, hypothesis) to [0, 1].  For a scenario with
training joint P(Z_trn, H), the expected generalization risk of a loss L is

    gen(L) = E_{P(Z_trn, H)} L - E_{P(Z) x P(H)} L = sum_{z,h} D(z,h) L(z,h)

with D = joint - product of marginals.  Its supremum over all [0,1]-valued
losses is attained by the indicator of {D >= 0} and equals vi(Z_trn; H).
The deviation law is the exact distribution of G = R_emp(H) - R_true(H)
over the randomness of the sample and the kernel; tail audits read it.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from fractions import Fraction
from functools import lru_cache
from typing import Any, Callable, Mapping, Sequence

import numpy as np

from .bounds import erm_markov_bound
from .dist import Alphabet, Dist, product_weights
from .info import variational_info
from .learners import (
    Scenario,
    TrnHypJoint,
    _admit,
    exact_trn_hyp_joint,
    iter_weighted_samples,
)

#: grouping width for float-mode deviation values
VALUE_ATOL = 1e-12


@dataclass(frozen=True, eq=False)
class ParametricLoss:
    """Loss function with optional closed-form true risk.

    fn(z, h) must return a value in [0, 1]; returning ints or Fractions
    keeps exact-mode arithmetic exact.  true_risk_fn(h, dist), when given,
    replaces the full-domain expectation (needed when the domain is huge).
    """

    name: str
    fn: Callable[[Any, Any], Any]
    params: Mapping[str, Any] = field(default_factory=dict)
    true_risk_fn: Callable[[Any, Dist], Any] | None = None

    def __call__(self, z, h):
        return self.fn(z, h)


def empirical_risk(loss: ParametricLoss, sample: Sequence, h):
    """Mean loss of h over the sample entries."""
    total = 0
    for z in sample:
        total = total + loss.fn(z, h)
    # Fraction divisor: int and Fraction totals stay exact, floats stay float
    return total / Fraction(len(sample))


def true_risk(loss: ParametricLoss, h, dist: Dist):
    """Expected loss of h under the data distribution."""
    if loss.true_risk_fn is not None:
        return loss.true_risk_fn(h, dist)
    total = 0
    for z, w in zip(dist.alphabet.symbols, dist.weights):
        if w != 0:
            total = total + w * loss.fn(z, h)
    return total


def gen_risk_from_joint(tj: TrnHypJoint, loss: ParametricLoss):
    """Expected generalization risk of a loss, straight from D = joint - product."""
    j = tj.joint
    d = j.weights - product_weights(j)
    zsyms, hsyms = j.axes[0].symbols, j.axes[1].symbols
    total = 0
    for zi, z in enumerate(zsyms):
        row = d[zi]
        for hi, h in enumerate(hsyms):
            v = row[hi]
            if v != 0:
                total = total + v * loss.fn(z, h)
    return total if j.is_exact else float(total)


def expected_gen_risk(scenario: Scenario, loss: ParametricLoss, budget: int | None = None):
    """gen(L) for the scenario's exactly enumerated training joint."""
    return gen_risk_from_joint(exact_trn_hyp_joint(scenario, budget=budget), loss)


@dataclass(frozen=True)
class DeviationLaw:
    """Exact law of G = R_emp(H) - R_true(H); points are (value, prob) sorted."""

    points: tuple
    scenario_name: str
    loss_name: str

    def expectation(self):
        return sum(v * p for v, p in self.points)

    def tail_abs_ge(self, t, tol=0):
        """P{|G| >= t}, with a symmetric tolerance for float-mode values."""
        return sum(p for v, p in self.points if abs(v) >= t - tol)

    def tail_abs_gt(self, t, tol=0):
        """P{|G| > t} (strict)."""
        return sum(p for v, p in self.points if abs(v) > t + tol)

    def mass_abs_near(self, t, window):
        """P{ | |G| - t | <= window }."""
        return sum(p for v, p in self.points if abs(abs(v) - t) <= window)


def _merged_points(acc: dict, is_exact: bool) -> tuple:
    items = sorted(acc.items())
    if is_exact:
        return tuple(items)
    merged = []
    for v, p in items:
        if merged and abs(v - merged[-1][0]) <= VALUE_ATOL:
            merged[-1][1] += p
        else:
            merged.append([v, p])
    return tuple((v, p) for v, p in merged)


def deviation_law(scenario: Scenario, loss: ParametricLoss, budget: int | None = None) -> DeviationLaw:
    """Enumerate the deviation law exactly.

    True risks are cached per hypothesis; empirical risks use the multiset
    counts, so the cost matches the joint enumeration.
    """

    def build() -> DeviationLaw:
        _admit(scenario, budget, f"deviation law for {scenario.name!r}")
        learner, dist, m = scenario.learner, scenario.data_dist, scenario.m
        risks: dict = {}
        acc: dict = {}
        for sample, w, counts in iter_weighted_samples(dist, m, learner.symmetric):
            syms = [(dist.alphabet.symbols[i], c) for i, c in counts]
            for h, ph in learner.kernel(sample).items():
                if ph == 0:
                    continue
                if h not in risks:
                    risks[h] = true_risk(loss, h, dist)
                emp = sum(c * loss.fn(z, h) for z, c in syms) / Fraction(m)
                g = emp - risks[h]
                acc[g] = acc.get(g, 0) + w * ph
        return DeviationLaw(
            points=_merged_points(acc, dist.is_exact),
            scenario_name=scenario.name,
            loss_name=loss.name,
        )

    return scenario.cached(("deviation_law", loss.name), build)


# ---------------------------------------------------------------------------
# loss builders


def constant_loss(value=1) -> ParametricLoss:
    def fn(z, h):
        return value

    return ParametricLoss(
        name=f"constant[{value}]",
        fn=fn,
        params={"value": value},
        true_risk_fn=lambda h, dist: value,
    )


def zero_one_loss() -> ParametricLoss:
    """Disagreement between the observation and the hypothesis symbol."""
    return ParametricLoss(name="zero_one", fn=lambda z, h: 0 if z == h else 1)


def membership_loss() -> ParametricLoss:
    """1 when the observation appears in a tuple-valued hypothesis."""
    return ParametricLoss(name="membership", fn=lambda z, h: 1 if z in h else 0)


def table_loss(name: str, domain: Alphabet, hypotheses: Alphabet, values: np.ndarray) -> ParametricLoss:
    zi, hi = domain.index, hypotheses.index

    def fn(z, h):
        return values[zi[z]][hi[h]]

    return ParametricLoss(name=name, fn=fn, params={"shape": (len(domain), len(hypotheses))})


def random_table_loss(domain: Alphabet, hypotheses: Alphabet, seed: int, levels: int = 16) -> ParametricLoss:
    """Seeded random loss table with values on the grid {0, 1/levels, ..., 1}.

    Grid values stay exact in exact mode.
    """
    rng = np.random.Generator(np.random.Philox(key=seed))
    raw = rng.integers(0, levels + 1, size=(len(domain), len(hypotheses)))
    values = [[Fraction(int(v), levels) for v in row] for row in raw]
    loss = table_loss(f"random_table[{seed}]", domain, hypotheses, values)
    return ParametricLoss(name=loss.name, fn=loss.fn, params={"seed": seed, "levels": levels})


@lru_cache(maxsize=65536)
def _as_set(key: tuple) -> frozenset:
    return frozenset(key)


def _prop1_loss(name: str, in_sample_value) -> ParametricLoss:
    """Shared shape of the memorizer losses: off-sample points cost 1/2."""
    half = Fraction(1, 2)

    def fn(z, h):
        key, b = h
        if z in _as_set(key):
            return in_sample_value(b)
        return half

    def true_risk_fn(h, dist: Dist):
        key, b = h
        inside = in_sample_value(b)
        total = half
        for z in set(key):
            total = total + dist.weight(z) * (inside - half)
        return total

    return ParametricLoss(name=name, fn=fn, true_risk_fn=true_risk_fn)


def prop1_paired_loss() -> ParametricLoss:
    """In-sample cost 1 - b: the fair bit makes gen(L) cancel to exactly zero."""
    return _prop1_loss("prop1_paired", lambda b: 1 - b)


def prop1_flipped_loss() -> ParametricLoss:
    """In-sample cost 1 regardless of b: the deviation stays near 1/2 always."""
    return _prop1_loss("prop1_flipped", lambda b: 1)


def worst_case_loss(tj: TrnHypJoint, tol: float = 0.0) -> ParametricLoss:
    """Binary loss attaining the supremum of gen(L): the indicator of D >= 0.

    Cells with D exactly zero (within tol in float mode) are counted and
    reported in params; they sit on the boundary of the maximizing set.
    """
    j = tj.joint
    d = j.weights - product_weights(j)
    boundary = 0
    values = []
    for row in d:
        out_row = []
        for v in row:
            if (v == 0) if j.is_exact else (abs(v) <= tol):
                boundary += 1
            out_row.append(1 if v >= 0 else 0)
        values.append(out_row)
    zsyms, hsyms = j.axes[0], j.axes[1]
    base = table_loss("worst_case", zsyms, hsyms, values)
    pz = j.weights.sum(axis=1)
    hrisk = {
        h: sum(pz[zi] * values[zi][hi] for zi in range(len(zsyms)))
        for hi, h in enumerate(hsyms.symbols)
    }
    return ParametricLoss(
        name="worst_case",
        fn=base.fn,
        params={"boundary_cells": boundary},
        true_risk_fn=lambda h, dist: hrisk[h],
    )


def exhaustive_binary_loss_max(tj: TrnHypJoint):
    """Brute-force sup of |gen(L)| over every 0/1 loss table.

    Exponential in the number of cells; intended for joints with at most
    a dozen cells, where it independently certifies the supremum.
    """
    j = tj.joint
    d = (j.weights - product_weights(j)).ravel()
    cells = len(d)
    if cells > 24:
        raise ValueError(f"{cells} cells is too many for exhaustive search")
    best, best_table = None, None
    for bits in itertools.product((0, 1), repeat=cells):
        total = 0
        for b, v in zip(bits, d):
            if b:
                total = total + v
        total = abs(total)
        if best is None or total > best:
            best, best_table = total, bits
    shape = (len(j.axes[0]), len(j.axes[1]))
    table = np.array(best_table, dtype=object).reshape(shape)
    return best, table


# ---------------------------------------------------------------------------
# ERM consistency


@dataclass(frozen=True)
class ErmConsistency:
    """Markov-style control of the excess true risk of an ERM-like kernel.

    curve rows are (t, P{excess >= t}, info/t, holds); the tail is exact.
    """

    scenario_name: str
    best_hypothesis: Any
    info: object
    excess_points: tuple
    curve: tuple
    holds: bool


def erm_consistency_bound(
    scenario: Scenario,
    loss: ParametricLoss,
    t_grid: Sequence = (0.05, 0.1, 0.15, 0.2, 0.25, 0.3, 0.35, 0.4, 0.45, 0.5),
    budget: int | None = None,
    tol=0,
) -> ErmConsistency:
    """Check P{R_true(H) - min_h R_true(h) >= t} <= vi / t on a grid."""
    tj = exact_trn_hyp_joint(scenario, budget=budget)
    j = tj.joint
    hyp = j.axes[1]
    dist = scenario.data_dist
    risks = {h: true_risk(loss, h, dist) for h in hyp.symbols}
    best_h = min(hyp.symbols, key=lambda h: risks[h])
    floor = risks[best_h]
    ph = j.weights.sum(axis=0)
    acc: dict = {}
    for hi, h in enumerate(hyp.symbols):
        if ph[hi] != 0:
            excess = risks[h] - floor
            acc[excess] = acc.get(excess, 0) + ph[hi]
    points = _merged_points(acc, j.is_exact)
    info = variational_info(j)
    curve = []
    ok = True
    for t in t_grid:
        tail = sum(p for v, p in points if v >= t - (0 if j.is_exact else VALUE_ATOL))
        bound = erm_markov_bound(info, t)
        good = tail <= bound + tol
        ok = ok and good
        curve.append((t, tail, bound, good))
    return ErmConsistency(
        scenario_name=scenario.name,
        best_hypothesis=best_h,
        info=info,
        excess_points=points,
        curve=tuple(curve),
        holds=ok,
    )
