"""Learning algorithms as stochastic kernels, and exact enumeration.

A learner is a kernel K(h | S) from m-tuples over a finite observation
alphabet to a finite hypothesis alphabet.  With S ~ P^m and Z_trn a
uniformly chosen coordinate of S, the training joint is

    P(z, h) = sum_S P(S) K(h | S) #{i : S_i = z} / m.

Every built-in kernel is permutation symmetric, so enumeration runs over
sorted multisets weighted by multinomial coefficients instead of all n^m
ordered tuples; the two give identical joints, and the enumeration budget
counts kernel evaluations (one per multiset).  Kernels return sparse
mappings {hypothesis: weight}; hypothesis alphabets are m-dependent
callables so huge spaces are never materialized unless enumeration needs
them.
"""

from __future__ import annotations

import itertools
import math
import os
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Any, Callable, Iterator, Mapping, Sequence

import numpy as np

from .dist import Alphabet, Dist, DomainMismatchError, Joint
from .numeric import FLOAT64, NumericMode, coerce_number, zeros

DEFAULT_BUDGET = 10_000_000
BUDGET_ENV_VAR = "STABAUDIT_BUDGET"


class EnumerationBudgetError(RuntimeError):
    """Exact enumeration would exceed the kernel-evaluation budget."""

    def __init__(self, needed: int, budget: int, what: str):
        super().__init__(f"{what} needs {needed} kernel evaluations, budget is {budget}")
        self.needed = needed
        self.budget = budget


def default_budget() -> int:
    raw = os.environ.get(BUDGET_ENV_VAR)
    return int(raw) if raw else DEFAULT_BUDGET


@dataclass(frozen=True, eq=False)
class LearnerKernel:
    """Stochastic map from samples to hypotheses.

    kernel(sample) returns a sparse mapping {hypothesis: weight} summing
    to 1; hypotheses(m) names the full alphabet for sample size m.  Set
    symmetric=False for kernels that depend on sample order.
    """

    name: str
    domain: Alphabet
    kernel: Callable[[tuple], Mapping[Any, Any]]
    hypotheses: Callable[[int], Alphabet]
    params: Mapping[str, Any] = field(default_factory=dict)
    symmetric: bool = True


@dataclass(frozen=True, eq=False)
class Scenario:
    """A learner bound to a data distribution and sample size."""

    name: str
    learner: LearnerKernel
    data_dist: Dist
    m: int
    loss: Any = None  # ParametricLoss, kept loose to avoid an import cycle
    seed: int = 0
    _cache: dict = field(default_factory=dict, repr=False, compare=False)

    def __post_init__(self):
        if self.m < 1:
            raise ValueError(f"sample size m must be >= 1, got {self.m}")
        if self.data_dist.alphabet != self.learner.domain:
            raise DomainMismatchError(
                f"data distribution is over {self.data_dist.alphabet.name!r}, "
                f"learner expects {self.learner.domain.name!r}"
            )

    def cached(self, key, build):
        if key not in self._cache:
            self._cache[key] = build()
        return self._cache[key]


@dataclass(frozen=True, eq=False)
class TrnHypJoint:
    """Exactly enumerated joint over (training example, hypothesis)."""

    joint: Joint
    scenario: Scenario
    method: str
    kernel_evals: int


def collision_budget(scenario: Scenario) -> Fraction:
    """m^2 / n, the exactness correction for sample self-collisions."""
    return Fraction(scenario.m * scenario.m, len(scenario.learner.domain))


def enumeration_size(n: int, m: int, symmetric: bool) -> int:
    return math.comb(n + m - 1, m) if symmetric else n**m


def _multinomial(m: int, counts) -> int:
    coeff, rem = 1, m
    for c in counts:
        coeff *= math.comb(rem, c)
        rem -= c
    return coeff


def iter_weighted_samples(
    data_dist: Dist, m: int, symmetric: bool = True
) -> Iterator[tuple[tuple, Any, tuple[tuple[int, int], ...]]]:
    """Yield (sample, weight, counts) over samples of positive probability.

    counts lists (symbol index, multiplicity) pairs.  In symmetric mode each
    sorted multiset appears once with its multinomial coefficient folded
    into the weight.
    """
    symbols = data_dist.alphabet.symbols
    w = data_dist.weights
    n = len(symbols)
    if symmetric:
        for combo in itertools.combinations_with_replacement(range(n), m):
            counts = [(i, len(list(g))) for i, g in itertools.groupby(combo)]
            weight = _multinomial(m, (c for _, c in counts))
            for i, c in counts:
                weight = weight * w[i] ** c
            if weight == 0:
                continue
            yield tuple(symbols[i] for i in combo), weight, tuple(counts)
    else:
        for combo in itertools.product(range(n), repeat=m):
            weight = 1
            for i in combo:
                weight = weight * w[i]
            if weight == 0:
                continue
            counts = tuple(
                (i, len(list(g))) for i, g in itertools.groupby(sorted(combo))
            )
            yield tuple(symbols[i] for i in combo), weight, counts


def _admit(scenario: Scenario, budget: int | None, what: str, factor: int = 1) -> int:
    budget = default_budget() if budget is None else budget
    needed = factor * enumeration_size(
        len(scenario.learner.domain), scenario.m, scenario.learner.symmetric
    )
    if needed > budget:
        raise EnumerationBudgetError(needed, budget, what)
    return budget


def exact_trn_hyp_joint(scenario: Scenario, budget: int | None = None) -> TrnHypJoint:
    """Enumerate P(Z_trn, H) exactly; cached per scenario."""

    def build() -> TrnHypJoint:
        _admit(scenario, budget, f"joint for {scenario.name!r}")
        learner, dist, m = scenario.learner, scenario.data_dist, scenario.m
        hyp = learner.hypotheses(m)
        zidx = dist.alphabet.index
        hidx = hyp.index
        acc = zeros((len(dist.alphabet), len(hyp)), dist.mode)
        evals = 0
        for sample, w, counts in iter_weighted_samples(dist, m, learner.symmetric):
            out = learner.kernel(sample)
            evals += 1
            per_z = [(i, w * c / m) for i, c in counts]
            for h, ph in out.items():
                if ph == 0:
                    continue
                col = hidx[h]
                for row, wz in per_z:
                    acc[row, col] += wz * ph
        joint = Joint((dist.alphabet, hyp), acc)
        method = "exact-multiset" if learner.symmetric else "exact-ordered"
        return TrnHypJoint(joint=joint, scenario=scenario, method=method, kernel_evals=evals)

    return scenario.cached("trn_hyp_joint", build)


@dataclass(frozen=True, eq=False)
class SideInfoKernel:
    """Auxiliary output K drawn from the sample (and possibly the hypothesis)."""

    name: str
    alphabet_for: Callable[[int], Alphabet]
    fn: Callable[[tuple, Any], Mapping[Any, Any]]


def exact_threeway_joint(
    scenario: Scenario, side: SideInfoKernel, budget: int | None = None
) -> Joint:
    """Enumerate P(Z_trn, H, K) with K ~ side.fn(sample, H)."""

    def build() -> Joint:
        _admit(scenario, budget, f"threeway joint for {scenario.name!r}")
        learner, dist, m = scenario.learner, scenario.data_dist, scenario.m
        hyp = learner.hypotheses(m)
        side_alpha = side.alphabet_for(m)
        hidx, kidx = hyp.index, side_alpha.index
        acc = zeros((len(dist.alphabet), len(hyp), len(side_alpha)), dist.mode)
        for sample, w, counts in iter_weighted_samples(dist, m, learner.symmetric):
            out = learner.kernel(sample)
            per_z = [(i, w * c / m) for i, c in counts]
            for h, ph in out.items():
                if ph == 0:
                    continue
                col = hidx[h]
                for k, pk in side.fn(sample, h).items():
                    if pk == 0:
                        continue
                    lay = kidx[k]
                    for row, wz in per_z:
                        acc[row, col, lay] += wz * ph * pk
        return Joint((dist.alphabet, hyp, side_alpha), acc)

    return scenario.cached(("threeway", side.name), build)


def sample_hypothesis_mutual_info(scenario: Scenario, budget: int | None = None) -> float:
    """Shannon I(S_m; H) in nats, streamed without materializing P(S, H).

    Two passes: the first accumulates the hypothesis marginal, the second
    sums P(S) K(h|S) log(K(h|S) / P(h)).  For symmetric kernels, grouping
    ordered samples into multisets leaves the value unchanged.
    """

    def build() -> float:
        _admit(scenario, budget, f"mutual information for {scenario.name!r}", factor=2)
        learner, dist, m = scenario.learner, scenario.data_dist, scenario.m
        marg: dict = {}
        for sample, w, _ in iter_weighted_samples(dist, m, learner.symmetric):
            for h, ph in learner.kernel(sample).items():
                if ph != 0:
                    marg[h] = marg.get(h, 0) + w * ph
        total = 0.0
        for sample, w, _ in iter_weighted_samples(dist, m, learner.symmetric):
            for h, ph in learner.kernel(sample).items():
                if ph != 0:
                    total += float(w * ph) * math.log(float(ph) / float(marg[h]))
        return total

    return scenario.cached("sample_hyp_mi", build)


def effective_epsilon(learner: LearnerKernel, m: int, budget: int | None = None):
    """Largest |log K(h|S) / K(h|S')| over samples differing in one entry.

    This is the privacy loss measured on singleton hypothesis events, which
    is the full supremum for multiplicative (delta = 0) guarantees.  Returns
    (epsilon, pairs_checked, witness) where witness = (S, S', h) attains the
    maximum; epsilon is inf if some hypothesis flips between zero and
    positive probability.
    """
    budget = default_budget() if budget is None else budget
    symbols = learner.domain.symbols
    n = len(symbols)
    pairs = math.comb(n + m - 2, m - 1) * math.comb(n, 2) * 2
    if pairs > budget:
        raise EnumerationBudgetError(pairs, budget, "adjacent-sample scan")
    best, checked, witness = 0.0, 0, None
    for prefix in itertools.combinations_with_replacement(symbols, m - 1):
        for a, b in itertools.combinations(symbols, 2):
            s1 = tuple(sorted(prefix + (a,)))
            s2 = tuple(sorted(prefix + (b,)))
            d1, d2 = learner.kernel(s1), learner.kernel(s2)
            checked += 1
            for h in set(d1) | set(d2):
                p, q = d1.get(h, 0), d2.get(h, 0)
                if p == 0 and q == 0:
                    continue
                if p == 0 or q == 0:
                    return float("inf"), checked, (s1, s2, h)
                loss = abs(math.log(float(Fraction(p) / Fraction(q))))
                if loss > best:
                    best, witness = loss, (s1, s2, h)
    return best, checked, witness


# ---------------------------------------------------------------------------
# built-in learners


def subsample_release(
    domain: Alphabet, k: int, delta=1, *, mode: NumericMode = FLOAT64
) -> LearnerKernel:
    """Release k sample entries (sorted) with probability delta, else nothing.

    Hypotheses are sorted k-tuples of domain symbols plus the empty tuple.
    """
    if k < 1:
        raise ValueError("k must be >= 1")
    delta = coerce_number(delta, mode)
    if not 0 < delta <= 1:
        raise ValueError(f"delta must be in (0, 1], got {delta}")
    one = Fraction(1) if mode.exact else 1.0

    def kern(sample: tuple) -> dict:
        m = len(sample)
        if k > m:
            raise ValueError(f"cannot release {k} of {m} entries")
        out: dict = {}
        if delta != 1:
            out[()] = one - delta
        share = delta / math.comb(m, k)
        for pick in itertools.combinations(range(m), k):
            h = tuple(sorted(sample[i] for i in pick))
            out[h] = out.get(h, 0) + share
        return out

    def hyp(m: int) -> Alphabet:
        tuples = tuple(itertools.combinations_with_replacement(domain.symbols, k))
        return Alphabet("h", ((),) + tuples)

    return LearnerKernel(
        name="subsample_release",
        domain=domain,
        kernel=kern,
        hypotheses=hyp,
        params={"k": k, "delta": delta},
    )


def randomized_response_dp(
    epsilon: float, *, mode: NumericMode = FLOAT64, domain: Alphabet | None = None
) -> LearnerKernel:
    """Majority vote over a binary sample, released through randomized response.

    The true majority bit is kept with probability e^eps / (1 + e^eps) and
    flipped otherwise, which makes the release eps-differentially private;
    ties (even m) release a fair coin.  In exact mode the keep probability
    is the rationalized float64 value, so the realized epsilon matches the
    nominal one to within float rounding.
    """
    if epsilon <= 0:
        raise ValueError("epsilon must be positive")
    domain = domain or Alphabet("z", (0, 1))
    if set(domain.symbols) != {0, 1}:
        raise ValueError("randomized response expects the binary alphabet {0, 1}")
    keep = math.exp(epsilon) / (1.0 + math.exp(epsilon))
    if mode.exact:
        keep = Fraction(keep)
    flip = 1 - keep
    half = Fraction(1, 2) if mode.exact else 0.5

    def kern(sample: tuple) -> dict:
        ones = sum(sample)
        if 2 * ones == len(sample):
            return {0: half, 1: half}
        maj = 1 if 2 * ones > len(sample) else 0
        return {maj: keep, 1 - maj: flip}

    return LearnerKernel(
        name="randomized_response_dp",
        domain=domain,
        kernel=kern,
        hypotheses=lambda m: Alphabet("h", (0, 1)),
        params={"epsilon": epsilon, "keep_prob": keep},
    )


def erm_finite(
    domain: Alphabet,
    hypotheses: Sequence,
    loss_table: Mapping,
    *,
    mode: NumericMode = FLOAT64,
) -> LearnerKernel:
    """Empirical risk minimization over an explicit finite class.

    loss_table maps (symbol, hypothesis) to a loss in [0, 1].  Ties go to
    the hypothesis listed first, so the kernel is deterministic.
    """
    hyp_alpha = Alphabet("h", tuple(hypotheses))
    table = {}
    for (z, h), v in loss_table.items():
        val = coerce_number(v, mode)
        if not 0 <= val <= 1:
            raise ValueError(f"loss_table[{(z, h)}] = {val} outside [0, 1]")
        table[(z, h)] = val
    for z in domain.symbols:
        for h in hyp_alpha.symbols:
            if (z, h) not in table:
                raise ValueError(f"loss_table is missing entry for {(z, h)}")

    def kern(sample: tuple) -> dict:
        best_h, best_risk = None, None
        for h in hyp_alpha.symbols:
            risk = sum(table[(z, h)] for z in sample)
            if best_risk is None or risk < best_risk:
                best_h, best_risk = h, risk
        return {best_h: 1}

    return LearnerKernel(
        name="erm_finite",
        domain=domain,
        kernel=kern,
        hypotheses=lambda m: hyp_alpha,
        params={"hypotheses": tuple(hypotheses), "loss_table": dict(table)},
    )


def constant_learner(domain: Alphabet, symbol="fixed") -> LearnerKernel:
    """Ignores the sample entirely; the do-nothing baseline."""
    alpha = Alphabet("h", (symbol,))
    return LearnerKernel(
        name="constant",
        domain=domain,
        kernel=lambda sample: {symbol: 1},
        hypotheses=lambda m: alpha,
        params={"symbol": symbol},
    )


def prop1_counterexample(domain_size: int) -> LearnerKernel:
    """Memorizer whose own expected generalization risk is exactly zero.

    The hypothesis is the sorted sample paired with a fair bit b.  Under
    the paired loss (see losses), b flips the sign of the deviation, so
    the two signs cancel in expectation while |deviation| stays near 1/2;
    under the flipped loss the deviation is near 1/2 with probability one.
    """
    if domain_size < 2:
        raise ValueError("domain_size must be >= 2")
    domain = Alphabet.of_size("z", domain_size)
    half = Fraction(1, 2)

    def kern(sample: tuple) -> dict:
        key = tuple(sorted(sample))
        return {(key, 0): half, (key, 1): half}

    def hyp(m: int) -> Alphabet:
        keys = itertools.combinations_with_replacement(domain.symbols, m)
        return Alphabet("h", tuple((key, b) for key in keys for b in (0, 1)))

    return LearnerKernel(
        name="prop1_counterexample",
        domain=domain,
        kernel=kern,
        hypotheses=hyp,
        params={"domain_size": domain_size},
    )


# ---------------------------------------------------------------------------
# side information builders


def duplicate_side_info(learner: LearnerKernel) -> SideInfoKernel:
    """K is a verbatim copy of H."""

    def alphabet_for(m: int) -> Alphabet:
        h = learner.hypotheses(m)
        return Alphabet("k", h.symbols)

    return SideInfoKernel(
        name="duplicate", alphabet_for=alphabet_for, fn=lambda sample, h: {h: 1}
    )


def rerun_side_info(learner: LearnerKernel) -> SideInfoKernel:
    """K is an independent rerun of the learner on the same sample."""

    def alphabet_for(m: int) -> Alphabet:
        h = learner.hypotheses(m)
        return Alphabet("k", h.symbols)

    return SideInfoKernel(
        name="rerun", alphabet_for=alphabet_for, fn=lambda sample, h: learner.kernel(sample)
    )


def deviation_sign_side_info(scenario: Scenario, loss, threshold) -> SideInfoKernel:
    """Three-valued flag comparing empirical to true risk at a threshold.

    K = +1 when R_emp(h) - R_true(h) >= threshold, -1 when <= -threshold,
    else 0.
    """
    from .losses import empirical_risk, true_risk  # local to avoid a cycle

    dist = scenario.data_dist
    cache: dict = {}

    def fn(sample: tuple, h) -> dict:
        if h not in cache:
            cache[h] = true_risk(loss, h, dist)
        g = empirical_risk(loss, sample, h) - cache[h]
        if g >= threshold:
            return {1: 1}
        if g <= -threshold:
            return {-1: 1}
        return {0: 1}

    return SideInfoKernel(
        name=f"deviation_sign@{threshold}",
        alphabet_for=lambda m: Alphabet("k", (-1, 0, 1)),
        fn=fn,
    )


# ---------------------------------------------------------------------------
# stability search


@dataclass(frozen=True)
class StabilitySearch:
    """Supremum of vi(Z_trn; H) over a family of data distributions.

    The supremum over a finite family only lower-bounds the worst case over
    all distributions, so sup_info is a one-sided certificate.
    """

    learner_name: str
    m: int
    infos: tuple
    sup_info: object
    argmax_index: int

    @property
    def argmax_info(self):
        return self.infos[self.argmax_index]


def stability_search(
    learner: LearnerKernel, m: int, family: Sequence[Dist], budget: int | None = None
) -> StabilitySearch:
    if not family:
        raise ValueError("need at least one candidate distribution")
    infos = []
    from .info import variational_info  # deferred: info does not know learners

    for dist in family:
        scenario = Scenario(name="stability-probe", learner=learner, data_dist=dist, m=m)
        tj = exact_trn_hyp_joint(scenario, budget=budget)
        infos.append(variational_info(tj.joint))
    best = max(range(len(infos)), key=lambda i: infos[i])
    return StabilitySearch(
        learner_name=learner.name,
        m=m,
        infos=tuple(infos),
        sup_info=infos[best],
        argmax_index=best,
    )


def simplex_grid(alphabet: Alphabet, resolution: int, mode: NumericMode | None = None) -> tuple[Dist, ...]:
    """All distributions on the alphabet with weights in multiples of 1/resolution."""
    from .numeric import EXACT

    mode = mode or EXACT
    n = len(alphabet)
    out = []
    for cut in itertools.combinations(range(resolution + n - 1), n - 1):
        bounds = (-1,) + cut + (resolution + n - 1,)
        counts = [bounds[i + 1] - bounds[i] - 1 for i in range(n)]
        if mode.exact:
            w = np.array([Fraction(c, resolution) for c in counts], dtype=object)
        else:
            w = np.array([c / resolution for c in counts], dtype=np.float64)
        out.append(Dist(alphabet, w))
    return tuple(out)
