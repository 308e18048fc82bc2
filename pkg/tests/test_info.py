import math
from fractions import Fraction

import numpy as np
import pytest

from stabaudit.dist import Alphabet, ArityError, Dist, Joint, TransitionKernel
from stabaudit.numeric import EXACT
from stabaudit.info import (
    chain_decompose,
    conditional_variational_info,
    dpi_check,
    mutual_stability,
    prop2_gap_check,
    shannon_mutual_info,
    variational_info,
)

F = Fraction
Z = Alphabet("z", (0, 1))
H = Alphabet("h", (0, 1))
K = Alphabet("k", (0, 1))


def diag_pair():
    """Z = H, a perfectly correlated fair bit."""
    w = np.array([[F(1, 2), F(0)], [F(0), F(1, 2)]], dtype=object)
    return Joint((Z, H), w)


def indep_pair():
    w = np.full((2, 2), F(1, 4), dtype=object)
    return Joint((Z, H), np.array(w, dtype=object))


def test_vi_diag_is_half():
    assert variational_info(diag_pair()) == F(1, 2)
    assert mutual_stability(diag_pair()) == F(1, 2)


def test_vi_independent_is_zero():
    assert variational_info(indep_pair()) == 0
    assert mutual_stability(indep_pair()) == 1


def test_vi_needs_two_axes():
    w = np.array([F(1, 2), F(1, 2)], dtype=object)
    with pytest.raises(ArityError):
        variational_info(Joint((Z,), w))


def test_conditional_vi_zero_when_conditionally_independent():
    # P(z, h, k) = P(z, h) * P(k): conditioning on k changes nothing
    base = diag_pair().weights
    w = np.multiply.outer(base, np.array([F(1, 2), F(1, 2)], dtype=object))
    j = Joint((Z, H, K), w)
    assert conditional_variational_info(j, given="k") == F(1, 2)
    # swap layout: vi(Z; K | H) = 0 since K is pure noise
    j2 = j.reorder("z", "k", "h")
    assert conditional_variational_info(j2, given="h") == 0


def test_conditional_vi_skips_zero_mass_slices():
    w = np.zeros((2, 2, 2), dtype=object)
    w[0, 0, 0] = F(1, 2)
    w[1, 1, 0] = F(1, 2)
    j = Joint((Z, H, K), w)  # k=1 never happens
    assert conditional_variational_info(j, given="k") == F(1, 2)


def test_chain_decompose_duplicate_stage_is_free():
    # H1 = Z, H2 = H1 copied: the second stage adds no information
    w = np.zeros((2, 2, 2), dtype=object)
    w[0, 0, 0] = F(1, 2)
    w[1, 1, 1] = F(1, 2)
    j = Joint((Z, Alphabet("h1", (0, 1)), Alphabet("h2", (0, 1))), w)
    cd = chain_decompose(j)
    assert cd.designated == "z"
    assert cd.total == F(1, 2)
    assert cd.terms == (F(1, 2), 0)
    assert cd.slack == 0
    assert cd.holds()


def test_chain_decompose_designated_elsewhere():
    w = np.zeros((2, 2, 2), dtype=object)
    w[0, 0, 0] = F(1, 2)
    w[1, 1, 1] = F(1, 2)
    j = Joint((Z, Alphabet("h1", (0, 1)), Alphabet("h2", (0, 1))), w)
    cd = chain_decompose(j, designated="h2")
    assert cd.stage_names == ("z", "h1")
    assert cd.holds()


def test_chain_decompose_two_axes():
    cd = chain_decompose(diag_pair())
    assert cd.total == F(1, 2)
    assert cd.terms == (F(1, 2),)


def test_prop2_gaps_nonnegative_on_diag():
    w = np.zeros((2, 2, 2), dtype=object)
    w[0, 0, 0] = F(1, 2)
    w[1, 1, 1] = F(1, 2)
    g = prop2_gap_check(Joint((Z, H, K), w))
    assert g.holds()


def _random_exact_joint(rng, shape):
    raw = rng.integers(1, 20, size=shape)
    total = int(raw.sum())
    w = np.empty(shape, dtype=object)
    for idx in np.ndindex(shape):
        w[idx] = F(int(raw[idx]), total)
    return w


def test_chain_prop2_triangle_fuzz_exact():
    rng = np.random.default_rng(3)
    axes = (Alphabet("a", (0, 1, 2)), Alphabet("b", (0, 1)), Alphabet("c", (0, 1, 2)))
    for _ in range(60):
        j = Joint(axes, _random_exact_joint(rng, (3, 2, 3)))
        cd = chain_decompose(j)
        assert cd.slack >= 0
        assert prop2_gap_check(j).holds()
        # triangle: vi(A; B) <= vi(A; C) + vi(A; B | C)
        ab = variational_info(j.marginal("a", "b"))
        ac = variational_info(j.marginal("a", "c"))
        b_given_c = conditional_variational_info(j.reorder("a", "b", "c"), given="c")
        assert ab <= ac + b_given_c
        # information cannot hurt: vi(A; B) <= vi(A; (B, C))
        abc = variational_info(j.merge(["b", "c"], "bc"))
        assert ab <= abc


def test_dpi_on_exact_chain():
    p = Dist(Z, np.array([F(1, 3), F(2, 3)], dtype=object))
    k1 = TransitionKernel(
        Z, H, np.array([[F(3, 4), F(1, 4)], [F(1, 4), F(3, 4)]], dtype=object)
    )
    k2 = TransitionKernel(
        H, K, np.array([[F(9, 10), F(1, 10)], [F(1, 2), F(1, 2)]], dtype=object)
    )
    chk = dpi_check(p, k1, k2)
    assert chk.holds()
    assert chk.info_c_given_b == 0
    assert chk.info_ac <= chk.info_ab


def test_dpi_rejects_non_composing_kernels():
    p = Dist.uniform(Z, EXACT)
    k1 = TransitionKernel(Z, H, np.full((2, 2), 0.5))
    bad = TransitionKernel(Alphabet("w", (0, 1, 2)), K, np.full((3, 2), 0.5))
    with pytest.raises(ArityError):
        dpi_check(p, k1, bad)


def test_shannon_mutual_info():
    assert shannon_mutual_info(indep_pair()) == 0
    assert shannon_mutual_info(diag_pair()) == pytest.approx(math.log(2))
