from fractions import Fraction

import numpy as np
import pytest

from stabaudit.dist import (
    Alphabet,
    ArityError,
    ConditioningError,
    Dist,
    DomainMismatchError,
    Joint,
    TransitionKernel,
    overlap,
    product,
    product_weights,
    tv_distance,
    validate,
)
from stabaudit.numeric import EXACT, FLOAT64

AB = Alphabet("x", ("a", "b"))
ABC = Alphabet("x", ("a", "b", "c"))


def exact_dist(alpha, *vals):
    return Dist(alpha, np.array([Fraction(v) for v in vals], dtype=object))


# ---------------------------------------------------------------------------
# alphabets and construction


def test_alphabet_rejects_empty_and_duplicates():
    with pytest.raises(ValueError):
        Alphabet("x", ())
    with pytest.raises(ValueError):
        Alphabet("x", ("a", "a"))


def test_alphabet_lookup():
    assert ABC.index == {"a": 0, "b": 1, "c": 2}
    assert "b" in ABC and "z" not in ABC
    assert len(Alphabet.of_size("z", 5)) == 5


def test_exact_dist_requires_exact_unit_mass():
    with pytest.raises(ValueError):
        exact_dist(AB, Fraction(1, 2), Fraction(1, 3))
    with pytest.raises(ValueError):
        exact_dist(AB, Fraction(3, 2), Fraction(-1, 2))
    with pytest.raises(TypeError):
        Dist(AB, np.array([0.5, Fraction(1, 2)], dtype=object))


def test_float_dist_mass_tolerance():
    Dist(AB, [0.5, 0.5 + 5e-13])
    with pytest.raises(ValueError):
        Dist(AB, [0.5, 0.51])
    with pytest.raises(ValueError):
        Dist(AB, [1.5, -0.5])
    with pytest.raises(ValueError):
        Dist(AB, [np.nan, 1.0])


def test_uniform_exact_and_float():
    u = Dist.uniform(ABC, EXACT)
    assert u.is_exact and u.weight("a") == Fraction(1, 3)
    uf = Dist.uniform(ABC, FLOAT64)
    assert not uf.is_exact
    assert uf.weights.sum() == 1.0  # float gap closed on the last symbol


def test_point_mass_and_from_mapping():
    p = Dist.point_mass(ABC, "b", EXACT)
    assert p.weight("b") == 1 and p.weight("a") == 0
    d = Dist.from_mapping(ABC, {"a": "0.25", "b": "0.75"}, EXACT)
    assert d.weight("a") == Fraction(1, 4)
    assert d.support() == ("a", "b")


def test_expect():
    d = exact_dist(AB, Fraction(1, 4), Fraction(3, 4))
    assert d.expect(lambda s: 1 if s == "b" else 0) == Fraction(3, 4)


# ---------------------------------------------------------------------------
# total variation


def test_tv_hand_values():
    half = exact_dist(AB, Fraction(1, 2), Fraction(1, 2))
    point = exact_dist(AB, Fraction(1), Fraction(0))
    assert tv_distance(half, half) == 0
    assert tv_distance(half, point) == Fraction(1, 2)
    assert overlap(half, point) == Fraction(1, 2)
    other = exact_dist(AB, Fraction(0), Fraction(1))
    assert tv_distance(point, other) == 1


def test_tv_rejects_mismatched_alphabets():
    with pytest.raises(DomainMismatchError):
        tv_distance(Dist.uniform(AB, EXACT), Dist.uniform(ABC, EXACT))


def test_tv_mixed_mode_coerces_to_float():
    p = Dist.uniform(AB, EXACT)
    q = Dist(AB, [0.25, 0.75])
    assert tv_distance(p, q) == pytest.approx(0.25)


def test_tv_metric_properties_fuzz():
    rng = np.random.default_rng(7)
    alpha = Alphabet.of_size("x", 5)
    for _ in range(1000):
        w = rng.dirichlet(np.ones(5), size=3)
        p, q, r = (Dist(alpha, row / row.sum()) for row in w)
        dpq = tv_distance(p, q)
        assert dpq == tv_distance(q, p)
        assert 0 <= dpq <= 1
        assert tv_distance(p, p) == 0
        assert dpq <= tv_distance(p, r) + tv_distance(r, q) + 1e-12


# ---------------------------------------------------------------------------
# joints


def two_axis_joint():
    h = Alphabet("h", ("u", "v", "w"))
    w = np.array(
        [[Fraction(1, 4), Fraction(1, 8), Fraction(1, 8)],
         [Fraction(1, 8), Fraction(1, 4), Fraction(1, 8)]],
        dtype=object,
    )
    return Joint((AB, h), w)


def test_joint_requires_unique_axis_names():
    w = np.full((2, 2), 0.25)
    with pytest.raises(ValueError):
        Joint((AB, Alphabet("x", (0, 1))), w)


def test_marginal_orders_and_types():
    j = two_axis_joint()
    mz = j.marginal("x")
    assert isinstance(mz, Dist)
    assert mz.weight("a") == Fraction(1, 2)
    mh = j.marginal("h")
    assert mh.weight("u") == Fraction(3, 8)
    flipped = j.marginal("h", "x")
    assert isinstance(flipped, Joint)
    assert flipped.axis_names == ("h", "x")
    assert flipped.weight(("v", "b")) == Fraction(1, 4)


def test_condition_renormalizes():
    j = two_axis_joint()
    c = j.condition("x", "a")
    assert isinstance(c, Dist)
    assert c.weight("u") == Fraction(1, 2)
    assert c.weight("v") == Fraction(1, 4)


def test_condition_zero_mass_raises():
    w = np.array([[Fraction(1, 2), Fraction(1, 2)], [Fraction(0), Fraction(0)]], dtype=object)
    j = Joint((AB, Alphabet("h", (0, 1))), w)
    with pytest.raises(ConditioningError):
        j.condition("x", "b")


def test_merge_and_reorder():
    j = two_axis_joint()
    k = Alphabet("k", (0, 1))
    w3 = np.multiply.outer(j.weights, np.array([Fraction(1, 2), Fraction(1, 2)], dtype=object))
    j3 = Joint((AB, j.axes[1], k), w3)
    merged = j3.merge(["h", "k"], "hk")
    assert merged.axis_names == ("x", "hk")
    assert merged.weight(("a", ("u", 0))) == Fraction(1, 8)
    back = j3.reorder("k", "x", "h")
    assert back.axis_names == ("k", "x", "h")
    assert back.weight((1, "a", "u")) == Fraction(1, 8)
    # merged axis takes the slot of its first constituent
    mid = j3.merge(["x", "h"], "xh")
    assert mid.axis_names == ("xh", "k")


def test_merge_arity_guard():
    with pytest.raises(ArityError):
        two_axis_joint().merge(["x"], "y")


def test_to_dist_and_product():
    p = exact_dist(AB, Fraction(1, 4), Fraction(3, 4))
    q = Dist.uniform(Alphabet("y", (0, 1)), EXACT)
    j = product(p, q)
    assert j.weight(("a", 0)) == Fraction(1, 8)
    pw = product_weights(j)
    assert (pw == j.weights).all()  # already independent
    single = j.marginal("y", "x").marginal("y")
    assert single.weight(0) == Fraction(1, 2)


def test_product_weights_on_correlated_joint():
    w = np.array([[Fraction(1, 2), Fraction(0)], [Fraction(0), Fraction(1, 2)]], dtype=object)
    j = Joint((AB, Alphabet("h", (0, 1))), w)
    pw = product_weights(j)
    assert pw[0][0] == Fraction(1, 4)


def test_validate_reports():
    d = validate(Dist.uniform(ABC, EXACT))
    assert d.ok and d.is_exact and d.mass_error == 0
    j = validate(two_axis_joint())
    assert j.ok


# ---------------------------------------------------------------------------
# transition kernels


def test_kernel_row_stochastic_enforced():
    with pytest.raises(ValueError):
        TransitionKernel(AB, AB, [[0.5, 0.4], [0.0, 1.0]])


def test_kernel_push_and_joint():
    k = TransitionKernel(
        AB,
        Alphabet("y", (0, 1)),
        np.array([[Fraction(1), Fraction(0)], [Fraction(1, 2), Fraction(1, 2)]], dtype=object),
    )
    p = exact_dist(AB, Fraction(1, 2), Fraction(1, 2))
    out = k.push(p)
    assert out.weight(0) == Fraction(3, 4)
    j = k.joint_with(p)
    assert j.weight(("b", 1)) == Fraction(1, 4)
    assert j.marginal("y").weight(0) == Fraction(3, 4)
    with pytest.raises(DomainMismatchError):
        k.push(Dist.uniform(ABC, EXACT))
