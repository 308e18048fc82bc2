"""Ordered brute-force oracles, independent of the package's enumeration.

Everything here walks all n^m ordered samples with plain dicts and exact
Fractions: slow but obviously correct.  Tests cross-check the multiset
engine against these on small scenarios.
"""

from fractions import Fraction
from itertools import product


def joint_pairs(dist_map, kernel, m):
    """Sparse P(z_trn, h) over all ordered samples of length m."""
    acc = {}
    symbols = list(dist_map)
    inv_m = Fraction(1, m)
    for sample in product(symbols, repeat=m):
        w = Fraction(1)
        for z in sample:
            w = w * dist_map[z]
        if w == 0:
            continue
        out = kernel(sample)
        for z in sample:
            for h, ph in out.items():
                if ph != 0:
                    key = (z, h)
                    acc[key] = acc.get(key, 0) + w * inv_m * Fraction(ph)
    return acc


def pair_marginals(acc):
    pz, ph = {}, {}
    for (z, h), p in acc.items():
        pz[z] = pz.get(z, 0) + p
        ph[h] = ph.get(h, 0) + p
    return pz, ph


def variational_info_pairs(acc):
    """tv(joint, product of marginals) from a sparse pair dict."""
    pz, ph = pair_marginals(acc)
    total = Fraction(0)
    for z, wz in pz.items():
        for h, wh in ph.items():
            total += abs(acc.get((z, h), 0) - wz * wh)
    return total / 2


def gen_risk_pairs(acc, loss_fn):
    """sum (joint - product) * loss over the pair support."""
    pz, ph = pair_marginals(acc)
    total = Fraction(0)
    for z, wz in pz.items():
        for h, wh in ph.items():
            d = acc.get((z, h), 0) - wz * wh
            if d != 0:
                total += d * Fraction(loss_fn(z, h))
    return total


def deviation_points(dist_map, kernel, m, loss_fn):
    """Exact law of R_emp(h) - R_true(h) as sorted (value, prob) pairs."""
    symbols = list(dist_map)
    true = {}
    acc = {}
    inv_m = Fraction(1, m)
    for sample in product(symbols, repeat=m):
        w = Fraction(1)
        for z in sample:
            w = w * dist_map[z]
        if w == 0:
            continue
        for h, ph in kernel(sample).items():
            if ph == 0:
                continue
            if h not in true:
                true[h] = sum(dist_map[z] * Fraction(loss_fn(z, h)) for z in symbols)
            emp = sum(Fraction(loss_fn(z, h)) for z in sample) * inv_m
            g = emp - true[h]
            acc[g] = acc.get(g, 0) + w * Fraction(ph)
    return sorted(acc.items())
