"""Dilation-finiteness decisions, exponent-2 obstructions, max-law formulas."""

import itertools
import random

import pytest

from addbasis import (
    FiniteSet,
    GroupSpec,
    NonnegativeMax,
    Summand,
    WitnessError,
    dilation_finite,
    exponent2_triple,
    gamma2_infeasible,
    max_semigroup_counts,
    rep_fn,
    restricted_rep_fn,
)

Z = GroupSpec([Summand(0, 1)])
G2_Z5 = GroupSpec([Summand(2, None), Summand(5, 1)])
G4 = GroupSpec([Summand(4, None)])
G2_G3 = GroupSpec([Summand(2, None), Summand(3, None)])
F2_3 = GroupSpec([Summand(2, 3)])


def dilation_sizes(spec, h, widths):
    """|h * G_k| for finite truncations G_k, by exhaustive enumeration."""
    sizes = []
    for k in widths:
        t = spec.truncate(k)
        n = t.carrier_size()
        if n is None:
            # integer-line factors: box truncation [-k, k] per coordinate
            els = _box_elements(t, k)
        else:
            els = [t.enumerate_element(i) for i in range(n)]
        sizes.append(len({t.scale(h, e) for e in els}))
    return sizes


def _box_elements(spec, k):
    ranges = []
    for d in spec.factor_orders():
        ranges.append(range(d) if d else range(-k, k + 1))
    out = []
    for combo in itertools.product(*ranges):
        out.append(spec.element_from_coords(list(enumerate(combo))))
    return out


def test_dilation_decisions_match_examples():
    d = dilation_finite(G2_Z5, 2)
    assert d.finite
    assert d.decomposition == {
        "finite_part": [5],
        "torsion_part": {"2": "inf"},
    }
    assert not dilation_finite(Z, 2).finite
    assert not dilation_finite(G4, 2).finite  # 4 does not divide 2
    d6 = dilation_finite(G2_G3, 6)
    assert d6.finite
    assert d6.decomposition["finite_part"] == []
    assert d6.decomposition["torsion_part"] == {"2": "inf", "3": "inf"}


def test_dilation_integer_summand_always_infinite():
    # a single Z copy has an element of infinite order, whatever the rest is
    mixed = GroupSpec([Summand(3, 1), Summand(0, 1)])
    assert not dilation_finite(mixed, 3).finite
    assert not dilation_finite(GroupSpec([Summand(0, None)]), 7).finite


def test_dilation_h1_and_finite_groups():
    assert not dilation_finite(GroupSpec([Summand(2, None)]), 1).finite
    assert dilation_finite(F2_3, 1).finite
    assert dilation_finite(F2_3, 5).finite  # finite group, any h


def test_dilation_agrees_with_truncation_growth():
    # bounded size sequence <=> finite verdict, on widths 1..5
    cases = [
        (G2_Z5, 2),
        (Z, 2),
        (G4, 2),
        (G2_G3, 6),
        (GroupSpec([Summand(3, None)]), 2),
        (GroupSpec([Summand(2, None), Summand(4, None)]), 4),
    ]
    for spec, h in cases:
        verdict = dilation_finite(spec, h).finite
        widths = range(1, 6)
        if any(s.order == 0 for s in spec.summands):
            widths = range(1, 4)  # boxes grow fast
        sizes = dilation_sizes(spec, h, widths)
        bounded = sizes[-1] == sizes[-2]
        growing = all(a < b for a, b in zip(sizes, sizes[1:]))
        assert verdict == bounded
        assert verdict != growing


def test_brute_force_gamma4_doubling_sizes():
    # |2 * Gamma4^k| = 2^k
    sizes = dilation_sizes(G4, 2, range(1, 7))
    assert sizes == [2 ** k for k in range(1, 7)]


def test_exponent2_triple_frozen_example():
    B = FiniteSet(F2_3, [(0, 0, 0), (0, 0, 1), (0, 1, 0), (0, 1, 1)])
    w = exponent2_triple(B, (0, 1, 1))
    assert w.x == (0, 1, 1)
    assert w.y == (0, 0, 1)
    assert w.z == (0, 1, 0)
    assert w.check(B)


def test_exponent2_triple_requires_two_reps():
    B = FiniteSet(F2_3, [(0, 0, 0), (0, 0, 1)])
    for mask in range(8):
        x = tuple(mask >> i & 1 for i in range(3))
        with pytest.raises(WitnessError):
            exponent2_triple(B, x)


def test_exponent2_triple_needs_exponent_two():
    B = FiniteSet(Z, [0, 1, 2, 3])
    with pytest.raises(WitnessError):
        exponent2_triple(B, 3)


def test_exponent2_triple_exhaustive_f2_3():
    els = [tuple(m >> i & 1 for i in range(3)) for m in range(8)]
    for mask in range(256):
        subset = [e for i, e in enumerate(els) if mask >> i & 1]
        B = FiniteSet(F2_3, subset)
        for x in els:
            r = restricted_rep_fn(B, x)
            if r >= 2:
                w = exponent2_triple(B, x)
                assert w.check(B)
                assert len({w.x, w.y, w.z}) == 3


def test_exponent2_triple_randomized_f2_10():
    rng = random.Random(31)
    F2_10 = GroupSpec([Summand(2, 10)])
    for _ in range(30):
        els = {
            tuple(rng.randrange(2) for _ in range(10))
            for _ in range(rng.randrange(4, 16))
        }
        B = FiniteSet(F2_10, els)
        hits = 0
        for x in {F2_10.add(p, q) for p in B for q in B if p != q}:
            if restricted_rep_fn(B, x) >= 2:
                w = exponent2_triple(B, x)
                assert w.check(B)
                hits += 1
        # not every draw has a doubly-represented sum; that is fine
        _ = hits


def test_gamma2_infeasible():
    one = (0, 0, 1)
    other = (0, 1, 0)
    els = [tuple(m >> i & 1 for i in range(3)) for m in range(8)]
    f = {x: 1 for x in els}
    assert gamma2_infeasible(f) is False
    f[one] = 2
    assert gamma2_infeasible(f) is True
    f[other] = 5
    assert gamma2_infeasible(f) is True
    f[(1, 1, 1)] = 2
    assert gamma2_infeasible(f) is False  # three heavy elements: not excluded
    f2 = {x: 1 for x in els}
    f2[one] = float("inf")
    assert gamma2_infeasible(f2) is True
    with pytest.raises(ValueError):
        gamma2_infeasible({one: 0})


def test_max_counts_formula_examples():
    assert max_semigroup_counts({0, 1, 2}, 10) == (8, 7)
    assert max_semigroup_counts(set(), 5) == (6, 5)


def test_max_counts_brute_force_agreement():
    # the closed form equals pair enumeration under the max law
    semi = NonnegativeMax()
    rng = random.Random(37)
    for _ in range(60):
        missing = {rng.randrange(10) for _ in range(rng.randrange(0, 6))}
        B = FiniteSet(semi, [v for v in range(60) if v not in missing])
        top = max(missing) if missing else 0
        for n in list(range(0, 12)) + [25, 59]:
            r, rr = max_semigroup_counts(missing, n)
            assert r == rep_fn(B, n)
            assert rr == restricted_rep_fn(B, n)
            if n > top and n > 0:
                assert (r, rr) == (n + 1 - len(missing), n - len(missing))
