from fractions import Fraction

import pytest
from hypothesis import given, strategies as st

from metaplectic.localfield import (FieldConfig, PrecisionError, RootOfUnity, TruncatedElement,
                                    decompose_unit, dlog, is_nth_power, teichmuller,
                                    unit_decomposition_table, unit_group_generators)

CFG5 = FieldConfig(5, 2)


def test_field_config_rejects_bad_parameters():
    with pytest.raises(ValueError):
        FieldConfig(6, 2)
    with pytest.raises(ValueError):
        FieldConfig(7, 4)  # 4 does not divide 6
    with pytest.raises(ValueError):
        FieldConfig(5, 1)


def test_primitive_root_generates():
    for p in (5, 7, 13):
        g = FieldConfig(p, 2).g
        assert pow(g, p - 1, p) == 1
        assert all(pow(g, k, p) != 1 for k in range(1, p - 1))


@pytest.mark.parametrize("u,expected", [(1, 0), (2, 1), (4, 2)])
def test_dlog_examples(u, expected):
    assert CFG5.g == 2
    assert dlog(CFG5, u) == expected


@pytest.mark.parametrize("p", [5, 7, 13])
def test_dlog_matches_power_table(p):
    cfg = FieldConfig(p, 2)
    for k in range(p - 1):
        assert dlog(cfg, pow(cfg.g, k, p)) == k


@pytest.mark.parametrize("x,expected", [(4, True), (5, False), (6, True)])
def test_is_nth_power_examples(x, expected):
    assert is_nth_power(TruncatedElement.from_int(CFG5, x), 2) is expected


def _has_root(p, n, val, unit):
    # exhaustive search for y with y^n = x to precision 2
    if val % n:
        return False
    N = p * p
    return any(pow(y, n, N) == unit % N for y in range(1, N) if y % p)


@pytest.mark.parametrize("p,n", [(5, 2), (5, 4), (7, 3), (7, 6), (13, 4)])
def test_is_nth_power_against_root_search(p, n):
    cfg = FieldConfig(p, n)
    for val in range(-2, 3):
        for u in range(1, p * p):
            if u % p:
                assert is_nth_power(TruncatedElement(val, u, cfg), n) == _has_root(p, n, val, u)


def test_unit_group_generator_examples():
    t, u = unit_group_generators(CFG5, 1)
    assert t.unit % 5 == 2
    assert teichmuller(5, 2, 2) == 7
    assert pow(7, 4, 25) == 1
    assert u.unit == 6


@pytest.mark.parametrize("p", [5, 7, 13])
@pytest.mark.parametrize("m", [1, 2, 3])
def test_unit_decomposition_is_bijective(p, m):
    cfg = FieldConfig(p, 2)
    N = p ** m
    t = teichmuller(p, cfg.g, m)
    seen = {}
    for a in range(p - 1):
        for b in range(p ** (m - 1)):
            seen[pow(t, a, N) * pow(1 + p, b, N) % N] = (a, b)
    units = [x for x in range(N) if x % p]
    assert sorted(seen) == units
    A, B = unit_decomposition_table(p, cfg.g, m)
    for x in units:
        assert (A[x], B[x]) == seen[x]
        assert decompose_unit(cfg, x, m) == seen[x]


units = st.integers(1, 5 ** 4 - 1).filter(lambda u: u % 5)
vals = st.integers(-6, 6)


@given(vals, units, vals, units)
def test_multiplication_law(v1, u1, v2, u2):
    x, y = TruncatedElement(v1, u1, CFG5), TruncatedElement(v2, u2, CFG5)
    z = x * y
    assert z.val == v1 + v2
    assert z.unit == u1 * u2 % CFG5.modulus


@given(vals, units)
def test_inverse_is_identity(v, u):
    x = TruncatedElement(v, u, CFG5)
    one = x * x.inverse()
    assert (one.val, one.unit) == (0, 1)


@given(st.fractions(max_denominator=10 ** 4).filter(lambda q: q != 0))
def test_fraction_roundtrip(q):
    x = TruncatedElement.from_fraction(CFG5, q)
    back = x.to_fraction()
    # equality up to the truncation p^(val+L)
    diff = Fraction(back) - Fraction(q)
    assert diff == 0 or TruncatedElement.from_fraction(CFG5, diff).val >= x.val + CFG5.precision


def test_precision_loss_is_reported():
    x = TruncatedElement.from_int(CFG5, 1)
    y = TruncatedElement.from_int(CFG5, 1 + 5 ** 4)
    with pytest.raises((PrecisionError, ZeroDivisionError, ValueError)):
        (x - y).inverse()


def test_root_of_unity_group_law():
    z = RootOfUnity(3, 4)
    assert (z * z.inverse()).is_one()
    assert z ** 4 == RootOfUnity.one(4)
    assert z.order() == 4
