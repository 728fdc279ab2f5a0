import pytest
from hypothesis import given, strategies as st

from metaplectic.hilbert import (check_laws, check_laws_direct, eta, eta_unit_exp,
                                 hilbert_symbol, hilbert_symbol_direct)
from metaplectic.localfield import FieldConfig, TruncatedElement

CFG5 = FieldConfig(5, 2)


def te(cfg, x):
    return TruncatedElement.from_int(cfg, x)


def test_symbol_examples():
    assert hilbert_symbol(te(CFG5, 2), te(CFG5, 5)).exp == 1
    assert hilbert_symbol(te(CFG5, 2), te(CFG5, 3)).is_one()
    assert hilbert_symbol(te(CFG5, 5), te(CFG5, 5)).is_one()  # (-1/5) = 1


def test_eta_examples():
    assert eta(te(CFG5, 2)).exp == 1
    assert eta(te(CFG5, 6)).is_one()
    assert eta(te(CFG5, 5)).is_one()


@pytest.mark.parametrize("p,n", [(5, 2), (5, 4), (7, 3), (7, 6), (13, 4), (13, 3)])
def test_eta_conductor_is_one(p, n):
    cfg = FieldConfig(p, n)
    # trivial on 1 + pZ_p, nontrivial on the units
    assert all(eta_unit_exp(cfg, 1 + p * k) == 0 for k in range(p * p))
    assert eta_unit_exp(cfg, cfg.g) != 0


@pytest.mark.parametrize("p", [5, 7, 13])
def test_symbol_laws_exhaustive(p):
    for n in [d for d in (2, 3, 4, 6, 12) if (p - 1) % d == 0]:
        rep = check_laws(FieldConfig(p, n))
        assert rep["ok"], rep


@pytest.mark.parametrize("p,n", [(5, 4), (7, 3), (13, 4)])
def test_closed_form_matches_literal_form(p, n):
    assert check_laws_direct(FieldConfig(p, n), samples=400)


def _elems(cfg):
    N = cfg.p ** cfg.precision
    return st.builds(lambda v, u: TruncatedElement(v, u, cfg), st.integers(-4, 4),
                     st.integers(1, N - 1).filter(lambda u: u % cfg.p))


CFG13 = FieldConfig(13, 4)


@given(_elems(CFG13), _elems(CFG13), _elems(CFG13))
def test_bimultiplicative_on_true_products(a, b, c):
    assert hilbert_symbol(a * b, c) == hilbert_symbol(a, c) * hilbert_symbol(b, c)
    assert hilbert_symbol_direct(a, b * c) == hilbert_symbol_direct(a, b) * hilbert_symbol_direct(a, c)


@given(_elems(CFG13), _elems(CFG13))
def test_antisymmetry_and_a_minus_a(a, b):
    assert (hilbert_symbol(a, b) * hilbert_symbol(b, a)).is_one()
    assert hilbert_symbol(a, -a).is_one()
    assert hilbert_symbol(a, -a * 1).is_one()


@given(_elems(CFG13))
def test_nth_powers_are_in_kernel(a):
    b = a ** 4
    assert hilbert_symbol(b, TruncatedElement.from_int(CFG13, 2)).is_one()
    assert hilbert_symbol(TruncatedElement.uniformizer(CFG13), b).is_one()
