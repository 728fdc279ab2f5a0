from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given, strategies as st

from metaplectic.cover_sl2 import (beta, cover_elem, cover_inv, cover_mul, kubota_X, section_s,
                                   to_split, verify_cocycle, verify_section, verify_splitting)
from metaplectic.hilbert import hilbert_symbol_direct
from metaplectic.localfield import FieldConfig, TruncatedElement
from metaplectic.matrices import Mat2, W, dg, lift_sl2, lt, random_sl2_mod, sl2_lifts, ut

CFG5 = FieldConfig(5, 2)
CFG13 = FieldConfig(13, 4)


def test_kubota_X_examples():
    xw = kubota_X(CFG5, W)
    assert (xw.val, xw.residue) == (0, 4)  # -1
    xi = kubota_X(CFG5, Mat2(1, 0, 0, 1))
    assert (xi.val, xi.unit) == (0, 1)
    assert kubota_X(CFG5, lt(5)).val == 1


def test_beta_examples():
    assert beta(CFG5, W, W).is_one()
    assert beta(CFG5, dg(2), dg(5)).exp == 1


def test_cover_products():
    w = cover_elem(CFG5, W)
    sq = cover_mul(CFG5, w, w)
    assert sq.mat == Mat2(-1, 0, 0, -1) and sq.zeta.is_one()
    prod = cover_mul(CFG5, cover_elem(CFG5, dg(2)), cover_elem(CFG5, dg(5)))
    assert prod.mat == dg(10) and prod.zeta.exp == 1


def test_section_example():
    assert section_s(CFG5, Mat2(2, 1, 5, 3)).exp == 1
    assert section_s(CFG5, Mat2(1, 0, 1, 1)).is_one()  # unit c


def test_cover_elem_rejects_non_sl2():
    with pytest.raises(ValueError):
        cover_elem(CFG5, Mat2(2, 0, 0, 1))


def _rand_sl2(draw, p):
    # integer lift of a random element of SL2(Z/p^3), times optional torus factor
    seed = draw(st.integers(0, 10 ** 9))
    N = p ** 3
    r = random_sl2_mod(N, p, 1, np.random.default_rng(seed))[0]
    g = Mat2(*lift_sl2(*map(int, r), N))
    v = draw(st.integers(-2, 2))
    return g @ dg(Fraction(p) ** v)


@st.composite
def sl2_13(draw):
    return _rand_sl2(draw, 13)


@given(sl2_13(), sl2_13(), sl2_13())
def test_cocycle_identity_random(g1, g2, g3):
    lhs = beta(CFG13, g1, g2) * beta(CFG13, g1 @ g2, g3)
    rhs = beta(CFG13, g1, g2 @ g3) * beta(CFG13, g2, g3)
    assert lhs == rhs


@given(sl2_13(), sl2_13())
def test_cover_group_axioms(g1, g2):
    x, y = cover_elem(CFG13, g1, 1), cover_elem(CFG13, g2, 3)
    e = cover_mul(CFG13, x, cover_inv(CFG13, x))
    assert e.mat == Mat2(1, 0, 0, 1) and e.zeta.is_one()
    # mu_n is central
    z = cover_elem(CFG13, Mat2(1, 0, 0, 1), 2)
    assert cover_mul(CFG13, z, y) == cover_mul(CFG13, y, z)


@given(st.integers(-3, 3), st.integers(1, 168).filter(lambda u: u % 13),
       st.integers(-3, 3), st.integers(1, 168).filter(lambda u: u % 13))
def test_diagonal_law(va, ua, vb, ub):
    a = Fraction(13) ** va * ua
    b = Fraction(13) ** vb * ub
    # beta(diag(a,1/a), diag(b,1/b)) = (b, a)_n computed literally
    want = hilbert_symbol_direct(TruncatedElement.from_fraction(CFG13, b),
                                 TruncatedElement.from_fraction(CFG13, a))
    assert beta(CFG13, dg(a), dg(b)) == want


@given(st.integers(-10 ** 6, 10 ** 6), st.integers(-10 ** 6, 10 ** 6), sl2_13())
def test_unipotent_radical_is_trivial(x, y, g):
    n1, n2 = ut(Fraction(x, 13 ** 3)), ut(Fraction(y, 13 ** 2))
    assert beta(CFG13, n1, n2).is_one()
    assert beta(CFG13, n1, g) == beta(CFG13, Mat2(1, 0, 0, 1), g)


def test_section_law_exhaustive_level1_scalar_route():
    # every pair of integral lifts mod p, computed with scalar arithmetic
    ks = [Mat2(*map(int, r)) for r in sl2_lifts(5, 5)]
    for k1 in ks[::3]:
        for k2 in ks:
            k12 = k1 @ k2
            assert section_s(CFG5, k12) == beta(CFG5, k1, k2) * section_s(CFG5, k1) * section_s(CFG5, k2)


def test_split_coordinates_are_a_homomorphism():
    ks = [Mat2(*map(int, r)) for r in sl2_lifts(5, 5)][:40]
    for k1 in ks:
        for k2 in ks:
            x, y = cover_elem(CFG5, k1, 1), cover_elem(CFG5, k2)
            m, z = to_split(CFG5, cover_mul(CFG5, x, y))
            assert z == to_split(CFG5, x)[1] * to_split(CFG5, y)[1]


def test_vectorized_cocycle_and_section():
    rep = verify_cocycle(CFG5, level=1, mode="sample", samples=20000)
    assert rep["ok"], rep
    assert verify_section(FieldConfig(5, 2), level=1)["ok"]


@pytest.mark.parametrize("subgroup", ["K1_j", "T1capK1", "B1capK1"])
def test_splitting_over_compact_subgroups(subgroup):
    assert verify_splitting(CFG13, subgroup, j=1, samples=200)["splits"]


def test_torus_does_not_split_for_n_above_two():
    rep = verify_splitting(CFG13, "T1_full")
    assert rep["splits"] is False and rep["witness"]
    assert "p" in rep["witness"][0] or "p" in rep["witness"][1]
