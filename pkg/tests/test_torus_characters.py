from fractions import Fraction

import pytest
from hypothesis import given, strategies as st

from metaplectic.cover_sl2 import cover_mul
from metaplectic.hilbert import hilbert_symbol_direct
from metaplectic.localfield import FieldConfig, TruncatedElement
from metaplectic.torus_characters import (CharacterSpec, conjugate_character, cross_condition,
                                          evaluate, extend_character, generator_values,
                                          heisenberg_window_check, in_A, in_center, index_A,
                                          index_center, primitive_level, quad_condition,
                                          torus_commutator, torus_elem, twist, validate_character)

CFG5 = FieldConfig(5, 2)
CFG13 = FieldConfig(13, 4)


@pytest.mark.parametrize("t,center,a", [(25, True, True), (5, False, False), (2, False, True),
                                        (4, True, True), (-1, True, True), (625, True, True)])
def test_membership_examples(t, center, a):
    cfg = FieldConfig(5, 4)
    x = torus_elem(cfg, Fraction(t))
    assert in_center(cfg, x) is center
    assert in_A(cfg, x) is a


@pytest.mark.parametrize("p,n,iz,ia", [(5, 2, 1, 1), (7, 3, 9, 3), (13, 4, 4, 2), (7, 6, 9, 3)])
def test_indices(p, n, iz, ia):
    cfg = FieldConfig(p, n)
    assert index_center(cfg) == iz
    assert index_A(cfg) == ia
    # [T~ : A] over [A : Z~] is consistent with A maximal abelian: [T:A] = [A:Z]
    assert iz == ia * ia


def _torus(cfg):
    p = cfg.p
    return st.builds(lambda v, u, s: Fraction(p) ** v * u * s, st.integers(-3, 3),
                     st.integers(1, p * p - 1).filter(lambda u: u % p), st.sampled_from([1, -1]))


@given(_torus(CFG13), _torus(CFG13))
def test_commutator_is_inverse_square_of_symbol(a, b):
    c = torus_commutator(CFG13, torus_elem(CFG13, a), torus_elem(CFG13, b))
    s = hilbert_symbol_direct(TruncatedElement.from_fraction(CFG13, a),
                              TruncatedElement.from_fraction(CFG13, b))
    assert c == (s * s).inverse()


@pytest.mark.parametrize("spec,level", [(CharacterSpec(0, 0), 1), (CharacterSpec(1, 0), 1),
                                        (CharacterSpec(0, 5), 2), (CharacterSpec(0, 1), 3)])
def test_primitive_level(spec, level):
    assert primitive_level(CFG5, spec) == level


def _A_elems(cfg):
    p = cfg.p
    return st.builds(lambda v, u, z: torus_elem(cfg, Fraction(p) ** (cfg.n_under * v) * u, z),
                     st.integers(-2, 2), st.integers(1, p ** 3 - 1).filter(lambda u: u % p),
                     st.integers(0, cfg.n - 1))


@given(_A_elems(CFG13), _A_elems(CFG13), st.sampled_from([0, 3, 6, 9]), st.integers(0, 4))
def test_character_is_multiplicative_on_A(x, y, teich, pi):
    spec = CharacterSpec(teich, 2, 5, pi)
    assert in_A(CFG13, x) and in_A(CFG13, y)
    lhs = evaluate(CFG13, spec, cover_mul(CFG13, x, y))
    assert (lhs - evaluate(CFG13, spec, x) - evaluate(CFG13, spec, y)) % 1 == 0


def test_genuine_on_mu_n():
    spec = CharacterSpec(3)
    z = torus_elem(CFG13, Fraction(1), 1)
    assert evaluate(CFG13, spec, z) == Fraction(1, 4)


@pytest.mark.parametrize("p,n", [(5, 2), (7, 3), (13, 4), (13, 3)])
def test_validation_passes_for_specs(p, n):
    cfg = FieldConfig(p, n)
    assert validate_character(cfg, CharacterSpec(1, 1), "A", samples=100)["ok"]
    assert validate_character(cfg, CharacterSpec(1, 1), "Z", samples=100)["ok"]


@pytest.mark.parametrize("p,n", [(7, 3), (13, 4), (13, 3), (7, 6)])
def test_family_is_the_twist_orbit(p, n):
    cfg = FieldConfig(p, n)
    base = CharacterSpec(1)
    fam = extend_character(cfg, base)
    assert len(fam) == cfg.n_under
    assert fam[0] == base
    vals = {generator_values(cfg, c) for c in fam.twists}
    assert len(vals) == cfg.n_under  # pairwise distinct on A
    zvals = {generator_values(cfg, c, "Z") for c in fam.twists}
    assert len(zvals) == 1  # but equal on the centre
    for i in range(cfg.n_under):
        assert conjugate_character(cfg, base, i) == twist(cfg, base, i)


def test_quadratic_conditions_at_13_4():
    fam0 = extend_character(CFG13, CharacterSpec(0))
    assert quad_condition(fam0, 0) and quad_condition(fam0, 1)
    fam3 = extend_character(CFG13, CharacterSpec(3))
    assert not quad_condition(fam3, 0)
    assert cross_condition(fam3, 0, 1)
    fam5 = extend_character(FieldConfig(5, 2), CharacterSpec(0, 5))
    assert fam5.m == 2 and not quad_condition(fam5, 0)


@pytest.mark.parametrize("p,n,teich", [(13, 4, 0), (13, 4, 3), (7, 3, 2), (5, 2, 1)])
def test_heisenberg_window(p, n, teich):
    cfg = FieldConfig(p, n)
    rep = heisenberg_window_check(cfg, CharacterSpec(teich))
    assert rep["norm"] == 1
    assert rep["degree"] == index_A(cfg)
