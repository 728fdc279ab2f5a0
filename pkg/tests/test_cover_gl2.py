import random
from fractions import Fraction

import pytest
from hypothesis import given, strategies as st

from metaplectic import cover_gl2 as G
from metaplectic.cover_gl2 import (GlCharacterSpec, TRANSCRIBED, beta_prime, ensure_validated,
                                   gl_branch_report, gl_char_extensions, gl_commutator,
                                   gl_cover_elem, gl_cover_inv, gl_cover_mul, gl_double_cosets,
                                   gl_eps_collapse, gl_evaluate, gl_hecke_dim,
                                   gl_hecke_dim_bruteforce, gl_index_A, gl_index_center,
                                   gl_torus_window, res_rho_prime_analysis, restrict_char_to_sl,
                                   section_prime, trivial_on_t1k, triviality_formula,
                                   validate_beta_prime, validate_gl_character,
                                   verify_beta_prime_exhaustive, verify_restriction_and_n,
                                   verify_section_prime)
from metaplectic.cover_sl2 import beta
from metaplectic.hilbert import hilbert_symbol_direct
from metaplectic.localfield import FieldConfig, TruncatedElement
from metaplectic.matrices import Mat2, dg
from metaplectic.torus_characters import CharacterSpec

CFG5 = FieldConfig(5, 2)
CFG7 = FieldConfig(7, 3)
CFG13 = FieldConfig(13, 4)


@pytest.fixture(scope="module")
def validation13():
    return validate_beta_prime(CFG13, samples=150)


def test_candidate_family_fails_and_transcribed_is_adopted(validation13):
    rep = validation13
    assert rep["family_passing"] == []
    assert rep["adopted"] == TRANSCRIBED and rep["ok"]
    plain = rep["candidates"]["beta(proj) (det g1, 1) (1, det g2)"]
    assert not plain["ok"]


def test_unvalidated_field_is_refused(monkeypatch):
    monkeypatch.setattr(G, "_VALIDATED", {})
    with pytest.raises(RuntimeError):
        beta_prime(FieldConfig(13, 3), Mat2(1, 0, 0, 1), Mat2(1, 0, 0, 1))
    ensure_validated(FieldConfig(13, 3))
    assert beta_prime(FieldConfig(13, 3), Mat2(1, 0, 0, 1), Mat2(1, 0, 0, 1)).is_one()


@st.composite
def gl_mats(draw, p=13):
    a, b, c, d = (draw(st.integers(-60, 60)) for _ in range(4))
    det = a * d - b * c
    if det == 0:
        a += 1
        det = a * d - b * c
    if det == 0:
        d += 1
    v = draw(st.integers(-2, 2))
    return Mat2(a, b, c, d) @ Mat2(Fraction(p) ** v, 0, 0, 1)


@given(gl_mats(), gl_mats(), gl_mats())
def test_gl_cocycle_identity(g1, g2, g3):
    ensure_validated(CFG13)
    b = lambda x, y: beta_prime(CFG13, x, y)
    assert b(g1, g2) * b(g1 @ g2, g3) == b(g1, g2 @ g3) * b(g2, g3)


@given(st.integers(-3, 3), st.integers(1, 168), st.integers(-3, 3), st.integers(1, 168),
       st.integers(-3, 3), st.integers(1, 168), st.integers(-3, 3), st.integers(1, 168))
def test_diagonal_formula(v1, u1, v2, u2, v3, u3, v4, u4):
    ensure_validated(CFG13)
    P = Fraction(13)
    s1, t1, s2, t2 = P ** v1 * u1, P ** v2 * u2, P ** v3 * u3, P ** v4 * u4
    got = beta_prime(CFG13, Mat2(s1, 0, 0, t1), Mat2(s2, 0, 0, t2))
    want = hilbert_symbol_direct(TruncatedElement.from_fraction(CFG13, s1),
                                 TruncatedElement.from_fraction(CFG13, t2))
    assert got == want


def test_restriction_and_unipotent_triviality():
    ensure_validated(CFG5)
    assert verify_restriction_and_n(CFG5, level=1)["ok"]
    rng = random.Random(1)
    for _ in range(200):
        a, b, c, d = (rng.randrange(-40, 40) for _ in range(4))
        if a * d - b * c != 1:
            continue
        g1, g2 = Mat2(a, b, c, d), Mat2(d, -b, -c, a)
        assert beta_prime(CFG5, g1, g2 @ g1) == beta(CFG5, g1, g2 @ g1)


def test_vectorized_checks():
    ensure_validated(CFG7)
    assert verify_beta_prime_exhaustive(CFG7, level=1, mode="sample", samples=20000)["ok"]
    assert verify_section_prime(CFG7, level=1)["ok"]


def test_section_prime_splits_K():
    ensure_validated(CFG13)
    rng = random.Random(3)
    ks = []
    while len(ks) < 30:
        a, b, c, d = (rng.randrange(0, 13 ** 3) for _ in range(4))
        if (a * d - b * c) % 13:
            ks.append(Mat2(a, b, c, d))
    for k1 in ks:
        for k2 in ks:
            assert section_prime(CFG13, k1 @ k2) == (beta_prime(CFG13, k1, k2)
                                                   * section_prime(CFG13, k1) * section_prime(CFG13, k2))


def test_cover_group_and_commutator():
    ensure_validated(CFG13)
    x = gl_cover_elem(CFG13, Mat2(2, 1, 13, 7), 1)
    e = gl_cover_mul(CFG13, x, gl_cover_inv(CFG13, x))
    assert e.mat == Mat2(1, 0, 0, 1) and e.zeta.is_one()
    s = gl_cover_elem(CFG13, dg(Fraction(13), 1))
    t = gl_cover_elem(CFG13, dg(Fraction(1), 2))
    # [dg(p,1), dg(1,t)] = (p,t)_n^{-1}
    c = gl_commutator(CFG13, s, t)
    assert not c.is_one()


@pytest.mark.parametrize("p,n,iz,ia", [(5, 2, 16, 4), (7, 3, 81, 9)])
def test_gl_torus_indices(p, n, iz, ia):
    cfg = FieldConfig(p, n)
    ensure_validated(cfg)
    assert gl_index_center(cfg) == iz
    assert gl_index_A(cfg) == ia


@pytest.mark.parametrize("p,n", [(5, 2), (7, 3), (13, 4)])
def test_gl_family(p, n):
    cfg = FieldConfig(p, n)
    ensure_validated(cfg)
    base = GlCharacterSpec(CharacterSpec(1), CharacterSpec(0))
    assert validate_gl_character(cfg, base, samples=100)["ok"]
    fam = gl_char_extensions(cfg, base)
    assert len(fam) == n * n
    assert fam[0, 0] == base
    for i in range(n):
        for j in range(n):
            assert trivial_on_t1k(cfg, fam[i, j]) == triviality_formula(fam, i, j)


def test_gl_hecke_examples():
    ensure_validated(CFG5)
    generic = gl_char_extensions(CFG5, GlCharacterSpec(CharacterSpec(1), CharacterSpec(0)))
    special = gl_char_extensions(CFG5, GlCharacterSpec(CharacterSpec(0), CharacterSpec(0)))
    r = gl_hecke_dim(generic, 0, 0, 1)
    assert r.dim_bruteforce == r.dim_closed_form == r.dim_oracle == 1
    r = gl_hecke_dim(special, 0, 0, 1)
    assert r.dim_bruteforce == r.dim_closed_form == r.dim_oracle == 2
    r = gl_hecke_dim(generic, 0, 0, 2)
    assert r.dim_bruteforce == r.dim_closed_form == r.dim_oracle == 2
    r = gl_hecke_dim(special, 0, 0, 2)
    assert r.dim_bruteforce == r.dim_closed_form == r.dim_oracle == 3


def test_gl_level_gap_between_slot_level_and_ratio_level():
    # With theta1 = theta2 of level 2, chi' is trivial on dg(a, 1/a) as soon as the
    # ratio is, so the support count sees level m_ratio = 1 while the closed form
    # is written with the larger slot level m = 2.
    ensure_validated(CFG5)
    fam = gl_char_extensions(CFG5, GlCharacterSpec(CharacterSpec(0, 5), CharacterSpec(0, 5)))
    assert (fam.m, fam.m_ratio) == (2, 1)
    r = gl_hecke_dim_bruteforce(fam, 0, 0, 2)
    assert r.dim_closed_form == 2 and r.dim_bruteforce == 3
    r = gl_hecke_dim(fam, 0, 0, 2)
    assert r.dim_oracle == r.dim_bruteforce == 3


def test_gl_branch_report_5_2():
    ensure_validated(CFG5)
    fam = gl_char_extensions(CFG5, GlCharacterSpec(CharacterSpec(0), CharacterSpec(0)))
    rep = gl_branch_report(fam, 2)
    assert rep["ok"], {k: v for k, v in rep["checks"].items() if not v}
    assert len(rep["reducible_pairs"]) == 2


@pytest.mark.parametrize("l", [1, 2])
def test_gl_double_cosets(l):
    ensure_validated(CFG5)
    rep = gl_double_cosets(CFG5, l)
    assert rep["ok"] and rep["count"] == 1 + l
    assert gl_eps_collapse(CFG7, 4)["ok"]


def test_restriction_indices_odd_n():
    ensure_validated(CFG7)
    fam = gl_char_extensions(CFG7, GlCharacterSpec(CharacterSpec(2), CharacterSpec(0)))
    assert restrict_char_to_sl(fam, 2, 0)["k"] == 1
    assert restrict_char_to_sl(fam, 0, 0)["k"] == 0
    for i in range(3):
        for j in range(3):
            assert restrict_char_to_sl(fam, i, j)["ok"]


@pytest.mark.parametrize("p,n", [(5, 2), (13, 4)])
def test_even_n_restriction(p, n):
    cfg = FieldConfig(p, n)
    ensure_validated(cfg)
    fam = gl_char_extensions(cfg, GlCharacterSpec(CharacterSpec(1), CharacterSpec(0)))
    rep = res_rho_prime_analysis(cfg, fam)
    assert rep["ok"], rep
    assert rep["central_characters"] == 4
    assert set(rep["ell_multiplicities"].values()) == {n // 2}


def test_odd_n_torus_window():
    ensure_validated(CFG7)
    win = gl_torus_window(CFG7, GlCharacterSpec(CharacterSpec(2), CharacterSpec(0)))
    assert win["cocycle_law_ok"] and win["norm"] == 1
    assert sorted(win["central_mults"].values()) == [3]


def test_gl_evaluate_genuine():
    ensure_validated(CFG13)
    spec = GlCharacterSpec(CharacterSpec(3), CharacterSpec(1))
    z = gl_cover_elem(CFG13, Mat2(1, 0, 0, 1), 1)
    assert gl_evaluate(CFG13, spec, z) == Fraction(1, 4)
