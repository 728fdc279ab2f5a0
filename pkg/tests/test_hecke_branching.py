import pytest
from hypothesis import given, strategies as st

from metaplectic.hecke_branching import (SLOracle, branch_report, family_from_spec,
                                         hecke_condition, hecke_dim_bruteforce, hecke_dim_closed,
                                         hecke_report, level_of)
from metaplectic.localfield import FieldConfig
from metaplectic.torus_characters import CharacterSpec

CFG5 = FieldConfig(5, 2)
CFG13 = FieldConfig(13, 4)


@pytest.mark.parametrize("spec,dim", [(CharacterSpec(1), 3), (CharacterSpec(0), 4)])
def test_examples_at_5_2(spec, dim):
    fam = family_from_spec(CFG5, spec)
    rep = hecke_report(fam, 0, 0, 2)
    assert rep.dim_bruteforce == rep.dim_closed_form == rep.dim_oracle == dim


def test_cross_condition_example_at_13_4():
    fam = family_from_spec(CFG13, CharacterSpec(3))
    assert hecke_condition(fam, 0, 1)
    rep = hecke_dim_bruteforce(fam, 0, 1, 2)
    assert rep.dim_bruteforce == rep.dim_closed_form == 3


@pytest.mark.parametrize("i,j,l,m,cond,dim", [
    (0, 0, 3, 2, False, 3), (0, 0, 3, 2, True, 6), (0, 1, 1, 1, False, 0),
    (0, 1, 1, 1, True, 1), (1, 0, 2, 3, True, 0), (0, 1, 4, 2, False, 4)])
def test_closed_form_table(i, j, l, m, cond, dim):
    assert hecke_dim_closed(i, j, l, m, cond) == dim


@given(st.integers(0, 5), st.integers(0, 5), st.integers(1, 8), st.integers(1, 8), st.booleans())
def test_closed_form_properties(i, j, l, m, cond):
    d = hecke_dim_closed(i, j, l, m, cond)
    assert d == hecke_dim_closed(j, i, l, m, cond)
    if l < m:
        assert d == 0
    else:
        # each extra level adds exactly two double cosets
        assert hecke_dim_closed(i, j, l + 1, m, cond) - d == 2


@pytest.mark.parametrize("p,n,teich,principal", [(5, 2, 1, 0), (5, 2, 0, 5), (7, 3, 2, 0),
                                                 (7, 3, 0, 7), (13, 4, 3, 0), (13, 4, 0, 0),
                                                 (13, 3, 4, 0), (7, 6, 1, 0)])
def test_closed_form_equals_bruteforce(p, n, teich, principal):
    cfg = FieldConfig(p, n)
    fam = family_from_spec(cfg, CharacterSpec(teich, principal))
    for l in range(1, 3 if p > 7 else 4):
        for i in range(cfg.n_under):
            for j in range(cfg.n_under):
                rep = hecke_dim_bruteforce(fam, i, j, l)
                assert rep.dim_bruteforce == rep.dim_closed_form, (i, j, l)


def test_zero_below_level_has_witness():
    fam = family_from_spec(CFG5, CharacterSpec(0, 5))
    assert level_of(CFG5, fam.base) == 2
    rep = hecke_dim_bruteforce(fam, 0, 0, 1)
    assert rep.dim_bruteforce == 0 and rep.witness is not None


def test_oracle_three_ways_at_7_3():
    fam = family_from_spec(FieldConfig(7, 3), CharacterSpec(2))
    orc = SLOracle(fam)
    for i in range(3):
        for j in range(3):
            rep = hecke_report(fam, i, j, 2, cache=orc)
            assert rep.dim_oracle == rep.dim_bruteforce == rep.dim_closed_form


@pytest.mark.parametrize("p,n,spec,lmax", [(5, 2, CharacterSpec(1), 2), (5, 2, CharacterSpec(0), 2),
                                           (13, 4, CharacterSpec(0), 2), (13, 4, CharacterSpec(6), 2),
                                           (7, 3, CharacterSpec(0, 7), 2)])
def test_branch_reports(p, n, spec, lmax):
    rep = branch_report(family_from_spec(FieldConfig(p, n), spec), lmax)
    assert all(rep.checks.values()), {k: v for k, v in rep.checks.items() if not v}
    assert not rep.degraded


def test_anomaly_indices_when_four_divides_n():
    rep = branch_report(family_from_spec(CFG13, CharacterSpec(0)), 1)
    assert rep.anomaly["reducible_indices"] == [0, 1]
    rep = branch_report(family_from_spec(FieldConfig(7, 3), CharacterSpec(0)), 1)
    assert rep.anomaly["reducible_indices"] == [0]
