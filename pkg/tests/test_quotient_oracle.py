import numpy as np
import pytest

from metaplectic.localfield import FieldConfig, decompose_unit, dlog
from metaplectic.quotient_oracle import (BorelCharacter, BudgetExceeded, FiniteQuotient,
                                         class_count, conjugacy_classes, direct_double_coset,
                                         double_cosets, fixed_part, hom_dim_oracle,
                                         induced_character, inflate, is_class_function,
                                         monomial_decomposition, norm_of_difference,
                                         regular_character, trivial_character)


def teich_char(p, l, k, M=None):
    """b -> zeta_M^(k dlog(a)) with M = p - 1 by default."""
    M = M or p - 1
    cfg = FieldConfig(p, 2)
    N = p ** l
    return BorelCharacter(M, tuple(k * dlog(cfg, a % p) % M if a % p else 0 for a in range(N)))


@pytest.fixture(scope="module")
def sl5():
    return FiniteQuotient("SL", 5, 1)


@pytest.fixture(scope="module")
def sl25():
    return FiniteQuotient("SL", 5, 2)


def test_orders(sl5, sl25):
    assert sl5.order == 120 and sl25.order == 15000
    assert FiniteQuotient("GL", 5, 1).order == 480


def test_budget_refusal():
    with pytest.raises(BudgetExceeded):
        FiniteQuotient("SL", 13, 3, budget=10 ** 6)


def test_group_structure(sl5):
    idx = np.arange(sl5.order)
    e = int(sl5.index(1, 0, 0, 1))
    assert np.all(sl5.mul_index(idx, sl5.inverse_index) == e)
    assert np.all(sl5.mul_index(idx, np.full(sl5.order, e)) == idx)


@pytest.mark.parametrize("kind,l,count", [("SL", 1, 2), ("SL", 2, 4), ("GL", 2, 3), ("SL", 3, 6)])
def test_double_cosets(kind, l, count):
    rep = double_cosets(FiniteQuotient(kind, 5, l))
    assert rep["ok"] and rep["count"] == count


def test_double_coset_closure_matches_products(sl25):
    rep = double_cosets(sl25)
    for name, x in [("w", (0, 1, 24, 0)), ("lt(p^1)", (1, 0, 5, 1))]:
        direct = direct_double_coset(sl25, x)
        size = next(c["size"] for c in rep["cosets"] if c["rep"] == name)
        assert direct.size == size


def test_induced_degrees_and_norms(sl5):
    triv = trivial_character(sl5, 4, n=1)
    ind1 = induced_character(sl5, teich_char(5, 1, 0), fields=triv.fields)
    assert ind1.degree == 6
    assert hom_dim_oracle(ind1, triv) == 1
    assert hom_dim_oracle(ind1, ind1) == 2
    chi1 = induced_character(sl5, teich_char(5, 1, 1), fields=triv.fields)
    chi2 = induced_character(sl5, teich_char(5, 1, 2), fields=triv.fields)
    chi3 = induced_character(sl5, teich_char(5, 1, 3), fields=triv.fields)
    assert hom_dim_oracle(chi1, chi1) == 1  # chi^2 != 1: irreducible
    assert hom_dim_oracle(chi2, chi2) == 2  # quadratic: two halves
    assert hom_dim_oracle(chi1, chi3) == 1  # Weyl conjugates
    assert hom_dim_oracle(chi1, ind1) == 0
    assert norm_of_difference(chi1, chi3) == 0


def test_regular_character(sl5):
    reg = regular_character(sl5)
    assert hom_dim_oracle(reg, reg) == 120
    triv = trivial_character(sl5, 1, fields=reg.fields)
    assert hom_dim_oracle(reg, triv) == 1


@pytest.mark.parametrize("kind,count", [("SL", 9), ("GL", 24)])
def test_class_counts(kind, count):
    Q = FiniteQuotient(kind, 5, 1)
    assert class_count(Q) == count


def test_induced_is_class_function(sl5):
    V = induced_character(sl5, teich_char(5, 1, 1))
    assert is_class_function(V, conjugacy_classes(sl5))


def test_det_character_orthogonal_to_trivial():
    Q = FiniteQuotient("GL", 5, 1)
    triv = trivial_character(Q, 4)
    E = Q.elements.astype(np.int64)
    det = (E[:, 0] * E[:, 3] - E[:, 1] * E[:, 2]) % 5
    cfg = FieldConfig(5, 2)
    e = np.array([dlog(cfg, int(d)) for d in det])
    from metaplectic.quotient_oracle import ClassFunction
    vals = [F.embed(e) for F in triv.fields]
    chi = ClassFunction(Q, 4, triv.fields, vals, 1, "det")
    assert hom_dim_oracle(chi, triv) == 0
    assert hom_dim_oracle(chi, chi) == 1


def test_induction_in_stages(sl5, sl25):
    chi2 = teich_char(5, 2, 1)
    V2 = induced_character(sl25, chi2)
    V1 = induced_character(sl5, teich_char(5, 1, 1), fields=V2.fields)
    fixed = fixed_part(V2, 1)
    assert fixed.degree == 6
    assert norm_of_difference(fixed, inflate(V1, sl25)) == 0


def test_fixed_part_vanishes_below_the_level(sl25):
    cfg = FieldConfig(5, 2)
    # level-2 character: nontrivial on 1 + 5Z_p
    e1 = tuple(decompose_unit(cfg, a, 2)[1] % 5 if a % 5 else 0 for a in range(25))
    V = induced_character(sl25, BorelCharacter(5, e1))
    assert fixed_part(V, 1).degree == 0


def test_monomial_model_agrees_with_oracle(sl5):
    chi = teich_char(5, 1, 2)
    md = monomial_decomposition("SL", 5, 1, chi)
    V = induced_character(sl5, chi)
    assert md.dimension == 6
    assert md.end_dim == hom_dim_oracle(V, V) == 2
    assert sorted(md.constituent_dims) == [3, 3]
