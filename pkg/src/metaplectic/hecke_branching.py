"""Hecke-algebra dimensions for the SL2 cover: support counts, closed forms, oracle,
and the assembled K-type branching report."""
from __future__ import annotations

from collections import Counter
from dataclasses import asdict, dataclass, field

import numpy as np

from .cyclo import lcm
from .localfield import FieldConfig, unit_decomposition_table
from .quotient_oracle import (DEFAULT_BUDGET, BorelCharacter, FiniteQuotient, _inv_table, _mm,
                              gl2_order, hom_dim_oracle, induced_character, monomial_decomposition,
                              oracle_fields, standard_coset_reps, sl2_order)
from .torus_characters import (CharacterSpec, ExtensionFamily, cross_condition, extend_character,
                               primitive_level, quad_condition)


@dataclass
class HeckeReport:
    group: str
    p: int
    n: int
    m: int
    l: int
    i: int
    j: int
    supported_cosets: list
    dim_bruteforce: int
    dim_closed_form: int
    condition: bool
    dim_oracle: int | None = None
    oracle_primes: list | None = None
    witness: dict | None = None

    @property
    def ok(self) -> bool:
        vals = {self.dim_bruteforce, self.dim_closed_form}
        if self.dim_oracle is not None:
            vals.add(self.dim_oracle)
        return len(vals) == 1

    def to_json(self) -> dict:
        d = asdict(self)
        d["dims"] = {"closed-form": self.dim_closed_form, "brute-force": self.dim_bruteforce,
                     "oracle": self.dim_oracle}
        for k in ("dim_bruteforce", "dim_closed_form", "dim_oracle"):
            d.pop(k)
        d["ok"] = self.ok
        return d


# -- characters of the finite Borel ------------------------------------------------

def family_modulus(cfg: FieldConfig, m: int) -> int:
    return lcm(cfg.n, cfg.q - 1, cfg.p ** max(m - 1, 0))


def unit_exponents(cfg: FieldConfig, spec: CharacterSpec, l: int, M: int) -> tuple:
    """theta(u) as an exponent of zeta_M, for each residue u mod p^l (0 on non-units)."""
    A, B = unit_decomposition_table(cfg.p, cfg.g, l)
    a_val = spec.theta_unit(cfg, _teich_residue(cfg))
    b_val = spec.theta_unit(cfg, 1 + cfg.p)
    for v in (a_val, b_val):
        if (v * M).denominator != 1:
            raise ValueError("character values do not lie in mu_M")
    ea, eb = int(a_val * M), int(b_val * M)
    e = np.where(A >= 0, A * ea + B * eb, 0) % M
    return tuple(int(x) for x in e)


def _teich_residue(cfg: FieldConfig) -> int:
    from .localfield import teichmuller
    return teichmuller(cfg.p, cfg.g, cfg.precision)


def sl_borel_character(family: ExtensionFamily, i: int, l: int, M: int | None = None) -> BorelCharacter:
    """chi_i on the upper triangular group mod p^l, in split coordinates.

    For b in B cap K the section is trivial (c = 0), so the value is theta_i(b11).
    """
    cfg = family.cfg
    M = M or family_modulus(cfg, family.m)
    return BorelCharacter(M, unit_exponents(cfg, family[i], l, M))


# -- brute-force support test -----------------------------------------------------------

def _borel_array(kind: str, p: int, l: int) -> np.ndarray:
    N = p ** l
    units = np.array([x for x in range(N) if x % p], dtype=np.int64)
    inv = _inv_table(N, p)
    s = np.arange(N, dtype=np.int64)
    if kind == "SL":
        t = np.repeat(units, N)
        return np.stack([t, np.tile(s, len(units)), np.zeros_like(t), inv[t]], axis=1)
    t1 = np.repeat(units, len(units) * N)
    t2 = np.tile(np.repeat(units, N), len(units))
    return np.stack([t1, np.tile(s, len(units) ** 2), np.zeros_like(t1), t2], axis=1)


def support_test(kind: str, p: int, l: int, x, left: BorelCharacter, right: BorelCharacter,
                 chunk: int = 1 << 20) -> tuple:
    """Is B x B a support of H? For each b with b' = x^-1 b^-1 x in B (so that
    b x b' = x) require chi_left(b) chi_right(b') = 1.  Returns (ok, stabilizer size)."""
    N = p ** l
    inv = _inv_table(N, p)
    X = np.array(x, dtype=np.int64)
    Xi = _inv_mat(N, inv, X)
    B = _borel_array(kind, p, l)
    count = 0
    for lo in range(0, len(B), chunk):
        b = B[lo:lo + chunk]
        bi = _inv_mat(N, inv, b)
        bp = _mm(_mm(np.broadcast_to(Xi, b.shape), bi) % N, np.broadcast_to(X, b.shape)) % N
        mask = bp[:, 2] == 0
        count += int(mask.sum())
        e = (left.exps(b[mask]) + right.exps(bp[mask])) % left.M
        if np.any(e):
            return False, count
    return True, count


def _inv_mat(N, inv, X):
    a, b, c, d = X[..., 0], X[..., 1], X[..., 2], X[..., 3]
    di = inv[(a * d - b * c) % N]
    return np.stack([d * di, -b * di, -c * di, a * di], axis=-1) % N


def zero_level_witness(cfg: FieldConfig, spec: CharacterSpec, l: int) -> dict | None:
    """b = dg(1+p^l) in B cap K_l with chi(b) != 1, if any.

    For f fixed by K_l and any coset x: f(x) = f(b x) ... = chi(b) f(x), so every
    coset (the identity first) fails."""
    u = 1 + cfg.p ** l
    v = spec.theta_unit(cfg, u)
    if v != 0:
        return {"element": f"dg(1+p^{l})", "chi_exp": str(v)}
    return None


# -- closed forms ---------------------------------------------------------------------------

def hecke_dim_closed(i: int, j: int, l: int, m: int, condition: bool) -> int:
    if l < m:
        return 0
    if i == j:
        return 2 * l if condition else 1 + 2 * (l - m)
    return 2 * l - 1 if condition else 2 * (l - m)


def hecke_condition(family: ExtensionFamily, i: int, j: int) -> bool:
    nu = family.cfg.n_under
    if (i - j) % nu == 0:
        return quad_condition(family, i)
    return cross_condition(family, i, j)


# -- reports ------------------------------------------------------------------------------

def sl_coset_reps(cfg: FieldConfig, l: int) -> list:
    Q = _RepsOnly("SL", cfg.p, l)
    return standard_coset_reps(Q)


@dataclass
class _RepsOnly:
    kind: str
    p: int
    l: int

    @property
    def N(self):
        return self.p ** self.l


def hecke_dim_bruteforce(family: ExtensionFamily, i: int, j: int, l: int) -> HeckeReport:
    cfg = family.cfg
    if l < 1:
        raise ValueError("level must be >= 1")
    m = family.m
    cond = hecke_condition(family, i, j)
    closed = hecke_dim_closed(i % cfg.n_under, j % cfg.n_under, l, m, cond)
    reps = sl_coset_reps(cfg, l)
    if l < m:
        w = zero_level_witness(cfg, family[i], l)
        if w is None:
            raise ArithmeticError("character level bookkeeping failed")  # pragma: no cover
        w["failing_cosets"] = [name for name, _ in reps]
        return HeckeReport("SL", cfg.p, cfg.n, m, l, i, j, [], 0, closed, cond, witness=w)
    left = sl_borel_character(family, i, l)
    right = sl_borel_character(family, j, l)
    sup = [name for name, x in reps if support_test("SL", cfg.p, l, x, left, right)[0]]
    return HeckeReport("SL", cfg.p, cfg.n, m, l, i, j, sup, len(sup), closed, cond)


def oracle_fits(kind: str, p: int, l: int, budget: int = DEFAULT_BUDGET) -> bool:
    return (sl2_order(p, l) if kind == "SL" else gl2_order(p, l)) <= budget


class SLOracle:
    """Induced characters V_i^{K_l} on SL2(Z/p^l), cached per (i, l)."""

    def __init__(self, family: ExtensionFamily, budget: int = DEFAULT_BUDGET):
        self.family = family
        self.budget = budget
        self._Q = {}
        self._V = {}
        self.primes = set()

    def quotient(self, l: int) -> FiniteQuotient:
        if l not in self._Q:
            self._Q = {l: FiniteQuotient("SL", self.family.cfg.p, l, self.budget)}
            self._V = {k: v for k, v in self._V.items() if k[1] == l}
        return self._Q[l]

    def induced(self, i: int, l: int):
        key = (i % self.family.cfg.n_under, l)
        if key not in self._V:
            Q = self.quotient(l)
            chi = sl_borel_character(self.family, key[0], l)
            fields = oracle_fields(Q, chi.M, self.family.cfg.n)
            self._V[key] = induced_character(Q, chi, fields, label=f"V_{key[0]},{l}")
            self.primes.update(F.r for F in fields)
        return self._V[key]

    def hom(self, i: int, j: int, l: int) -> int:
        return hom_dim_oracle(self.induced(i, l), self.induced(j, l))


def hecke_report(family: ExtensionFamily, i: int, j: int, l: int, oracle: bool | None = None,
                 budget: int = DEFAULT_BUDGET, cache: SLOracle | None = None) -> HeckeReport:
    """Brute force plus closed form, plus the oracle when the quotient fits the budget."""
    rep = hecke_dim_bruteforce(family, i, j, l)
    p = family.cfg.p
    use = oracle_fits("SL", p, l, budget) if oracle is None else oracle
    if use and l >= family.m:
        orc = cache or SLOracle(family, budget)
        rep.dim_oracle = orc.hom(i, j, l)
        rep.oracle_primes = sorted(F.r for F in orc.induced(i, l).fields)
    return rep


# -- branching report ------------------------------------------------------------------------

@dataclass
class BranchReport:
    p: int
    n: int
    m: int
    l_max: int
    relabel_shift: int
    constituents: list = field(default_factory=list)
    layers: list = field(default_factory=list)
    hom_matrices: list = field(default_factory=list)
    equivalence: dict = field(default_factory=dict)
    anomaly: dict = field(default_factory=dict)
    checks: dict = field(default_factory=dict)
    oracle_primes: list = field(default_factory=list)
    degraded: bool = False

    @property
    def ok(self) -> bool:
        return all(self.checks.values())

    def to_json(self) -> dict:
        d = asdict(self)
        d["ok"] = self.ok
        return d


def relabel(family: ExtensionFamily) -> tuple:
    """Rotate indices so that a quadratic index (if any) becomes 0."""
    cfg = family.cfg
    quad = [i for i in range(cfg.n_under) if quad_condition(family, i)]
    shift = quad[0] if quad else 0
    if shift == 0:
        return family, 0
    return extend_character(cfg, family[shift]), shift


def _pair_equivalent(hom: int, end_i: int, end_k: int) -> bool:
    return hom == end_i == end_k and hom > 0


def branch_report(family: ExtensionFamily, l_max: int, oracle: bool | None = None,
                  budget: int = DEFAULT_BUDGET, seed: int = 0) -> BranchReport:
    family, shift = relabel(family)
    cfg = family.cfg
    p, nu, m = cfg.p, cfg.n_under, family.m
    if l_max < m:
        raise ValueError(f"l_max = {l_max} is below the level m = {m}")
    rep = BranchReport(p, cfg.n, m, l_max, shift)
    orc = SLOracle(family, budget)
    levels = list(range(m, l_max + 1))

    hom = {}
    oracle_hom = {}
    for l in levels:
        use = oracle_fits("SL", p, l, budget) if oracle is None else oracle
        if not use:
            rep.degraded = True
        mat = [[0] * nu for _ in range(nu)]
        omat = [[None] * nu for _ in range(nu)] if use else None
        for i in range(nu):
            for k in range(nu):
                h = hecke_dim_bruteforce(family, i, k, l)
                if not h.ok:
                    rep.checks[f"closed=brute (i={i},k={k},l={l})"] = False
                mat[i][k] = h.dim_bruteforce
                if use:
                    omat[i][k] = orc.hom(i, k, l)
        hom[l] = mat
        oracle_hom[l] = omat
        rep.hom_matrices.append({"l": l, "brute-force": mat, "oracle": omat})
    rep.oracle_primes = sorted(orc.primes)

    decomp = {}
    for l in levels:
        for i in range(nu):
            decomp[i, l] = monomial_decomposition("SL", p, l, sl_borel_character(family, i, l), seed)

    # level-m constituents
    for i in range(nu):
        end = hom[m][i][i]
        d = decomp[i, m]
        rec = {"i": i, "original_i": (i + shift) % nu, "dimension": (p + 1) * p ** (m - 1),
               "end_dim": end, "end_dim_oracle": oracle_hom[m][i][i] if oracle_hom[m] else None,
               "reducible": end == 2, "split_dimensions": d.constituent_dims if end == 2 else None,
               "predicted_reducible": m == 1 and quad_condition(family, i)}
        rep.constituents.append(rec)
        rep.checks[f"reducibility matches prediction (i={i})"] = rec["reducible"] == rec["predicted_reducible"]
        rep.checks[f"end dim <= 2 (i={i})"] = end in (1, 2)
        rep.checks[f"level-m dimension (i={i})"] = d.dimension == rec["dimension"]

    # layers W_{i,l}
    for l in levels[1:]:
        for i in range(nu):
            hi = Counter(decomp[i, l].constituent_dims)
            lo = Counter(decomp[i, l - 1].constituent_dims)
            halves = sorted((hi - lo).elements())
            dim_w = (p + 1) * (p - 1) * p ** (l - 2)
            end_w = hom[l][i][i] - hom[l - 1][i][i]
            rec = {"i": i, "l": l, "dimension": dim_w, "halves": halves, "end_dim": end_w,
                   "fixed_dim": (p + 1) * p ** (l - 1)}
            rep.layers.append(rec)
            rep.checks[f"layer fixed dim (i={i},l={l})"] = decomp[i, l].dimension == rec["fixed_dim"]
            rep.checks[f"W splits in two equal halves (i={i},l={l})"] = (
                halves == [dim_w // 2, dim_w // 2] and end_w == 2 and not (lo - hi))
        # cross-i: Hom(W_i, W_k) = H_ik(l) - H_ik(l-1)
        wmat = [[hom[l][i][k] - hom[l - 1][i][k] for k in range(nu)] for i in range(nu)]
        rep.checks[f"W layers pairwise matched in halves (l={l})"] = all(
            x == 2 for row in wmat for x in row)
        rep.layers.append({"l": l, "cross_hom": wmat, "multiplicity": nu})

    # cross-i equivalence at level m
    ends = [hom[m][i][i] for i in range(nu)]
    eq = [(i, k) for i in range(nu) for k in range(nu) if _pair_equivalent(hom[m][i][k], ends[i], ends[k])]
    js = sorted({(i + k) % nu for i in range(nu) for k in range(nu) if i != k and cross_condition(family, i, k)})
    predicted = sorted({(i, i) for i in range(nu)} | {
        (i, k) for i in range(nu) for k in range(nu)
        if i != k and cross_condition(family, i, k) and ends[i] == 1 and ends[k] == 1})
    rep.equivalence = {"level": m, "pairs": eq, "predicted": predicted, "j_values": js}
    rep.checks["equivalence pattern"] = sorted(eq) == predicted
    rep.checks["equivalence is an equivalence relation"] = _is_equivalence(eq, nu)
    rep.checks["Hom symmetry"] = all(hom[l][i][k] == hom[l][k][i] for l in levels
                                      for i in range(nu) for k in range(nu))
    for l in levels:
        if oracle_hom[l] is not None:
            rep.checks[f"oracle = brute force (l={l})"] = oracle_hom[l] == hom[l]

    reducible = sorted(c["i"] for c in rep.constituents if c["reducible"])
    if cfg.n % 4 == 0 and m == 1 and reducible:
        expected = sorted({0, cfg.n // 4})
    elif m == 1 and reducible:
        expected = [0]
    else:
        expected = []
    rep.anomaly = {"reducible_indices": reducible, "expected": expected,
                   "four_divides_n": cfg.n % 4 == 0}
    rep.checks["anomaly indices"] = reducible == expected
    return rep


def _is_equivalence(pairs, nu) -> bool:
    s = set(pairs)
    if any((i, i) not in s for i in range(nu)):
        return False
    if any((k, i) not in s for i, k in s):
        return False
    return all((i, t) in s for i, k in s for k2, t in s if k == k2)


def family_from_spec(cfg: FieldConfig, spec: CharacterSpec) -> ExtensionFamily:
    return extend_character(cfg, spec)


def level_of(cfg: FieldConfig, spec: CharacterSpec) -> int:
    return primitive_level(cfg, spec)
