"""The n-fold cover of GL2: extended cocycle behind a validation gate, torus structure,
the n^2 characters chi'_{i,j}, Hecke dimensions, and restriction to the SL2 cover."""
from __future__ import annotations

import random
from collections import Counter
from dataclasses import dataclass, replace
from fractions import Fraction

import numpy as np

from .cover_sl2 import X_arr, _val_dlog, beta, beta_arr, matmul_arr
from .cyclo import lcm, root_sum
from .hecke_branching import (HeckeReport, family_modulus, oracle_fits,
                              support_test, unit_exponents)
from .hilbert import eta_unit_exp, hilbert_symbol, symbol_exp_array
from .localfield import FieldConfig, RootOfUnity, TruncatedElement, teichmuller
from .matrices import Mat2, dg, lift_sl2, random_sl2_mod, sl2_lifts, ut
from .quotient_oracle import (DEFAULT_BUDGET, BorelCharacter, FiniteQuotient, hom_dim_oracle,
                              induced_character, inflate, monomial_decomposition, norm_of_difference,
                              oracle_fields, standard_coset_reps, ClassFunction)
from .torus_characters import (CharacterSpec, _mod1, evaluate, extend_character,
                               primitive_level, torus_elem, validate_character)


def _te(cfg, x) -> TruncatedElement:
    return TruncatedElement.from_fraction(cfg, Fraction(x))


def _X(g: Mat2):
    return g.c if g.c != 0 else g.d


# -- candidate cocycles -----------------------------------------------------------------

def _proj(g: Mat2) -> Mat2:
    """g = dg(det g, 1) proj(g) with proj(g) in SL2."""
    return dg(1 / g.det(), 1) @ g


def beta_prime_transcribed(cfg: FieldConfig, g1: Mat2, g2: Mat2) -> RootOfUnity:
    """(X(g1g2)/X(g1), X(g1g2)/(X(g2) det g1))_n."""
    x12 = _te(cfg, _X(g1 @ g2))
    return hilbert_symbol(x12 / _te(cfg, _X(g1)), x12 / (_te(cfg, _X(g2)) * _te(cfg, g1.det())))


_PIECES = {
    "X": lambda g: _X(g),
    "det": lambda g: g.det(),
    "1": lambda g: Fraction(1),
}


def _family_candidate(f: str, h: str):
    def cand(cfg: FieldConfig, g1: Mat2, g2: Mat2) -> RootOfUnity:
        b = beta(cfg, _proj(g1), _proj(g2))
        c1 = hilbert_symbol(_te(cfg, g1.det()), _te(cfg, _PIECES[f](g2)))
        c2 = hilbert_symbol(_te(cfg, _PIECES[h](g1)), _te(cfg, g2.det()))
        return b * c1 * c2
    cand.__name__ = f"family(f={f},h={h})"
    return cand


def candidate_family() -> dict:
    out = {}
    for f in ("X", "det", "1"):
        for h in ("X", "det", "1"):
            lab = {"X": "X({})", "det": "det {}", "1": "1"}
            name = f"beta(proj) (det g1, {lab[f].format('g2')}) ({lab[h].format('g1')}, det g2)"
            out[name] = _family_candidate(f, h)
    return out


TRANSCRIBED = "transcribed"


def all_candidates() -> dict:
    c = candidate_family()
    c[TRANSCRIBED] = beta_prime_transcribed
    return c


# -- vectorized kernels for the adopted formula -----------------------------------------

def det_arr(A: np.ndarray) -> np.ndarray:
    return A[..., 0] * A[..., 3] - A[..., 1] * A[..., 2]


def beta_prime_arr(cfg: FieldConfig, A, B, AB=None) -> np.ndarray:
    if AB is None:
        AB = matmul_arr(A, B)
    v1, d1 = _val_dlog(cfg, X_arr(A))
    v2, d2 = _val_dlog(cfg, X_arr(B))
    v12, d12 = _val_dlog(cfg, X_arr(AB))
    vd, dd = _val_dlog(cfg, det_arr(A))
    return symbol_exp_array(cfg, v12 - v1, d12 - d1, v12 - v2 - vd, d12 - d2 - dd)


def section_prime(cfg: FieldConfig, k: Mat2) -> RootOfUnity:
    """s'(k) = (c, d/det k)_n when 0 < val(c) < oo, else trivial."""
    if not k.is_integral(cfg.p) or _te(cfg, k.det()).val != 0:
        raise ValueError("section_prime needs an element of GL2(Z_p)")
    if k.c == 0 or _te(cfg, k.c).val == 0:
        return RootOfUnity.one(cfg.n)
    return hilbert_symbol(_te(cfg, k.c), _te(cfg, k.d / k.det()))


def section_prime_arr(cfg: FieldConfig, K: np.ndarray) -> np.ndarray:
    c, d = K[..., 2], K[..., 3]
    out = np.zeros(c.shape, dtype=np.int64)
    nz = c != 0
    if nz.any():
        vc, dc = _val_dlog(cfg, np.where(nz, c, 1))
        live = nz & (vc > 0)
        if live.any():
            vd, dd = _val_dlog(cfg, np.where(live, d, 1))
            vt, dt = _val_dlog(cfg, det_arr(K))
            out = np.where(live, symbol_exp_array(cfg, vc, dc, vd - vt, dd - dt), 0)
    return out


def gl2_lifts(N: int, p: int) -> np.ndarray:
    """Integer lifts dg(delta, 1) h of GL2(Z/N), h running over SL2 lifts."""
    sl = sl2_lifts(N, p)
    out = []
    for dlt in range(1, N):
        if dlt % p:
            blk = sl.copy()
            blk[:, 0] *= dlt
            blk[:, 1] *= dlt
            out.append(blk)
    return np.concatenate(out)


def random_gl2_lifts(N: int, p: int, size: int, rng) -> np.ndarray:
    els = random_sl2_mod(N, p, size, rng)
    L = np.array([lift_sl2(*map(int, r), N) for r in els], dtype=np.int64)
    units = np.array([x for x in range(1, N) if x % p], dtype=np.int64)
    dl = rng.choice(units, size)
    L[:, 0] *= dl
    L[:, 1] *= dl
    return L


# -- validation gate ---------------------------------------------------------------------

_VALIDATED: dict = {}


def _rand_gl_mat(rng: random.Random, p: int, N: int) -> Mat2:
    while True:
        a, b, c, d = (rng.randrange(N) for _ in range(4))
        if (a * d - b * c) % p:
            if c == 0 and d == 0:
                continue
            return Mat2(a, b, c, d)


def _rand_diag_or_general(rng, p):
    # mixes torus elements with non-unit entries and general integral matrices
    if rng.random() < 0.3:
        return dg(Fraction(p) ** rng.randrange(-2, 3) * rng.choice([1, 2, 3, 1 + p]),
                  Fraction(p) ** rng.randrange(-2, 3) * rng.choice([1, 2, 1 + p]))
    return _rand_gl_mat(rng, p, p ** 2)


def _check_candidate(cfg: FieldConfig, cand, samples: int, seed: int) -> dict:
    rng = random.Random(seed)
    p = cfg.p
    res = {}
    # cocycle identity
    bad = None
    for _ in range(samples):
        g1, g2, g3 = (_rand_diag_or_general(rng, p) for _ in range(3))
        lhs = cand(cfg, g1, g2) * cand(cfg, g1 @ g2, g3)
        rhs = cand(cfg, g1, g2 @ g3) * cand(cfg, g2, g3)
        if lhs != rhs:
            bad = [repr(g1), repr(g2), repr(g3)]
            break
    res["cocycle"] = {"ok": bad is None, "counterexample": bad}
    # restriction to SL2
    bad = None
    for _ in range(samples):
        g1, g2 = (Mat2(*lift_sl2(*_rand_sl(rng, p), p * p)) for _ in range(2))
        if cand(cfg, g1, g2) != beta(cfg, g1, g2):
            bad = [repr(g1), repr(g2)]
            break
    res["sl2_restriction"] = {"ok": bad is None, "counterexample": bad}
    # triviality on N
    bad = None
    for _ in range(samples):
        g1, g2 = ut(Fraction(rng.randrange(-50, 50), p ** rng.randrange(3))), ut(rng.randrange(-50, 50))
        if not cand(cfg, g1, g2).is_one():
            bad = [repr(g1), repr(g2)]
            break
    res["n_trivial"] = {"ok": bad is None, "counterexample": bad}
    # splitting over K through s'
    bad = None
    for _ in range(samples):
        k1, k2 = _rand_gl_mat(rng, p, p ** 3), _rand_gl_mat(rng, p, p ** 3)
        if section_prime(cfg, k1 @ k2) != cand(cfg, k1, k2) * section_prime(cfg, k1) * section_prime(cfg, k2):
            bad = [repr(k1), repr(k2)]
            break
    res["k_splitting"] = {"ok": bad is None, "counterexample": bad}
    res["ok"] = all(v["ok"] for v in res.values() if isinstance(v, dict))
    return res


def _rand_sl(rng, p):
    N = p * p
    while True:
        a, b, c = (rng.randrange(N) for _ in range(3))
        if a % p:
            d = (1 + b * c) * pow(a, -1, N) % N
            return a, b, c, d


def validate_beta_prime(cfg: FieldConfig, samples: int = 400, seed: int = 0,
                        candidates: dict | None = None) -> dict:
    """Run the invariant suites on every candidate and adopt the passing one.

    Family candidates are tried first; the transcribed formula is the fallback.
    """
    cands = candidates or all_candidates()
    reports = {name: _check_candidate(cfg, c, samples, seed) for name, c in cands.items()}
    family_pass = [k for k, r in reports.items() if r["ok"] and k != TRANSCRIBED]
    adopted = None
    if len(family_pass) == 1:
        adopted = family_pass[0]
    elif not family_pass and reports.get(TRANSCRIBED, {}).get("ok"):
        adopted = TRANSCRIBED
    if adopted is not None:
        _VALIDATED[(cfg.p, cfg.n)] = cands[adopted]
    return {"p": cfg.p, "n": cfg.n, "samples": samples, "seed": seed,
            "candidates": reports, "family_passing": family_pass, "adopted": adopted,
            "ok": adopted is not None}


def adopted_beta_prime(cfg: FieldConfig):
    key = (cfg.p, cfg.n)
    if key not in _VALIDATED:
        raise RuntimeError("beta' has not been validated for this field; run validate_beta_prime")
    return _VALIDATED[key]


def ensure_validated(cfg: FieldConfig, samples: int = 60):
    """Validate the transcribed formula only (fast path used by library calls)."""
    key = (cfg.p, cfg.n)
    if key not in _VALIDATED:
        rep = _check_candidate(cfg, beta_prime_transcribed, samples, 0)
        if not rep["ok"]:
            raise RuntimeError(f"beta' failed validation: {rep}")
        _VALIDATED[key] = beta_prime_transcribed
    return _VALIDATED[key]


def beta_prime(cfg: FieldConfig, g1: Mat2, g2: Mat2) -> RootOfUnity:
    return adopted_beta_prime(cfg)(cfg, g1, g2)


def verify_beta_prime_exhaustive(cfg: FieldConfig, level: int = 1, mode: str = "exhaustive",
                                 samples: int = 100000, seed: int = 0) -> dict:
    """Cocycle identity for the adopted (vectorized) formula on GL2 lifts."""
    p, N = cfg.p, cfg.p ** level
    fails, first = 0, None
    if mode == "exhaustive":
        lifts = gl2_lifts(N, p)
        M = len(lifts)
        if M ** 3 > 2 * 10 ** 8:
            raise OverflowError(f"{M}^3 triples is over budget")
        G2 = lifts[None, :, :]
        G3 = lifts[:, None, :]
        G23 = matmul_arr(G2, G3)
        b23 = beta_prime_arr(cfg, G2, G3, G23)
        for i in range(M):
            g1 = lifts[i]
            G12 = matmul_arr(g1[None, :], lifts)
            b12 = beta_prime_arr(cfg, np.broadcast_to(g1, lifts.shape), lifts, G12)
            lhs2 = beta_prime_arr(cfg, G12[None, :, :], G3)
            rhs1 = beta_prime_arr(cfg, np.broadcast_to(g1, G23.shape), G23)
            bad = np.nonzero(np.mod(b12[None, :] + lhs2 - rhs1 - b23, cfg.n))
            if bad[0].size:
                fails += bad[0].size
                if first is None:
                    first = [g1.tolist(), lifts[int(bad[1][0])].tolist(), lifts[int(bad[0][0])].tolist()]
        checked = M ** 3
    else:
        rng = np.random.default_rng(seed)
        L = random_gl2_lifts(N, p, 3 * samples, rng)
        A, B, C = L[0::3], L[1::3], L[2::3]
        AB, BC = matmul_arr(A, B), matmul_arr(B, C)
        d = np.mod(beta_prime_arr(cfg, A, B, AB) + beta_prime_arr(cfg, AB, C)
                   - beta_prime_arr(cfg, A, BC) - beta_prime_arr(cfg, B, C), cfg.n)
        bad = np.nonzero(d)[0]
        fails = int(bad.size)
        if fails:
            first = [A[bad[0]].tolist(), B[bad[0]].tolist(), C[bad[0]].tolist()]
        checked = samples
    return {"check": "gl-cocycle", "p": p, "n": cfg.n, "level": level, "mode": mode,
            "checked": int(checked), "failures": int(fails), "counterexample": first,
            "ok": fails == 0}


def verify_section_prime(cfg: FieldConfig, level: int = 1, mode: str = "exhaustive",
                         samples: int = 100000, seed: int = 0, block: int = 32) -> dict:
    """s'(k1k2) = beta'(k1,k2)s'(k1)s'(k2) on pairs of GL2 lifts."""
    p, N, n = cfg.p, cfg.p ** level, cfg.n
    fails, first = 0, None
    if mode == "exhaustive":
        lifts = gl2_lifts(N, p)
        S = section_prime_arr(cfg, lifts)
        for lo in range(0, len(lifts), block):
            K1 = lifts[lo:lo + block, None, :]
            K2 = lifts[None, :, :]
            K12 = matmul_arr(K1, K2)
            d = np.mod(section_prime_arr(cfg, K12) - beta_prime_arr(cfg, K1, K2, K12)
                       - S[lo:lo + block, None] - S[None, :], n)
            bad = np.nonzero(d)
            if bad[0].size:
                fails += int(bad[0].size)
                if first is None:
                    first = [lifts[lo + int(bad[0][0])].tolist(), lifts[int(bad[1][0])].tolist()]
        checked = len(lifts) ** 2
    else:
        rng = np.random.default_rng(seed)
        L = random_gl2_lifts(N, p, 2 * samples, rng)
        A, B = L[0::2], L[1::2]
        AB = matmul_arr(A, B)
        d = np.mod(section_prime_arr(cfg, AB) - beta_prime_arr(cfg, A, B, AB)
                   - section_prime_arr(cfg, A) - section_prime_arr(cfg, B), n)
        bad = np.nonzero(d)[0]
        fails = int(bad.size)
        if fails:
            first = [A[bad[0]].tolist(), B[bad[0]].tolist()]
        checked = samples
    return {"check": "gl-section", "p": p, "n": n, "level": level, "mode": mode,
            "checked": int(checked), "failures": fails, "counterexample": first, "ok": fails == 0}


def verify_restriction_and_n(cfg: FieldConfig, level: int = 1) -> dict:
    """beta' = beta on SL2 lifts (all pairs) and beta' = 1 on N."""
    p, N = cfg.p, cfg.p ** level
    sl = sl2_lifts(N, p)
    A, B = sl[:, None, :], sl[None, :, :]
    d = np.mod(beta_prime_arr(cfg, A, B) - beta_arr(cfg, A, B), cfg.n)
    us = np.array([[1, x, 0, 1] for x in range(-3 * N, 3 * N)], dtype=np.int64)
    dn = beta_prime_arr(cfg, us[:, None, :], us[None, :, :])
    return {"sl2_pairs": int(d.size), "sl2_failures": int(np.count_nonzero(d)),
            "n_pairs": int(dn.size), "n_failures": int(np.count_nonzero(dn % cfg.n)),
            "ok": not np.any(d) and not np.any(dn % cfg.n)}


# -- the cover ---------------------------------------------------------------------------

@dataclass(frozen=True)
class Gl2CoverElement:
    mat: Mat2
    zeta: RootOfUnity


def gl_cover_elem(cfg: FieldConfig, g: Mat2, z: int = 0) -> Gl2CoverElement:
    adopted_beta_prime(cfg)
    if g.det() == 0:
        raise ValueError("singular matrix")
    return Gl2CoverElement(g, RootOfUnity(z, cfg.n))


def gl_cover_mul(cfg: FieldConfig, x: Gl2CoverElement, y: Gl2CoverElement) -> Gl2CoverElement:
    return Gl2CoverElement(x.mat @ y.mat, beta_prime(cfg, x.mat, y.mat) * x.zeta * y.zeta)


def gl_cover_inv(cfg: FieldConfig, x: Gl2CoverElement) -> Gl2CoverElement:
    gi = x.mat.inverse()
    return Gl2CoverElement(gi, (beta_prime(cfg, x.mat, gi) * x.zeta).inverse())


def gl_commutator(cfg: FieldConfig, x: Gl2CoverElement, y: Gl2CoverElement) -> RootOfUnity:
    xy = gl_cover_mul(cfg, x, y)
    yx = gl_cover_mul(cfg, y, x)
    if xy.mat != yx.mat:
        raise ValueError("matrices do not commute")
    return xy.zeta * yx.zeta.inverse()


def _gl_torus(cfg, s, t, z=0):
    return gl_cover_elem(cfg, dg(Fraction(s), Fraction(t)), z)


def _gl_window(cfg: FieldConfig):
    p, n = cfg.p, cfg.n
    t = teichmuller(p, cfg.g, cfg.precision)
    vals = [Fraction(t) ** a * Fraction(p) ** v for v in range(n) for a in range(p - 1)]
    return vals


def _gl_gens(cfg: FieldConfig):
    p = cfg.p
    t = Fraction(teichmuller(p, cfg.g, cfg.precision))
    return {"p": Fraction(p), "t_g": t, "1+p": Fraction(1 + p)}


def _gl_signatures(cfg, tests) -> int:
    ensure_validated(cfg)
    win = _gl_window(cfg)
    sigs = set()
    for s in win:
        for t in win:
            x = _gl_torus(cfg, s, t)
            sigs.add(tuple(gl_commutator(cfg, x, y).exp for y in tests))
    return len(sigs)


def gl_index_center(cfg: FieldConfig) -> int:
    """[T~ : Z(T~)] by commutator signatures against dg(g,1), dg(1,g), g in {p, t_g, 1+p}."""
    ensure_validated(cfg)
    g = _gl_gens(cfg)
    tests = [_gl_torus(cfg, a, 1) for a in g.values()] + [_gl_torus(cfg, 1, a) for a in g.values()]
    return _gl_signatures(cfg, tests)


def gl_index_A(cfg: FieldConfig) -> int:
    """[T~ : A]: signatures against the generators of A (units and p^n in each slot)."""
    ensure_validated(cfg)
    g = _gl_gens(cfg)
    a_gens = [g["t_g"], g["1+p"], g["p"] ** cfg.n]
    tests = [_gl_torus(cfg, a, 1) for a in a_gens] + [_gl_torus(cfg, 1, a) for a in a_gens]
    return _gl_signatures(cfg, tests)


# -- characters of the GL torus ------------------------------------------------------------

@dataclass(frozen=True)
class GlCharacterSpec:
    """chi'(dg(u p^{nr}, v p^{ns}), z) = eps(z) theta1(u) theta2(v) omega1^r omega2^s.

    Each slot is a CharacterSpec (its pi block is the value at p^n in that slot).
    """
    slot1: CharacterSpec
    slot2: CharacterSpec
    epsilon_exp: int = 1

    def to_json(self) -> dict:
        return {"slots": [self.slot1.to_json(), self.slot2.to_json()], "epsilon_exp": self.epsilon_exp}

    @classmethod
    def from_json(cls, d: dict, cfg: FieldConfig | None = None) -> "GlCharacterSpec":
        if int(d.get("epsilon_exp", 1)) != 1:
            raise ValueError("only epsilon_exp = 1 is supported")
        s = d["slots"]
        if len(s) != 2:
            raise ValueError("a GL character needs two slots")
        a = CharacterSpec.from_json({"pi_order": 1, **s[0]}, cfg)
        b = CharacterSpec.from_json({"pi_order": 1, **s[1]}, cfg)
        return cls(a, b)


def _slot_value(cfg, spec: CharacterSpec, x: TruncatedElement) -> Fraction:
    if x.val % cfg.n:
        raise ValueError("element not in A")
    return _mod1(spec.theta_unit(cfg, x.unit) + (x.val // cfg.n) * spec.omega)


def gl_evaluate(cfg: FieldConfig, spec: GlCharacterSpec, x: Gl2CoverElement) -> Fraction:
    g = x.mat
    if g.b != 0 or g.c != 0:
        raise ValueError("not a torus element")
    s, t = _te(cfg, g.a), _te(cfg, g.d)
    return _mod1(Fraction(x.zeta.exp * spec.epsilon_exp, cfg.n) + _slot_value(cfg, spec.slot1, s)
                 + _slot_value(cfg, spec.slot2, t))


def _random_gl_A(cfg, rng):
    p, n = cfg.p, cfg.n
    t = teichmuller(p, cfg.g, cfg.precision)

    def one():
        u = pow(t, rng.randrange(p - 1), cfg.modulus) * pow(1 + p, rng.randrange(p ** 2), cfg.modulus)
        return Fraction(u % cfg.modulus) * Fraction(p) ** (n * rng.randrange(-2, 3))
    return _gl_torus(cfg, one(), one(), rng.randrange(n))


def validate_gl_character(cfg: FieldConfig, spec: GlCharacterSpec, samples: int = 300, seed: int = 0) -> dict:
    ensure_validated(cfg)
    rng = random.Random(seed)
    for _ in range(samples):
        x, y = _random_gl_A(cfg, rng), _random_gl_A(cfg, rng)
        xy = gl_cover_mul(cfg, x, y)
        if _mod1(gl_evaluate(cfg, spec, xy) - gl_evaluate(cfg, spec, x) - gl_evaluate(cfg, spec, y)):
            return {"ok": False, "offending_pair": [repr(x.mat), repr(y.mat)]}
    return {"ok": True, "checked": samples, "offending_pair": None}


def _eta_shift(cfg: FieldConfig, spec: CharacterSpec, k: int) -> CharacterSpec:
    """spec * eta^{-k} on units."""
    q = cfg.q
    return replace(spec, teich_exp=(spec.teich_exp + k * (q - 1) // cfg.n) % (q - 1))


def gl_twist(cfg: FieldConfig, base: GlCharacterSpec, i: int, j: int) -> GlCharacterSpec:
    """chi'_{i,j} = chi'_0 * (eta^{-j} o slot1) (eta^{-i} o slot2)."""
    return GlCharacterSpec(_eta_shift(cfg, base.slot1, j), _eta_shift(cfg, base.slot2, i))


@dataclass(frozen=True)
class GlFamily:
    cfg: FieldConfig
    base: GlCharacterSpec
    members: dict

    def __getitem__(self, ij):
        i, j = ij
        n = self.cfg.n
        return self.members[(i % n, j % n)]

    def __len__(self):
        return len(self.members)

    @property
    def m(self) -> int:
        """Level of chi' (both slots)."""
        return max(primitive_level(self.cfg, self.base.slot1), primitive_level(self.cfg, self.base.slot2))

    @property
    def m_ratio(self) -> int:
        """Level of theta1/theta2."""
        return primitive_level(self.cfg, slot_ratio(self.base))


def slot_ratio(spec: GlCharacterSpec) -> CharacterSpec:
    a, b = spec.slot1, spec.slot2
    if a.principal_den_exp != b.principal_den_exp:
        raise ValueError("slots must share principal_den_exp")
    return CharacterSpec(a.teich_exp - b.teich_exp, a.principal_exp - b.principal_exp, 1, 0,
                         a.principal_den_exp)


def _unit_gens(cfg):
    t = teichmuller(cfg.p, cfg.g, cfg.precision)
    return [t, 1 + cfg.p]


def _tk_values(cfg, spec: GlCharacterSpec) -> tuple:
    """Values on the T cap K generators dg(t_g,1), dg(1+p,1), dg(1,t_g), dg(1,1+p)."""
    return tuple(spec.slot1.theta_unit(cfg, u) for u in _unit_gens(cfg)) + \
        tuple(spec.slot2.theta_unit(cfg, u) for u in _unit_gens(cfg))


def gl_char_extensions(cfg: FieldConfig, base: GlCharacterSpec, validate: bool = True) -> GlFamily:
    if validate:
        rep = validate_gl_character(cfg, base, samples=60)
        if not rep["ok"]:
            raise ValueError(f"base character fails validation: {rep['offending_pair']}")
    n = cfg.n
    members = {(i, j): gl_twist(cfg, base, i, j) for i in range(n) for j in range(n)}
    vals = {_tk_values(cfg, s) for s in members.values()}
    if len(vals) != n * n:
        raise ArithmeticError("twists are not distinct on T cap K")  # pragma: no cover
    return GlFamily(cfg, base, members)


def trivial_on_t1k(cfg: FieldConfig, spec: GlCharacterSpec) -> bool:
    """chi' trivial on {dg(a, a^-1) : a unit}."""
    return all(spec.slot1.theta_unit(cfg, u) == spec.slot2.theta_unit(cfg, u) for u in _unit_gens(cfg))


def triviality_formula(family: GlFamily, i: int, j: int) -> bool:
    """chi'_{0,0} on dg(a,a^-1) equals eta(a)^{j-i}."""
    cfg = family.cfg
    base = family.base
    for u in _unit_gens(cfg):
        lhs = base.slot1.theta_unit(cfg, u) - base.slot2.theta_unit(cfg, u)
        rhs = Fraction(eta_unit_exp(cfg, u) * (j - i), cfg.n)
        if _mod1(lhs - rhs):
            return False
    return True


# -- GL Hecke dimensions ------------------------------------------------------------------

def gl_borel_character(family: GlFamily, i: int, j: int, l: int) -> BorelCharacter:
    cfg = family.cfg
    M = family_modulus(cfg, family.m)
    s = family[i, j]
    return BorelCharacter(M, unit_exponents(cfg, s.slot1, l, M), unit_exponents(cfg, s.slot2, l, M))


def gl_coset_reps(cfg: FieldConfig, l: int) -> list:
    from .hecke_branching import _RepsOnly
    return standard_coset_reps(_RepsOnly("GL", cfg.p, l))


def gl_hecke_dim_closed(l: int, m: int, special: bool) -> int:
    if l < m:
        return 0
    return (2 if special else 1) + (l - m)


def gl_hecke_dim_bruteforce(family: GlFamily, i: int, j: int, l: int,
                            right: tuple | None = None) -> HeckeReport:
    """dim of the Hecke algebra for chi'_{i,j} (both sides, or chi'_{i,j} vs chi'_right)."""
    cfg = family.cfg
    if l < 1:
        raise ValueError("level must be >= 1")
    m = family.m
    special = trivial_on_t1k(cfg, family[i, j])
    closed = gl_hecke_dim_closed(l, m, special)
    reps = gl_coset_reps(cfg, l)
    if l < m:
        sp = family[i, j]
        u = 1 + cfg.p ** l
        v1, v2 = sp.slot1.theta_unit(cfg, u), sp.slot2.theta_unit(cfg, u)
        w = {"element": f"dg(1+p^{l},1)" if v1 else f"dg(1,1+p^{l})", "chi_exp": str(v1 or v2),
             "failing_cosets": [name for name, _ in reps]}
        return HeckeReport("GL", cfg.p, cfg.n, m, l, i, j, [], 0, closed, special, witness=w)
    left = gl_borel_character(family, i, j, l)
    rt = gl_borel_character(family, *(right or (i, j)), l)
    sup = [name for name, x in reps if support_test("GL", cfg.p, l, x, left, rt)[0]]
    return HeckeReport("GL", cfg.p, cfg.n, m, l, i, j, sup, len(sup), closed, special)


class GLOracle:
    def __init__(self, family: GlFamily, budget: int = DEFAULT_BUDGET):
        self.family = family
        self.budget = budget
        self._Q = {}
        self.primes = set()

    def quotient(self, l: int) -> FiniteQuotient:
        if l not in self._Q:
            self._Q = {l: FiniteQuotient("GL", self.family.cfg.p, l, self.budget)}
        return self._Q[l]

    def induced(self, i: int, j: int, l: int) -> ClassFunction:
        Q = self.quotient(l)
        chi = gl_borel_character(self.family, i, j, l)
        fields = oracle_fields(Q, chi.M, self.family.cfg.n)
        self.primes.update(F.r for F in fields)
        return induced_character(Q, chi, fields, label=f"V'_{i},{j},{l}")


def gl_hecke_dim(family: GlFamily, i: int, j: int, l: int, oracle: bool | None = None,
                 budget: int = DEFAULT_BUDGET, cache: GLOracle | None = None) -> HeckeReport:
    rep = gl_hecke_dim_bruteforce(family, i, j, l)
    use = oracle_fits("GL", family.cfg.p, l, budget) if oracle is None else oracle
    if use and l >= family.m:
        orc = cache or GLOracle(family, budget)
        V = orc.induced(i, j, l)
        rep.dim_oracle = hom_dim_oracle(V, V)
        rep.oracle_primes = sorted(F.r for F in V.fields)
    return rep


def gl_branch_report(family: GlFamily, l_max: int, seed: int = 0) -> dict:
    """Level-m pieces and W-layers for every chi'_{i,j}."""
    cfg = family.cfg
    p, n, m = cfg.p, cfg.n, family.m
    if l_max < m:
        raise ValueError("l_max below the level")
    recs, checks = [], {}
    reducible = []
    for i in range(n):
        for j in range(n):
            hs = {l: gl_hecke_dim_bruteforce(family, i, j, l) for l in range(m, l_max + 1)}
            for l, h in hs.items():
                checks[f"closed=brute (i={i},j={j},l={l})"] = h.ok
            dec = {l: monomial_decomposition("GL", p, l, gl_borel_character(family, i, j, l), seed)
                   for l in range(m, l_max + 1)}
            end = hs[m].dim_bruteforce
            rec = {"i": i, "j": j, "end_dim": end, "reducible": end == 2,
                   "split_dimensions": dec[m].constituent_dims if end == 2 else None,
                   "dimension": (p + 1) * p ** (m - 1), "layers": []}
            if end == 2:
                reducible.append((i, j))
            for l in range(m + 1, l_max + 1):
                new = sorted((Counter(dec[l].constituent_dims) - Counter(dec[l - 1].constituent_dims)).elements())
                dim_w = (p + 1) * (p - 1) * p ** (l - 2)
                rec["layers"].append({"l": l, "dimension": dim_w, "constituents": new})
                checks[f"W' irreducible (i={i},j={j},l={l})"] = new == [dim_w]
            recs.append(rec)
    solvable = any(trivial_on_t1k(cfg, family[i, j]) for i in range(n) for j in range(n))
    checks["reducible pair count"] = len(reducible) == (n if solvable else 0)
    return {"p": p, "n": n, "m": m, "m_ratio": family.m_ratio, "l_max": l_max, "pairs": recs,
            "reducible_pairs": reducible, "condition_solvable": solvable, "checks": checks,
            "ok": all(checks.values())}


# -- double cosets on the GL side ------------------------------------------------------------

def gl_eps_collapse(cfg: FieldConfig, l: int) -> dict:
    """Conjugating lt(eps p^r) by h = dg(eps^-1, 1) gives lt(p^r) mod p^l, for 1 <= r < l."""
    N = cfg.p ** l
    eps = teichmuller(cfg.p, cfg.g, l)
    h = dg(Fraction(1, eps), 1)
    out = {}
    for r in range(1, l):
        g = h.inverse() @ Mat2(1, 0, eps * cfg.p ** r, 1) @ h
        out[r] = g.mod(N) == Mat2(1, 0, cfg.p ** r, 1).mod(N)
    return {"eps": eps, "collapses": out, "ok": all(out.values())}


def gl_double_cosets(cfg: FieldConfig, l: int, budget: int = DEFAULT_BUDGET) -> dict:
    """B\\GL2(Z/p^l)/B against {I, w, lt(p^r)}; lt(eps p^r) must land in lt(p^r)."""
    from .quotient_oracle import double_cosets
    Q = FiniteQuotient("GL", cfg.p, l, budget)
    reps = standard_coset_reps(Q)
    eps = teichmuller(cfg.p, cfg.g, l)
    extra = [(f"lt(eps p^{r})", (1, 0, eps * cfg.p ** r % Q.N, 1)) for r in range(1, l)]
    rep = double_cosets(Q, reps + extra)
    dup = {c["rep"]: c.get("duplicate_of") for c in rep["cosets"] if c["rep"].startswith("lt(eps")}
    listed = [c for c in rep["cosets"] if not c["rep"].startswith("lt(eps")]
    collapse = gl_eps_collapse(cfg, l)
    rep.update(count=len(listed), expected_count=2 + (l - 1),
               eps_duplicates=dup, eps_collapse=collapse)
    rep["ok"] = (rep["covers"] and rep["missed_classes"] == 0 and len(listed) == 2 + (l - 1)
                 and all(c["size"] > 0 and not c.get("overlap") for c in listed)
                 and all(dup[f"lt(eps p^{r})"] == f"lt(p^{r})" for r in range(1, l))
                 and collapse["ok"])
    return rep


# -- restriction to the SL2 cover --------------------------------------------------------------

def _val_tuple_T1(cfg, gspec: GlCharacterSpec, gens) -> tuple:
    """Values of chi' on (dg(x, x^-1), 1) for x in gens."""
    out = []
    for x in gens:
        out.append(gl_evaluate(cfg, gspec, _gl_torus(cfg, x, 1 / Fraction(x))))
    return tuple(out)


def _A_T1_gens(cfg) -> list:
    """Generators of A cap T~1: dg(t_g), dg(1+p), dg(p^n)."""
    t = Fraction(teichmuller(cfg.p, cfg.g, cfg.precision))
    return [t, Fraction(1 + cfg.p), Fraction(cfg.p) ** cfg.n]


def _sl_vals(cfg, spec: CharacterSpec, gens) -> tuple:
    return tuple(evaluate(cfg, spec, torus_elem(cfg, x)) for x in gens)


def compatible_sl_base(cfg: FieldConfig, gbase: GlCharacterSpec) -> CharacterSpec:
    """SL character of A with the same units as theta1/theta2; for n odd also matching
    chi'_{0,0} on dg(p^n); for n even the first square root is chosen."""
    ratio = slot_ratio(gbase)
    target = gl_evaluate(cfg, gbase, _gl_torus(cfg, Fraction(cfg.p) ** cfg.n, Fraction(1, cfg.p ** cfg.n)))
    k = cfg.n // cfg.n_under  # dg(p^n) = dg(p^{n_})^k
    omegas = _roots_for(cfg, ratio, target, k)
    o = min(omegas)
    return replace(ratio, pi_order=o.denominator, pi_exp=o.numerator)


def _roots_for(cfg, unit_spec: CharacterSpec, target: Fraction, k: int) -> list:
    """All omega with evaluate(dg(p^{n_ k})) = target, for the given unit part."""
    probe = replace(unit_spec, pi_order=1, pi_exp=0)
    base = evaluate(cfg, probe, torus_elem(cfg, Fraction(cfg.p) ** (cfg.n_under * k)))
    out = []
    for e in range(k):
        o = _mod1((target - base + e) / k)
        out.append(o)
    good = []
    for o in out:
        sp = replace(unit_spec, pi_order=o.denominator, pi_exp=o.numerator)
        if evaluate(cfg, sp, torus_elem(cfg, Fraction(cfg.p) ** (cfg.n_under * k))) == target:
            good.append(o)
    return sorted(set(good))


def restrict_char_to_sl(gfamily: GlFamily, i: int, j: int, sl_base: CharacterSpec | None = None) -> dict:
    cfg = gfamily.cfg
    n, nu = cfg.n, cfg.n_under
    gens = _A_T1_gens(cfg)
    res = _val_tuple_T1(cfg, gfamily[i, j], gens)
    if n % 2:
        base = sl_base or compatible_sl_base(cfg, gfamily.base)
        if _sl_vals(cfg, base, gens) != _val_tuple_T1(cfg, gfamily.base, gens):
            raise ValueError("SL base is not compatible with chi'_{0,0}")
        fam = extend_character(cfg, base)
        hits = [k for k in range(nu) if _sl_vals(cfg, fam[k], gens) == res]
        k_formula = (i - j) * pow(2, -1, n) % n
        return {"n_parity": "odd", "k": hits[0] if len(hits) == 1 else None, "matches": hits,
                "k_formula": k_formula, "ok": hits == [k_formula]}
    data = even_restriction_data(cfg, gfamily)
    hits = [lab for lab, sp in data["ell_chi_k"].items() if _sl_vals(cfg, sp, gens) == res]
    return {"n_parity": "even", "matches": hits, "count": len(hits), "ok": len(hits) == 2}


def _ext_label(lab):
    return {"unit": lab[0], "val": lab[1], "k": lab[2]}


def even_restriction_data(cfg: FieldConfig, gfamily: GlFamily) -> dict:
    """For n even: the characters e/o chi'_j and the extensions ell chi_k on A of T~1."""
    n, nu, p = cfg.n, cfg.n_under, cfg.p
    q = cfg.q
    t = Fraction(teichmuller(p, cfg.g, cfg.precision))
    P = Fraction(p)
    # e/o chi'_j: extend Res chi'_{0,j} from A cap T~1 (val in nZ) to A (val in n_ Z)
    eo = {}
    for j in range(n):
        g = gfamily[0, j]
        units = replace(slot_ratio(g), pi_order=1, pi_exp=0)
        target = gl_evaluate(cfg, g, _gl_torus(cfg, P ** n, 1 / P ** n))
        roots = _roots_for(cfg, units, target, 2)
        if len(roots) != 2:
            raise ArithmeticError("expected two extensions")  # pragma: no cover
        for lab, o in zip("eo", roots):  # ordered by value on (dg(p^{n_}), 1)
            eo[(lab, j)] = replace(units, pi_order=o.denominator, pi_exp=o.numerator)
    # chi_ on Z(T~) cap T~1, from chi'_{0,0}
    g0 = gfamily.base
    c_t = gl_evaluate(cfg, g0, _gl_torus(cfg, t ** n, 1 / t ** n))
    c_u = gl_evaluate(cfg, g0, _gl_torus(cfg, Fraction(1 + p), Fraction(1, 1 + p)))
    c_p = gl_evaluate(cfg, g0, _gl_torus(cfg, P ** n, 1 / P ** n))
    # square roots on the two extra generators of Z(T~1)
    sq_t = sorted({_mod1((c_t + e) / 2) for e in range(2)})
    xpp = torus_elem(cfg, P ** nu)
    from .cover_sl2 import cover_mul
    corr = Fraction(cover_mul(cfg, xpp, xpp).zeta.exp, n)  # (dg(p^n_),1)^2 = (dg(p^n), corr)
    sq_p = sorted({_mod1((c_p - corr + e) / 2) for e in range(2)})
    ell = {}
    ell_k = {}
    for a, vt in enumerate(sq_t):
        for b, vp in enumerate(sq_p):
            lab = ("1" if a == 0 else "t_g^n_", "0" if b == 0 else "p^n_")
            ell[lab] = (vt, c_u, vp)
            for k in range(nu):
                th_t = _mod1((vt + k) / nu)
                te = th_t * (q - 1)
                if te.denominator != 1:
                    raise ArithmeticError("unit value is not a (q-1)-th root")  # pragma: no cover
                pe = c_u * p ** g0.slot1.principal_den_exp
                if pe.denominator != 1:
                    raise ArithmeticError("principal value outside the grid")  # pragma: no cover
                ell_k[lab + (k,)] = CharacterSpec(int(te), int(pe) % p ** g0.slot1.principal_den_exp,
                                                  vp.denominator, vp.numerator, g0.slot1.principal_den_exp)
    return {"eo_chi_j": eo, "ell_chi": ell, "ell_chi_k": ell_k}


def res_rho_prime_analysis(cfg: FieldConfig, gfamily: GlFamily) -> dict:
    n = cfg.n
    out = {"p": cfg.p, "n": n}
    win = gl_torus_window(cfg, gfamily.base)
    out["window"] = {k: v for k, v in win.items() if k in ("order", "V", "m", "degree", "norm")}
    out["index_Z1_over_ZcapT1"] = win["index_Z1_over_ZcapT1"]
    out["index_A1_over_AcapT1"] = win["index_A1_over_AcapT1"]
    if n % 2:
        out["central_characters"] = len(win["central_mults"])
        out["multiplicities"] = sorted(win["central_mults"].values())
        fib = Counter(restrict_char_to_sl(gfamily, i, j)["k"] for i in range(n) for j in range(n))
        out["fiber_sizes"] = {str(k): v for k, v in sorted(fib.items(), key=lambda kv: str(kv[0]))}
        out["ok"] = (out["central_characters"] == 1 and out["multiplicities"] == [n]
                     and set(fib.values()) == {n} and None not in fib)
        return out
    data = even_restriction_data(cfg, gfamily)
    gens_A = [x for x in _sl_A_gens(cfg)]
    eo_set = {_sl_vals(cfg, s, gens_A) for s in data["eo_chi_j"].values()}
    ell_set = {_sl_vals(cfg, s, gens_A) for s in data["ell_chi_k"].values()}
    valid = all(validate_character(cfg, s, "A", samples=30)["ok"] for s in data["ell_chi_k"].values())
    out["eo_count"] = len(eo_set)
    out["ell_k_count"] = len(ell_set)
    out["sets_equal"] = eo_set == ell_set
    out["ell_valid"] = valid
    # multiplicities of the Heisenberg constituents via central characters in the window
    ell_mults = {}
    for lab, (vt, vu, vp) in data["ell_chi"].items():
        key = ("Z1", vt, vu, vp)
        ell_mults["/".join(lab)] = win["central_mults"].get(key, 0)
    out["ell_multiplicities"] = ell_mults
    out["central_characters"] = len([v for v in win["central_mults"].values() if v])
    twice = [restrict_char_to_sl(gfamily, i, j)["count"] for i in range(n) for j in range(n)]
    out["each_restriction_twice"] = all(c == 2 for c in twice)
    out["ok"] = (out["sets_equal"] and valid and len(eo_set) == 2 * n and len(ell_set) == 2 * n
                 and out["central_characters"] == 4 and set(ell_mults.values()) == {n // 2}
                 and out["each_restriction_twice"] and out["index_Z1_over_ZcapT1"] == 4
                 and out["index_A1_over_AcapT1"] == 2)
    return out


def _sl_A_gens(cfg):
    t = Fraction(teichmuller(cfg.p, cfg.g, cfg.precision))
    return [t, Fraction(1 + cfg.p), Fraction(cfg.p) ** cfg.n_under]


# -- finite window of the GL torus ---------------------------------------------------------------

def gl_torus_window(cfg: FieldConfig, spec: GlCharacterSpec) -> dict:
    """Ind_A^T chi' in a finite quotient of T~ and its restriction to Z(T~1).

    Coordinates (a1, b1, v1, a2, b2, v2, z) for (dg(t_g^a1 (1+p)^b1 p^v1, ...), z).
    The subgroup divided out, dg((1+p^m) p^{VZ}, (1+p^m) p^{VZ}), is central,
    carries the trivial cocycle and meets mu_n trivially.
    """
    p, n, nu = cfg.p, cfg.n, cfg.n_under
    m = max(primitive_level(cfg, spec.slot1), primitive_level(cfg, spec.slot2))
    span = p ** (m - 1)
    R0 = lcm(spec.slot1.omega.denominator, spec.slot2.omega.denominator)
    V = 2 * n * nu * R0
    hdl = cfg.dlog_minus_one

    def sym(v1, a1, v2, a2):  # (s1, t2)_n exponent, dlog of unit part = a
        return (v1 * v2 * hdl + v2 * a1 - v1 * a2) % n

    def mul(x, y):
        a1, b1, v1, c1, d1, w1, z1 = x
        a2, b2, v2, c2, d2, w2, z2 = y
        e = sym(v1, a1, w2, c2)
        return ((a1 + a2) % (p - 1), (b1 + b2) % span, (v1 + v2) % V,
                (c1 + c2) % (p - 1), (d1 + d2) % span, (w1 + w2) % V, (z1 + z2 + e) % n)

    def inv(x):
        a, b, v, c, d, w, z = x
        y = ((-a) % (p - 1), (-b) % span, (-v) % V, (-c) % (p - 1), (-d) % span, (-w) % V, 0)
        return y[:6] + ((-z - mul(x, y)[6]) % n,)

    t = teichmuller(p, cfg.g, cfg.precision)
    Nm = cfg.modulus

    def unit(a, b):
        return Fraction(pow(t, a, Nm) * pow(1 + p, b, Nm) % Nm)

    def chi(x):
        a, b, v, c, d, w, z = x
        g = Gl2CoverElement(dg(unit(a, b) * Fraction(p) ** v, unit(c, d) * Fraction(p) ** w),
                            RootOfUnity(z, n))
        return gl_evaluate(cfg, spec, g)

    # cosets of A: valuations mod n in each slot
    reps = [(0, 0, r, 0, 0, s, 0) for r in range(n) for s in range(n)]
    A_cache = {}

    def ind(x):
        if x[2] % n or x[5] % n:
            return []
        key = x[:6]
        if key not in A_cache:
            x0 = key + (0,)
            A_cache[key] = [chi(mul(mul(inv(r), x0), r)) for r in reps]
        zf = Fraction(x[6], n)
        return [_mod1(v + zf) for v in A_cache[key]]

    order = ((p - 1) * span * V) ** 2 * n
    M = lcm(n, p - 1, span, V, 2 * n, R0 * 2, spec.slot1.omega.denominator, spec.slot2.omega.denominator)

    # norm <Ind, Ind>: Ind vanishes off A; sum over A with z = 0 then times n
    exps = []
    for a1 in range(p - 1):
        for b1 in range(span):
            for v1 in range(0, V, n):
                for a2 in range(p - 1):
                    for b2 in range(span):
                        for v2 in range(0, V, n):
                            terms = ind((a1, b1, v1, a2, b2, v2, 0))
                            for s1 in terms:
                                for s2 in terms:
                                    exps.append(int((s1 - s2) * M) % M)
    total = root_sum(exps, M) * n
    if total % order:
        raise ArithmeticError("window norm is not an integer")  # pragma: no cover

    # central characters of Res_{Z(T~1)}: elements dg(x, x^-1), x = t^a (1+p)^b p^v
    def sl_elem(a, b, v, z=0):
        return (a % (p - 1), b % span, v % V, (-a) % (p - 1), (-b) % span, (-v) % V, z)

    T1 = [(a, b, v) for a in range(p - 1) for b in range(span) for v in range(V)]
    T1_gens = [sl_elem(1, 0, 0), sl_elem(0, 1, 0), sl_elem(0, 0, 1)]
    T_gens = T1_gens + [(1, 0, 0, 0, 0, 0, 0), (0, 0, 1, 0, 0, 0, 0)]

    def comm(x, y):
        return (mul(x, y)[6] - mul(y, x)[6]) % n

    Z1 = [e for e in T1 if all(comm(sl_elem(*e), g) == 0 for g in T1_gens)]
    ZT = [e for e in T1 if all(comm(sl_elem(*e), g) == 0 for g in T_gens)]
    A1 = [e for e in T1 if e[2] % nu == 0]
    AT = [e for e in A1 if e[2] % n == 0]
    traces = {e: ind(sl_elem(*e)) for e in Z1}
    mults = {}
    if n % 2 == 0:
        g_t, g_u, g_p = sl_elem(nu, 0, 0), sl_elem(0, 1, 0), sl_elem(0, 0, nu)
        c_u = _scalar(ind, g_u)
        for vt in _square_roots(ind, mul(g_t, g_t)):
            for vp in _square_roots(ind, mul(g_p, g_p)):
                lam = _extend_on(Z1, [(g_t, vt), (g_u, c_u), (g_p, vp)], mul, n, sl_elem)
                if lam is None:
                    continue
                tot = [int((s - lam[e]) * M) % M for e in Z1 for s in traces[e]]
                val = root_sum(tot, M)
                if val % (len(Z1) * nu):
                    raise ArithmeticError("central multiplicity is not a multiple of the Heisenberg degree")  # pragma: no cover
                mults[("Z1", vt, c_u, vp)] = val // (len(Z1) * nu)
    else:
        # Z(T~1) lies in Z(T~), so rho' is scalar there
        for e in Z1:
            if len(set(traces[e])) != 1:
                raise ArithmeticError("rho' is not scalar on Z(T~1)")  # pragma: no cover
        mults[("Z1",)] = len(reps) // nu
    return {"order": order, "V": V, "m": m, "degree": len(reps), "norm": total // order,
            "index_Z1_over_ZcapT1": len(Z1) // max(1, len(ZT)),
            "index_A1_over_AcapT1": len(A1) // max(1, len(AT)),
            "cocycle_law_ok": _window_law_check(cfg, sym),
            "central_mults": mults}


def _scalar(ind, x) -> Fraction:
    terms = ind(x)
    if not terms or len(set(terms)) != 1:
        raise ArithmeticError("rho' is not scalar at this element")  # pragma: no cover
    return terms[0]


def _square_roots(ind, x2) -> list:
    v = _scalar(ind, x2)
    return sorted({_mod1((v + k) / 2) for k in range(2)})


def _extend_on(Z1, gens, mul, n, key_of):
    """Character of the window group Z1 (z = 0 representatives) with given generator
    values, or None when the values are inconsistent or do not generate Z1."""
    ident = (0,) * 7
    lam = {ident[:6]: Fraction(0)}
    frontier = [ident]
    while frontier:
        nxt = []
        for x in frontier:
            for g, val in gens:
                y = mul(x, g)
                v = _mod1(lam[x[:6]] + val - Fraction(y[6], n))
                key = y[:6]
                if key in lam:
                    if lam[key] != v:
                        return None
                else:
                    lam[key] = v
                    nxt.append(key + (0,))
        frontier = nxt
    if len(lam) != len(Z1):
        return None
    res = {}
    for e in Z1:
        k = key_of(*e)[:6]
        if k not in lam:
            return None
        res[e] = lam[k]
    return res


def _window_law_check(cfg, sym, samples: int = 40, seed: int = 0) -> bool:
    """The window multiplication uses (s1, t2)_n; compare with beta' on diagonals."""
    rng = random.Random(seed)
    p = cfg.p
    t = teichmuller(p, cfg.g, cfg.precision)
    for _ in range(samples):
        e = [rng.randrange(p - 1) for _ in range(4)]
        v = [rng.randrange(-3, 4) for _ in range(4)]
        d1 = dg(Fraction(t ** e[0]) * Fraction(p) ** v[0], Fraction(t ** e[1]) * Fraction(p) ** v[1])
        d2 = dg(Fraction(t ** e[2]) * Fraction(p) ** v[2], Fraction(t ** e[3]) * Fraction(p) ** v[3])
        if beta_prime_transcribed(cfg, d1, d2).exp != sym(v[0], e[0], v[3], e[3]):
            return False
    return True


# -- W-layer lift check -------------------------------------------------------------------------

def w_layer_lift_check(cfg: FieldConfig, gfamily: GlFamily, sl_base: CharacterSpec, k: int, l: int,
                       budget: int = DEFAULT_BUDGET) -> dict:
    """Find (i, j) with Res (GL layer W'_{i,j,l}) = W_{k,l} as characters of SL2(Z/p^l)."""
    from .hecke_branching import sl_borel_character
    p, n = cfg.p, cfg.n
    fam = extend_character(cfg, sl_base)
    m = max(fam.m, gfamily.m)
    if l <= m:
        raise ValueError("the layer check needs l > m")
    Q = FiniteQuotient("SL", p, l, budget)
    Qlo = FiniteQuotient("SL", p, l - 1, budget)
    G = FiniteQuotient("GL", p, l, budget)
    Glo = FiniteQuotient("GL", p, l - 1, budget)
    M = lcm(family_modulus(cfg, m), 1)
    fields = oracle_fields(G, M, n)
    sl_pos = G.index_of(Q.elements)
    sl_pos_lo = Glo.index_of(Qlo.elements)

    def sl_char(level_Q, i):
        chi = sl_borel_character(fam, i, level_Q.l, M)
        return induced_character(level_Q, chi, fields)

    V_sl, V_sl_lo = sl_char(Q, k), sl_char(Qlo, k)
    W_sl = V_sl - inflate(V_sl_lo, Q)
    candidates = [(0, j) for j in range(n)] + [(i, j) for i in range(1, n) for j in range(n)]
    found = None
    space_match = {}
    tried = []
    dims = monomial_decomposition("SL", p, l, sl_borel_character(fam, k, l, M)).constituent_dims
    dims_lo = monomial_decomposition("SL", p, l - 1, sl_borel_character(fam, k, l - 1, M)).constituent_dims
    halves = sorted((Counter(dims) - Counter(dims_lo)).elements())
    for i, j in candidates:
        # quick filter: restricted Borel characters must agree on units
        gchi = _gl_borel(gfamily, i, j, l, M)
        schi = sl_borel_character(fam, k, l, M)
        units = [u for u in range(p ** l) if u % p]
        if any((gchi.e1[u] + gchi.e2[pow(u, -1, p ** l)] - schi.e1[u]) % M for u in units):
            continue
        big = induced_character(G, gchi, fields)
        lo = induced_character(Glo, _gl_borel(gfamily, i, j, l - 1, M), fields)
        res = _restrict(big, Q, sl_pos)
        res_lo = inflate(_restrict(lo, Qlo, sl_pos_lo), Q)
        W_gl = res - res_lo
        d = norm_of_difference(W_gl, W_sl)
        tried.append({"i": i, "j": j, "norm_of_difference": d})
        if d == 0:
            found = (i, j)
            space_match = {"l": norm_of_difference(res, V_sl) == 0,
                           "l-1": norm_of_difference(_restrict(lo, Qlo, sl_pos_lo), V_sl_lo) == 0}
            break
    dim_w = (p + 1) * (p - 1) * p ** (l - 2)
    return {"p": p, "n": n, "k": k, "l": l, "match": found, "tried": tried,
            "space_match": space_match, "sl_halves": halves,
            "halves_equal": halves == [dim_w // 2] * 2,
            "expected_j": (-2 * k) % n if n % 2 else None,
            "ok": found is not None and halves == [dim_w // 2] * 2 and all(space_match.values())}


def _gl_borel(gfamily: GlFamily, i, j, l, M) -> BorelCharacter:
    cfg = gfamily.cfg
    s = gfamily[i, j]
    return BorelCharacter(M, unit_exponents(cfg, s.slot1, l, M), unit_exponents(cfg, s.slot2, l, M))


def _restrict(V: ClassFunction, Q: FiniteQuotient, pos: np.ndarray) -> ClassFunction:
    return ClassFunction(Q, V.M, V.fields, [v[pos] for v in V.values], V.degree, V.label + "|SL")
