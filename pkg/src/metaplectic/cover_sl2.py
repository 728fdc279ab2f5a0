"""Kubota's cocycle on SL2(Q_p), the n-fold cover, and the section over SL2(Z_p)."""
from __future__ import annotations

import random
from dataclasses import dataclass
from fractions import Fraction

import numpy as np

from .hilbert import hilbert_symbol, symbol_exp_array
from .localfield import FieldConfig, PrecisionError, RootOfUnity, TruncatedElement
from .matrices import I2, Mat2, dg, lt, sl2_lifts, ut


def _te(cfg, x: Fraction) -> TruncatedElement:
    return TruncatedElement.from_fraction(cfg, x)


def kubota_X(cfg: FieldConfig, g: Mat2) -> TruncatedElement:
    return _te(cfg, g.c if g.c != 0 else g.d)


def beta(cfg: FieldConfig, g1: Mat2, g2: Mat2) -> RootOfUnity:
    x1, x2, x12 = kubota_X(cfg, g1), kubota_X(cfg, g2), kubota_X(cfg, g1 @ g2)
    return hilbert_symbol(x12 / x1, x12 / x2)


def _check_sl(g: Mat2):
    if g.det() != 1:
        raise ValueError(f"determinant {g.det()} != 1")


@dataclass(frozen=True)
class CoverElement:
    mat: Mat2
    zeta: RootOfUnity

    def key(self, N: int):
        return (self.mat.mod(N), self.zeta.exp)


def cover_elem(cfg: FieldConfig, g: Mat2, z: int = 0) -> CoverElement:
    _check_sl(g)
    return CoverElement(g, RootOfUnity(z, cfg.n))


def cover_mul(cfg: FieldConfig, x: CoverElement, y: CoverElement) -> CoverElement:
    return CoverElement(x.mat @ y.mat, beta(cfg, x.mat, y.mat) * x.zeta * y.zeta)


def cover_inv(cfg: FieldConfig, x: CoverElement) -> CoverElement:
    gi = x.mat.inverse()
    # (g,z)(g^-1,z') = (I, beta(g,g^-1) z z')
    return CoverElement(gi, (beta(cfg, x.mat, gi) * x.zeta).inverse())


def section_s(cfg: FieldConfig, k: Mat2) -> RootOfUnity:
    """s(k) = (c, d)_n when 0 < val(c) < oo, else trivial.

    With this s, s(k1 k2) = beta(k1,k2) s(k1) s(k2) on SL2(Z_p), so
    (k, z) -> (k, s(k)^-1 z) is the isomorphism onto the direct product.
    """
    if not k.is_integral(cfg.p):
        raise ValueError("section_s needs an integral matrix")
    _check_sl(k)
    if k.c == 0:
        return RootOfUnity.one(cfg.n)
    c = _te(cfg, k.c)
    if c.val == 0:
        return RootOfUnity.one(cfg.n)
    return hilbert_symbol(c, _te(cfg, k.d))


def to_split(cfg: FieldConfig, x: CoverElement):
    """Cover coordinates over K -> direct product coordinates (k, z)."""
    return x.mat, (section_s(cfg, x.mat).inverse() * x.zeta)


# ---------------------------------------------------------------------------
# vectorized kernels on integer matrices (arrays of shape (..., 4))

def _val_dlog(cfg: FieldConfig, x: np.ndarray):
    """Valuation and residue dlog (sign included) of a nonzero int64 array."""
    x = np.array(x, dtype=np.int64)
    if np.any(x == 0):
        raise PrecisionError("zero where a unit was expected")
    p = cfg.p
    shape = x.shape
    x = x.ravel()
    v = np.zeros(x.shape, dtype=np.int64)
    idx = np.flatnonzero(x % p == 0)
    while idx.size:
        v[idx] += 1
        x[idx] //= p
        idx = idx[x[idx] % p == 0]
    table = np.asarray(cfg.dlog_table, dtype=np.int64)
    # python-style % keeps the sign information: (-u) % p is the residue of -u
    return v.reshape(shape), table[x % p].reshape(shape)


def matmul_arr(A: np.ndarray, B: np.ndarray) -> np.ndarray:
    a, b, c, d = A[..., 0], A[..., 1], A[..., 2], A[..., 3]
    e, f, g, h = B[..., 0], B[..., 1], B[..., 2], B[..., 3]
    return np.stack([a * e + b * g, a * f + b * h, c * e + d * g, c * f + d * h], axis=-1)


def X_arr(M: np.ndarray) -> np.ndarray:
    return np.where(M[..., 2] != 0, M[..., 2], M[..., 3])


def beta_arr(cfg: FieldConfig, A: np.ndarray, B: np.ndarray, AB: np.ndarray | None = None):
    if AB is None:
        AB = matmul_arr(A, B)
    v1, d1 = _val_dlog(cfg, X_arr(A))
    v2, d2 = _val_dlog(cfg, X_arr(B))
    v12, d12 = _val_dlog(cfg, X_arr(AB))
    return symbol_exp_array(cfg, v12 - v1, d12 - d1, v12 - v2, d12 - d2)


def section_arr(cfg: FieldConfig, K: np.ndarray) -> np.ndarray:
    c, d = K[..., 2], K[..., 3]
    out = np.zeros(c.shape, dtype=np.int64)
    nz = c != 0
    if nz.any():
        vc, dc = _val_dlog(cfg, np.where(nz, c, 1))
        live = nz & (vc > 0)
        if live.any():
            vd, dd = _val_dlog(cfg, np.where(live, d, 1))
            out = np.where(live, symbol_exp_array(cfg, vc, dc, vd, dd), 0)
    return out


# ---------------------------------------------------------------------------

def verify_cocycle(cfg: FieldConfig, level: int = 1, mode: str = "exhaustive",
                   samples: int = 100000, seed: int = 0) -> dict:
    """Check beta(g1,g2) beta(g1g2,g3) = beta(g1,g2g3) beta(g2,g3).

    Exhaustive mode runs over all triples of integer lifts of SL2(Z/p^level);
    sample mode draws random elements of SL2(Z/p^level) and lifts only those.
    """
    p = cfg.p
    N = p ** level
    fails = 0
    first = None
    if mode == "exhaustive":
        lifts = sl2_lifts(N, p)
        M = len(lifts)
        if M ** 3 > 5 * 10 ** 7:
            raise OverflowError(f"{M}^3 triples is over budget")
        G2 = lifts[None, :, :]
        G3 = lifts[:, None, :]
        G23 = matmul_arr(G2, G3)          # [k, j] = g_j g_k
        b23 = beta_arr(cfg, G2, G3, G23)
        for i in range(M):
            g1 = lifts[i]
            G12 = matmul_arr(g1[None, :], lifts)
            b12 = beta_arr(cfg, np.broadcast_to(g1, lifts.shape), lifts, G12)
            lhs2 = beta_arr(cfg, G12[None, :, :], G3)
            rhs1 = beta_arr(cfg, np.broadcast_to(g1, G23.shape), G23)
            diff = np.mod(b12[None, :] + lhs2 - rhs1 - b23, cfg.n)
            bad = np.nonzero(diff)
            if bad[0].size:
                fails += bad[0].size
                if first is None:
                    k, j = int(bad[0][0]), int(bad[1][0])
                    first = [lifts[i].tolist(), lifts[j].tolist(), lifts[k].tolist()]
        checked = M ** 3
    elif mode == "sample":
        from .matrices import lift_sl2, random_sl2_mod
        rng = np.random.default_rng(seed)
        M = None
        els = random_sl2_mod(N, p, 3 * samples, rng)
        L = np.array([lift_sl2(*map(int, r), N) for r in els], dtype=np.int64)
        A, B, C = L[0::3], L[1::3], L[2::3]
        AB = matmul_arr(A, B)
        BC = matmul_arr(B, C)
        diff = np.mod(beta_arr(cfg, A, B, AB) + beta_arr(cfg, AB, C)
                      - beta_arr(cfg, A, BC) - beta_arr(cfg, B, C), cfg.n)
        checked = samples
        bad = np.nonzero(diff)[0]
        fails = int(bad.size)
        if fails:
            t = bad[0]
            first = [A[t].tolist(), B[t].tolist(), C[t].tolist()]
    else:
        raise ValueError(f"mode {mode!r}")
    return {"check": "cocycle", "p": p, "n": cfg.n, "level": level, "mode": mode,
            "seed": seed if mode == "sample" else None,
            "checked": int(checked), "failures": int(fails),
            "counterexample": first, "ok": fails == 0}


def verify_section(cfg: FieldConfig, level: int = 2, block: int = 64) -> dict:
    """s(k1k2) = beta(k1,k2)s(k1)s(k2) over all pairs of lifts of SL2(Z/p^level)."""
    p = cfg.p
    n = cfg.n
    lifts = sl2_lifts(p ** level, p)
    M = len(lifts)
    S = section_arr(cfg, lifts)
    v, dl = _val_dlog(cfg, X_arr(lifts))
    fails = 0
    first = None
    for lo in range(0, M, block):
        K1 = lifts[lo:lo + block]
        c, d = K1[:, 2:3], K1[:, 3:4]
        e, g = lifts[None, :, 0], lifts[None, :, 2]
        f_, h = lifts[None, :, 1], lifts[None, :, 3]
        c12 = c * e + d * g
        d12 = c * f_ + d * h
        cz = c12 == 0
        vc, dc = _val_dlog(cfg, np.where(cz, 1, c12))
        vd, dd = _val_dlog(cfg, np.where(d12 == 0, 1, d12))
        vx = np.where(cz, vd, vc)
        dx = np.where(cz, dd, dc)
        v1, d1 = v[lo:lo + block, None], dl[lo:lo + block, None]
        bet = symbol_exp_array(cfg, vx - v1, dx - d1, vx - v[None, :], dx - dl[None, :])
        # s(k1k2), nontrivial only for 0 < val(c12)
        s12 = np.where(~cz & (vc > 0), symbol_exp_array(cfg, vc, dc, vd, dd), 0)
        dif = np.mod(s12 - bet - S[lo:lo + block, None] - S[None, :], n)
        nz = np.nonzero(dif)
        if nz[0].size:
            fails += int(nz[0].size)
            if first is None:
                first = [lifts[lo + int(nz[0][0])].tolist(), lifts[int(nz[1][0])].tolist()]
    return {"check": "section", "p": p, "n": n, "level": level, "pairs": M * M,
            "failures": fails, "counterexample": first, "ok": fails == 0}


def _window_k1(cfg: FieldConfig, j: int, size: int, rng) -> list:
    """Random words in generators of K^1_j (elements = I mod p^j)."""
    p = cfg.p
    pj = p ** j
    out = []
    for _ in range(size):
        g = I2
        for _ in range(3):
            k = rng.randrange(3)
            x = pj * rng.randrange(-p ** 2, p ** 2)
            g = g @ (ut(x) if k == 0 else lt(x) if k == 1 else dg(1 + x))
        out.append(g)
    return out


def verify_splitting(cfg: FieldConfig, subgroup: str, j: int = 1, samples: int = 300,
                     seed: int = 0) -> dict:
    """Is the cover trivial over the named subgroup?

    K1_j, T1capK1, B1capK1: beta restricted to a window of the subgroup is
    identically 1. T1_full: looks for a noncommuting pair; if the torus
    cover is abelian (n = 2) it tries the explicit quadratic section instead.
    """
    rng = random.Random(seed)
    p = cfg.p
    rep = {"subgroup": subgroup, "p": p, "n": cfg.n}
    if subgroup == "K1_j":
        if j < 1:
            raise ValueError("j >= 1")
        win = _window_k1(cfg, j, int(samples ** 0.5) + 5, rng)
        bad = [(x, y) for x in win for y in win if not beta(cfg, x, y).is_one()]
        rep.update(j=j, pairs=len(win) ** 2)
    elif subgroup == "T1capK1":
        us = [u for u in range(1, p ** 2) if u % p][:60]
        win = [dg(Fraction(u) * rng.choice([1, -1])) for u in us]
        bad = [(x, y) for x in win for y in win if not beta(cfg, x, y).is_one()]
        rep.update(pairs=len(win) ** 2)
    elif subgroup == "B1capK1":
        win = []
        while len(win) < 40:
            t = rng.randrange(1, p ** 3)
            if t % p == 0:
                continue
            win.append(dg(t) @ ut(rng.randrange(-p ** 3, p ** 3)))
        bad = [(x, y) for x in win for y in win if not beta(cfg, x, y).is_one()]
        rep.update(pairs=len(win) ** 2)
    elif subgroup == "T1_full":
        return _torus_splitting(cfg, rep)
    else:
        raise ValueError(f"unknown subgroup {subgroup!r}")
    rep["splits"] = not bad
    rep["witness"] = None if not bad else [repr(bad[0][0]), repr(bad[0][1])]
    return rep


def _torus_splitting(cfg: FieldConfig, rep: dict) -> dict:
    from .localfield import teichmuller
    p = cfg.p
    t = teichmuller(p, cfg.g, cfg.precision)
    gens = {"p": Fraction(p), "t_g": Fraction(t), "1+p": Fraction(1 + p)}
    for na, a in gens.items():
        for nb, b in gens.items():
            x = cover_elem(cfg, dg(a))
            y = cover_elem(cfg, dg(b))
            xy = cover_mul(cfg, x, y)
            yx = cover_mul(cfg, y, x)
            if xy.zeta != yx.zeta:
                rep.update(splits=False, reason="noncommuting pair",
                           witness=[f"dg({na})", f"dg({nb})"],
                           commutator_exp=(xy.zeta * yx.zeta.inverse()).exp)
                return rep
    # abelian torus cover: test f(p^a t^b u) = (p,p)^{a(a-1)/2} (t,p)^{ab}
    # as a splitting on a window
    P = TruncatedElement.uniformizer(cfg)
    T = TruncatedElement(0, t, cfg)
    hpp = hilbert_symbol(P, P).exp
    htp = hilbert_symbol(T, P).exp

    def f(a, b):
        return (hpp * a * (a - 1) // 2 + htp * a * b) % cfg.n

    bad = None
    rng = random.Random(1)
    for _ in range(400):
        a1, a2 = rng.randrange(-4, 5), rng.randrange(-4, 5)
        b1, b2 = rng.randrange(0, p - 1), rng.randrange(0, p - 1)
        g1 = dg(Fraction(p) ** a1 * t ** b1)
        g2 = dg(Fraction(p) ** a2 * t ** b2)
        lhs = (beta(cfg, g1, g2).exp + f(a1, b1) + f(a2, b2)) % cfg.n
        if lhs != f(a1 + a2, b1 + b2):
            bad = (a1, b1, a2, b2)
            break
    rep.update(splits=bad is None, reason="abelian; explicit quadratic section checked",
               witness=bad)
    return rep
