"""Heisenberg structure of the metaplectic torus and its genuine characters.

Character values are kept exactly as elements of Q/Z (Fractions mod 1);
chi(x) = exp(2 pi i * value).
"""
from __future__ import annotations

import math
import random
from dataclasses import dataclass, field, replace
from fractions import Fraction

from .cover_sl2 import CoverElement, cover_inv, cover_mul
from .cyclo import lcm, root_sum
from .hilbert import eta_unit_exp, hilbert_symbol
from .localfield import (FieldConfig, RootOfUnity, TruncatedElement, decompose_unit,
                         is_nth_power, teichmuller)
from .matrices import dg

ONE = Fraction(0)


def _mod1(x) -> Fraction:
    x = Fraction(x)
    return x - math.floor(x)


# -- torus elements ------------------------------------------------------------

def torus_elem(cfg: FieldConfig, t, z: int = 0) -> CoverElement:
    if isinstance(t, TruncatedElement):
        t = t.to_fraction()
    return CoverElement(dg(Fraction(t)), RootOfUnity(z, cfg.n))


def torus_param(cfg: FieldConfig, x: CoverElement) -> TruncatedElement:
    m = x.mat
    if m.b != 0 or m.c != 0:
        raise ValueError("not a diagonal element")
    return TruncatedElement.from_fraction(cfg, m.a)


def in_center(cfg: FieldConfig, x: CoverElement) -> bool:
    return is_nth_power(torus_param(cfg, x), cfg.n_under)


def in_A(cfg: FieldConfig, x: CoverElement) -> bool:
    return torus_param(cfg, x).val % cfg.n_under == 0


def torus_commutator(cfg: FieldConfig, x: CoverElement, y: CoverElement) -> RootOfUnity:
    """x y x^-1 y^-1, computed with the cover law."""
    c = cover_mul(cfg, cover_mul(cfg, x, y), cover_mul(cfg, cover_inv(cfg, x), cover_inv(cfg, y)))
    if c.mat.a != 1 or c.mat.d != 1:
        raise ArithmeticError("commutator of torus elements is not central")  # pragma: no cover
    return c.zeta


def _gens(cfg: FieldConfig):
    t = teichmuller(cfg.p, cfg.g, cfg.precision)
    return {"p": Fraction(cfg.p), "t_g": Fraction(t), "1+p": Fraction(1 + cfg.p)}


def _signature_count(cfg, window, tests) -> int:
    sigs = set()
    for t in window:
        x = torus_elem(cfg, t)
        sigs.add(tuple(torus_commutator(cfg, x, torus_elem(cfg, s)).exp for s in tests))
    return len(sigs)


def _window(cfg: FieldConfig):
    # val in [0, n_), units mod 1+p^2
    p = cfg.p
    out = []
    for v in range(cfg.n_under):
        for u in range(1, p * p):
            if u % p:
                out.append(Fraction(u) * Fraction(p) ** v)
    return out


def index_center(cfg: FieldConfig) -> int:
    """[T~ : Z(T~)] as the number of distinct commutator signatures.

    x and y lie in the same coset of the centre iff they have the same
    commutators with a generating set of T~.
    """
    g = _gens(cfg)
    return _signature_count(cfg, _window(cfg), list(g.values()))


def index_A(cfg: FieldConfig) -> int:
    """[T~ : A], A = centralizer of the unit part; signatures against units only."""
    g = _gens(cfg)
    return _signature_count(cfg, _window(cfg), [g["t_g"], g["1+p"]])


# -- character specs -------------------------------------------------------------

@dataclass(frozen=True)
class CharacterSpec:
    """Genuine character of A (or of the centre), by its values on generators.

    theta(t_g) = teich_exp/(q-1), theta(1+p) = principal_exp/p^principal_den_exp,
    value at (dg(p^n_), 1) = pi_exp/pi_order; mu_n acts through epsilon = id.
    """
    teich_exp: int = 0
    principal_exp: int = 0
    pi_order: int = 1
    pi_exp: int = 0
    principal_den_exp: int = 2
    epsilon_exp: int = 1

    def to_json(self) -> dict:
        d = {"teich_exp": self.teich_exp, "principal_exp": self.principal_exp,
             "pi_order": self.pi_order, "pi_exp": self.pi_exp}
        if self.principal_den_exp != 2:
            d["principal_den_exp"] = self.principal_den_exp
        return d

    @classmethod
    def from_json(cls, d: dict, cfg: FieldConfig | None = None) -> "CharacterSpec":
        order = d.get("pi_order")
        if order is None:
            order = lcm(cfg.n, cfg.q - 1) if cfg else 1
        eps = int(d.get("epsilon_exp", 1))
        if eps != 1:
            raise ValueError("only epsilon_exp = 1 is supported")
        return cls(int(d.get("teich_exp", 0)), int(d.get("principal_exp", 0)), int(order),
                   int(d.get("pi_exp", 0)), int(d.get("principal_den_exp", 2)))

    def theta_unit(self, cfg: FieldConfig, u: int) -> Fraction:
        k = self.principal_den_exp
        a, b = decompose_unit(cfg, u, k + 1)
        return _mod1(Fraction(a * self.teich_exp, cfg.q - 1) + Fraction(b * self.principal_exp, cfg.p ** k))

    @property
    def omega(self) -> Fraction:
        return _mod1(Fraction(self.pi_exp, self.pi_order))


def evaluate(cfg: FieldConfig, spec: CharacterSpec, x: CoverElement) -> Fraction:
    """chi(dg(u p^{n_ r}), z) = eps(z) theta(u) omega^r eps((p^{n_ r},u))^-1 kappa_r."""
    t = torus_param(cfg, x)
    nu = cfg.n_under
    if t.val % nu:
        raise ValueError(f"element with val {t.val} is not in A")
    r = t.val // nu
    n = cfg.n
    hpp = hilbert_symbol(TruncatedElement.uniformizer(cfg), TruncatedElement.uniformizer(cfg)).exp
    unit = TruncatedElement(0, t.unit, cfg, t.prec)
    s = hilbert_symbol(TruncatedElement(nu * r, 1, cfg), unit).exp
    kappa = Fraction(hpp * nu * nu * (r * (r - 1) // 2), n)
    return _mod1(Fraction(x.zeta.exp * spec.epsilon_exp, n) + spec.theta_unit(cfg, t.unit)
                 + r * spec.omega - Fraction(s, n) + kappa)


def _random_A(cfg: FieldConfig, rng: random.Random, center: bool) -> CoverElement:
    p = cfg.p
    nu = cfg.n_under
    t = teichmuller(p, cfg.g, cfg.precision)
    a = rng.randrange(p - 1)
    if center:
        a -= a % nu
    u = pow(t, a, cfg.modulus) * pow(1 + p, rng.randrange(p ** 2), cfg.modulus) % cfg.modulus
    r = rng.randrange(-3, 4)
    return torus_elem(cfg, Fraction(u) * Fraction(p) ** (nu * r), rng.randrange(cfg.n))


def subgroup_generators(cfg: FieldConfig, on: str) -> list:
    nu = cfg.n_under
    g = _gens(cfg)
    tg = g["t_g"] ** (nu if on == "Z" else 1)
    base = [tg, g["1+p"], Fraction(cfg.p) ** nu]
    out = [torus_elem(cfg, b) for b in base]
    out.append(torus_elem(cfg, 1, 1))
    return out


def validate_character(cfg: FieldConfig, spec: CharacterSpec, on: str = "A",
                       samples: int = 1000, seed: int = 0, evaluator=None) -> dict:
    """Multiplicativity of the evaluation rule on Z or A, via the cover law."""
    if on not in ("Z", "A"):
        raise ValueError("on must be 'Z' or 'A'")
    ev = evaluator or evaluate
    gens = subgroup_generators(cfg, on)
    rng = random.Random(seed)
    pairs = [(x, y) for x in gens for y in gens]
    pairs += [(_random_A(cfg, rng, on == "Z"), _random_A(cfg, rng, on == "Z")) for _ in range(samples)]
    for x, y in pairs:
        xy = cover_mul(cfg, x, y)
        if _mod1(ev(cfg, spec, xy) - ev(cfg, spec, x) - ev(cfg, spec, y)) != 0:
            return {"ok": False, "on": on, "checked": len(pairs),
                    "offending_pair": [_describe(cfg, x), _describe(cfg, y)]}
    return {"ok": True, "on": on, "checked": len(pairs), "offending_pair": None}


def _describe(cfg, x: CoverElement):
    t = torus_param(cfg, x)
    return {"val": t.val, "unit": t.unit, "zeta": x.zeta.exp}


def primitive_level(cfg: FieldConfig, spec: CharacterSpec) -> int:
    m = 1
    while True:
        w = pow(1 + cfg.p, cfg.p ** (m - 1), cfg.modulus)
        if evaluate(cfg, spec, torus_elem(cfg, w)) == 0:
            return m
        m += 1
        if m > cfg.precision:
            raise ValueError("level exceeds working precision")


# -- twists ----------------------------------------------------------------------

def twist(cfg: FieldConfig, spec: CharacterSpec, i: int) -> CharacterSpec:
    """theta -> theta * eta^{2i} on units."""
    q = cfg.q
    return replace(spec, teich_exp=(spec.teich_exp - 2 * i * (q - 1) // cfg.n) % (q - 1))


@dataclass(frozen=True)
class ExtensionFamily:
    cfg: FieldConfig
    base: CharacterSpec
    twists: tuple = field(default=())

    def __len__(self):
        return len(self.twists)

    def __getitem__(self, i):
        return self.twists[i % len(self.twists)]

    @property
    def m(self) -> int:
        return primitive_level(self.cfg, self.base)


def extend_character(cfg: FieldConfig, base: CharacterSpec) -> ExtensionFamily:
    rep = validate_character(cfg, base, "A")
    if not rep["ok"]:
        raise ValueError(f"base character fails validation: {rep['offending_pair']}")
    tw = tuple(twist(cfg, base, i) for i in range(cfg.n_under))
    return ExtensionFamily(cfg, base, tw)


def generator_values(cfg: FieldConfig, spec: CharacterSpec, on: str = "A") -> tuple:
    return tuple(evaluate(cfg, spec, x) for x in subgroup_generators(cfg, on))


def unit_values(cfg: FieldConfig, spec: CharacterSpec) -> tuple:
    """Values on T~ cap K~ generators: dg(t_g), dg(1+p), (I, zeta)."""
    g = subgroup_generators(cfg, "A")
    return tuple(evaluate(cfg, spec, x) for x in (g[0], g[1], g[3]))


def conjugate_character(cfg: FieldConfig, base: CharacterSpec, i: int) -> CharacterSpec:
    """chi^s(x) = chi(s^-1 x s), s = (dg(p^i), 1), identified among the twists."""
    s = torus_elem(cfg, Fraction(cfg.p) ** i)
    si = cover_inv(cfg, s)
    gens = subgroup_generators(cfg, "A")
    vals = tuple(evaluate(cfg, base, cover_mul(cfg, cover_mul(cfg, si, x), s)) for x in gens)
    for k in range(cfg.n_under):
        cand = twist(cfg, base, k)
        if generator_values(cfg, cand) == vals:
            return cand
    raise ArithmeticError("conjugate is not among the twists")


def _square_gens(cfg):
    g = _gens(cfg)
    return [g["t_g"] ** 2, g["1+p"] ** 2]


def quad_condition(family: ExtensionFamily, i: int) -> bool:
    """chi_i trivial on {(dg(t^2), 1) : t unit}."""
    cfg = family.cfg
    return all(evaluate(cfg, family[i], torus_elem(cfg, t)) == 0 for t in _square_gens(cfg))


def cross_condition(family: ExtensionFamily, i: int, k: int) -> bool:
    """chi_0 on squares of units equals eps o eta^{-(i+k)}."""
    cfg = family.cfg
    for t in _square_gens(cfg):
        te = TruncatedElement.from_fraction(cfg, t)
        e = Fraction(eta_unit_exp(cfg, te.unit) * (i + k), cfg.n)
        if _mod1(evaluate(cfg, family.base, torus_elem(cfg, t)) + e) != 0:
            return False
    return True


# -- finite Heisenberg window (Stone - von Neumann check) -------------------------

def heisenberg_window_check(cfg: FieldConfig, spec: CharacterSpec) -> dict:
    """Induce chi from A to T~ inside a finite quotient window; report degree and norm.

    Window: units mod 1+p^m, valuations mod V (V a multiple of n_*n on which chi
    is trivial), mu_n.  The subgroups divided out are central and meet mu_n
    trivially, so the quotient carries genuine characters.
    """
    p, n, nu = cfg.p, cfg.n, cfg.n_under
    m = primitive_level(cfg, spec)
    span = p ** (m - 1)
    t = teichmuller(p, cfg.g, cfg.precision)
    # smallest V = nu*n*R with chi(dg(p^V), 1) = 1
    R = 1
    while evaluate(cfg, spec, torus_elem(cfg, Fraction(p) ** (nu * n * R))) != 0:
        R += 1
        if R > 10 ** 4:
            raise ValueError("pi block of too large an order for the window")
    V = nu * n * R
    hdl = cfg.dlog_minus_one

    def unit_dlog(a, b):
        return a % (p - 1)  # dlog of t_g^a (1+p)^b mod p

    def mul(x, y):
        a1, b1, v1, z1 = x
        a2, b2, v2, z2 = y
        # beta(dg t1, dg t2) = (t2, t1)_n
        e = (v2 * v1 * hdl + v1 * unit_dlog(a2, b2) - v2 * unit_dlog(a1, b1)) % n
        return ((a1 + a2) % (p - 1), (b1 + b2) % span, (v1 + v2) % V, (z1 + z2 + e) % n)

    def inv(x):
        a, b, v, z = x
        y = ((-a) % (p - 1), (-b) % span, (-v) % V, 0)
        e = mul(x, y)[3]
        return (y[0], y[1], y[2], (-z - e) % n)

    def chi(x):
        a, b, v, z = x
        u = pow(t, a, cfg.modulus) * pow(1 + p, b, cfg.modulus) % cfg.modulus
        return evaluate(cfg, spec, torus_elem(cfg, Fraction(u) * Fraction(p) ** v, z))

    A_elems = [(a, b, v, z) for a in range(p - 1) for b in range(span)
               for v in range(0, V, nu) for z in range(n)]
    reps = [(0, 0, j, 0) for j in range(nu)]
    M = lcm(n, p - 1, span, spec.pi_order, 2 * n)
    # Ind vanishes off A (A is normal of index nu); on A it is a sum over reps
    exps = []
    for x in A_elems:
        terms = [chi(mul(mul(inv(r), x), r)) for r in reps]
        for s1 in terms:
            for s2 in terms:
                exps.append(int((s1 - s2) * M) % M)
    order = (p - 1) * span * V * n
    total = root_sum(exps, M)
    if total % order:
        raise ArithmeticError("norm is not an integer")
    return {"degree": len(reps), "norm": total // order, "window_order": order,
            "V": V, "m": m}
