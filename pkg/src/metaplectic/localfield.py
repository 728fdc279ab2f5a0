"""Truncated arithmetic in Q_p (p odd), with the residue-field data the tame
n-th Hilbert symbol needs.

The uniformizer is the rational prime p itself.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction
from functools import cached_property, lru_cache


class PrecisionError(ArithmeticError):
    """Raised when a result would need more p-adic digits than we carry."""


def _is_prime(p: int) -> bool:
    if p < 2:
        return False
    for d in range(2, math.isqrt(p) + 1):
        if p % d == 0:
            return False
    return True


def vp(x: int, p: int) -> int:
    if x == 0:
        raise ValueError("valuation of 0")
    v = 0
    while x % p == 0:
        x //= p
        v += 1
    return v


def smallest_primitive_root(p: int) -> int:
    fac = [r for r in range(2, p) if (p - 1) % r == 0 and _is_prime(r)]
    for g in range(2, p):
        if all(pow(g, (p - 1) // r, p) != 1 for r in fac):
            return g
    return 1  # p = 2, not used


@dataclass(frozen=True)
class FieldConfig:
    p: int
    n: int
    precision: int = 4

    def __post_init__(self):
        p, n = self.p, self.n
        if p % 2 == 0 or not _is_prime(p):
            raise ValueError(f"p must be an odd prime, got {p}")
        if n < 2 or (p - 1) % n:
            raise ValueError(f"n must be >= 2 and divide p-1 (p={p}, n={n})")
        if self.precision < 1:
            raise ValueError("precision must be positive")

    @property
    def q(self) -> int:
        return self.p

    @property
    def L(self) -> int:
        return self.precision

    @property
    def n_under(self) -> int:
        return self.n if self.n % 2 else self.n // 2

    @property
    def modulus(self) -> int:
        return self.p ** self.precision

    @cached_property
    def g(self) -> int:
        return smallest_primitive_root(self.p)

    @cached_property
    def dlog_table(self) -> tuple:
        # index u in [0, p): dlog of u, -1 for u = 0
        t = [-1] * self.p
        x = 1
        for k in range(self.p - 1):
            t[x] = k
            x = x * self.g % self.p
        return tuple(t)

    @cached_property
    def dlog_minus_one(self) -> int:
        return (self.p - 1) // 2

    @cached_property
    def zeta_residue(self) -> int:
        """Residue of the fixed generator of mu_n."""
        return pow(self.g, (self.p - 1) // self.n, self.p)

    def to_json(self) -> dict:
        return {"p": self.p, "n": self.n, "precision": self.precision}

    @classmethod
    def from_json(cls, d: dict) -> "FieldConfig":
        return cls(int(d["p"]), int(d["n"]), int(d.get("precision", 4)))


def dlog(cfg: FieldConfig, u: int) -> int:
    """Discrete log of u mod p with respect to g; result mod p-1."""
    r = u % cfg.p
    if r == 0:
        raise ValueError(f"dlog of a non-unit ({u} mod {cfg.p})")
    return cfg.dlog_table[r]


@dataclass(frozen=True)
class RootOfUnity:
    """zeta^exp where zeta = g^((q-1)/n) mod p."""
    exp: int
    n: int

    def __post_init__(self):
        object.__setattr__(self, "exp", self.exp % self.n)

    def __mul__(self, other: "RootOfUnity") -> "RootOfUnity":
        if other.n != self.n:
            raise ValueError("roots of unity of different orders")
        return RootOfUnity(self.exp + other.exp, self.n)

    def inverse(self) -> "RootOfUnity":
        return RootOfUnity(-self.exp, self.n)

    def __pow__(self, k: int) -> "RootOfUnity":
        return RootOfUnity(self.exp * k, self.n)

    def is_one(self) -> bool:
        return self.exp == 0

    def order(self) -> int:
        return self.n // math.gcd(self.exp, self.n)

    def residue(self, cfg: FieldConfig) -> int:
        return pow(cfg.zeta_residue, self.exp, cfg.p)

    @classmethod
    def one(cls, n: int) -> "RootOfUnity":
        return cls(0, n)


@dataclass(frozen=True)
class TruncatedElement:
    """x = p^val * unit, with unit known mod p^prec (prec <= L).

    prec normally equals cfg.precision; it only drops after cancellation in
    additions.
    """
    val: int
    unit: int
    cfg: FieldConfig = field(repr=False, compare=False)
    prec: int = -1

    def __post_init__(self):
        pr = self.cfg.precision if self.prec < 0 else self.prec
        if pr < 1:
            raise PrecisionError("no significant digits left")
        object.__setattr__(self, "prec", pr)
        u = self.unit % self.cfg.p ** pr
        if u % self.cfg.p == 0:
            raise ValueError(f"unit part {self.unit} is divisible by p={self.cfg.p}")
        object.__setattr__(self, "unit", u)

    # constructors -----------------------------------------------------
    @classmethod
    def from_int(cls, cfg: FieldConfig, x: int) -> "TruncatedElement":
        return cls.from_fraction(cfg, Fraction(x))

    @classmethod
    def from_fraction(cls, cfg: FieldConfig, x) -> "TruncatedElement":
        x = Fraction(x)
        if x == 0:
            raise ValueError("0 is not in F^x")
        p, N = cfg.p, cfg.modulus
        num, den = x.numerator, x.denominator
        v = 0
        while num % p == 0:
            num //= p
            v += 1
        while den % p == 0:
            den //= p
            v -= 1
        return cls(v, num * pow(den, -1, N) % N, cfg)

    @classmethod
    def one(cls, cfg: FieldConfig) -> "TruncatedElement":
        return cls(0, 1, cfg)

    @classmethod
    def uniformizer(cls, cfg: FieldConfig) -> "TruncatedElement":
        return cls(1, 1, cfg)

    # arithmetic --------------------------------------------------------
    def _m(self, other):
        return self.cfg.p ** min(self.prec, other.prec)

    def __mul__(self, other):
        if isinstance(other, int):
            other = TruncatedElement.from_int(self.cfg, other)
        pr = min(self.prec, other.prec)
        return TruncatedElement(self.val + other.val, self.unit * other.unit, self.cfg, pr)

    __rmul__ = __mul__

    def inverse(self) -> "TruncatedElement":
        return TruncatedElement(-self.val, pow(self.unit, -1, self.cfg.p ** self.prec),
                                self.cfg, self.prec)

    def __truediv__(self, other):
        if isinstance(other, int):
            other = TruncatedElement.from_int(self.cfg, other)
        return self * other.inverse()

    def __pow__(self, k: int):
        if k < 0:
            return self.inverse() ** (-k)
        return TruncatedElement(self.val * k, pow(self.unit, k, self.cfg.p ** self.prec),
                                self.cfg, self.prec)

    def __neg__(self):
        return TruncatedElement(self.val, -self.unit, self.cfg, self.prec)

    def __add__(self, other):
        # absolute precision of each summand is val + prec
        p = self.cfg.p
        a, b = (self, other) if self.val <= other.val else (other, self)
        top = min(a.val + a.prec, b.val + b.prec)
        s = a.unit + b.unit * p ** (b.val - a.val)
        s %= p ** (top - a.val)
        if s == 0:
            raise PrecisionError("total cancellation in addition")
        k = vp(s, p)
        return TruncatedElement(a.val + k, s // p ** k, self.cfg, top - a.val - k)

    def __sub__(self, other):
        return self + (-other)

    # predicates ---------------------------------------------------------
    def __eq__(self, other):
        if not isinstance(other, TruncatedElement):
            return NotImplemented
        m = self._m(other)
        return self.val == other.val and (self.unit - other.unit) % m == 0

    def __hash__(self):
        return hash((self.val, self.unit % self.cfg.p))

    @property
    def residue(self) -> int:
        return self.unit % self.cfg.p

    def is_unit(self) -> bool:
        return self.val == 0

    def to_fraction(self) -> Fraction:
        return Fraction(self.unit) * Fraction(self.cfg.p) ** self.val

    def to_json(self) -> dict:
        return {"val": self.val, "unit": self.unit}

    @classmethod
    def from_json(cls, cfg: FieldConfig, d: dict) -> "TruncatedElement":
        return cls(int(d["val"]), int(d["unit"]), cfg)

    def __repr__(self):
        return f"TE({self.val}, {self.unit} mod {self.cfg.p}^{self.prec})"


def is_nth_power(x: TruncatedElement, k: int) -> bool:
    """Tame test: k | val(x) and the residue is a k-th power in F_p."""
    cfg = x.cfg
    if k < 1 or (cfg.p - 1) % k:
        raise ValueError(f"k={k} must divide p-1={cfg.p - 1}")
    return x.val % k == 0 and dlog(cfg, x.unit) % k == 0


@lru_cache(maxsize=None)
def teichmuller(p: int, a: int, prec: int) -> int:
    """Teichmuller lift of a mod p^prec (unique (p-1)-th root of unity = a mod p)."""
    N = p ** prec
    t = a % p
    for _ in range(prec):
        t = pow(t, p, N)
    return t


def unit_group_generators(cfg: FieldConfig, m: int):
    """(t_g, u_g): Teichmuller lift of g and 1+p, as truncated units."""
    if m < 1:
        raise ValueError("level must be >= 1")
    t = teichmuller(cfg.p, cfg.g, cfg.precision)
    return (TruncatedElement(0, t, cfg), TruncatedElement(0, 1 + cfg.p, cfg))


def principal_log(p: int, w: int, m: int) -> int:
    """b mod p^(m-1) with (1+p)^b = w mod p^m, for w = 1 mod p."""
    N = p ** m
    if w % p != 1 % p:
        raise ValueError("not a principal unit")
    b = 0
    for k in range(1, m):
        mod = p ** (k + 1)
        step = p ** (k - 1)
        for d in range(p):
            if pow(1 + p, b + d * step, mod) == w % mod:
                b += d * step
                break
        else:  # pragma: no cover - (1+p) generates 1+pZ_p
            raise ArithmeticError("principal log failed")
    return b % (N // p)


def decompose_unit(cfg: FieldConfig, u: int, m: int):
    """u = t_g^a (1+p)^b mod p^m; returns (a mod p-1, b mod p^(m-1))."""
    p = cfg.p
    if u % p == 0:
        raise ValueError("not a unit")
    a = dlog(cfg, u)
    N = p ** m
    t = teichmuller(p, cfg.g, max(m, 1))
    w = u * pow(pow(t, a, N), -1, N) % N
    return a, principal_log(p, w, m)


@lru_cache(maxsize=None)
def unit_decomposition_table(p: int, g: int, m: int):
    """Arrays (a, b) indexed by residue mod p^m (non-units get -1)."""
    import numpy as np
    N = p ** m
    A = np.full(N, -1, dtype=np.int64)
    B = np.full(N, -1, dtype=np.int64)
    t = teichmuller(p, g, m)
    span = N // p
    upow = [pow(1 + p, b, N) for b in range(span)]
    for a in range(p - 1):
        ta = pow(t, a, N)
        for b in range(span):
            x = ta * upow[b] % N
            A[x] = a
            B[x] = b
    A.setflags(write=False)
    B.setflags(write=False)
    return A, B
