"""2x2 matrices with exact rational entries, plus integer lifts of SL2(Z/N)."""
from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction

import numpy as np


def _F(x):
    return x if isinstance(x, Fraction) else Fraction(x)


@dataclass(frozen=True)
class Mat2:
    a: Fraction
    b: Fraction
    c: Fraction
    d: Fraction

    def __post_init__(self):
        for k in "abcd":
            object.__setattr__(self, k, _F(getattr(self, k)))

    def __matmul__(self, o: "Mat2") -> "Mat2":
        return Mat2(self.a * o.a + self.b * o.c, self.a * o.b + self.b * o.d,
                    self.c * o.a + self.d * o.c, self.c * o.b + self.d * o.d)

    def det(self) -> Fraction:
        return self.a * self.d - self.b * self.c

    def inverse(self) -> "Mat2":
        D = self.det()
        if D == 0:
            raise ZeroDivisionError("singular matrix")
        return Mat2(self.d / D, -self.b / D, -self.c / D, self.a / D)

    def entries(self):
        return (self.a, self.b, self.c, self.d)

    def is_integral(self, p: int) -> bool:
        return all(x.denominator % p != 0 for x in self.entries())

    def mod(self, N: int):
        out = []
        for x in self.entries():
            out.append(x.numerator * pow(x.denominator, -1, N) % N)
        return tuple(out)

    def __repr__(self):
        return f"[[{self.a}, {self.b}], [{self.c}, {self.d}]]"


I2 = Mat2(1, 0, 0, 1)
W = Mat2(0, 1, -1, 0)


def dg(s, t=None) -> Mat2:
    """dg(t) = diag(t, 1/t); dg(s, t) = diag(s, t)."""
    s = _F(s)
    return Mat2(s, 0, 0, 1 / s if t is None else _F(t))


def lt(u) -> Mat2:
    return Mat2(1, 0, u, 1)


def ut(u) -> Mat2:
    return Mat2(1, u, 0, 1)


def lift_sl2(a: int, b: int, c: int, d: int, N: int):
    """An integer matrix of determinant 1 reducing to (a b; c d) mod N."""
    if (a * d - b * c - 1) % N:
        raise ValueError("not in SL2(Z/N)")
    c1 = c % N
    if c1 == 0:
        c1 = N
    d1 = d % N
    while math.gcd(c1, d1) != 1:
        d1 += N
    # a'' d1 - b'' c1 = 1
    g, x, y = _egcd(d1, c1)
    a2, b2 = x, -y
    # adjust by multiples of (c1, d1): a2 + t c1 = a, b2 + t d1 = b (mod N)
    # (a - a2, b - b2) is a multiple of (c1, d1) mod N since dets agree
    for t in _candidates(a - a2, c1, b - b2, d1, N):
        A, B = a2 + t * c1, b2 + t * d1
        if (A - a) % N == 0 and (B - b) % N == 0:
            return (A, B, c1, d1)
    raise ArithmeticError("lift failed")  # pragma: no cover


def _egcd(x, y):
    if y == 0:
        return (x, 1, 0)
    g, s, t = _egcd(y, x % y)
    return (g, t, s - (x // y) * t)


def _candidates(ra, c1, rb, d1, N):
    # solve t*c1 = ra, t*d1 = rb mod N; one of c1, d1 is invertible mod p
    for r, m in ((ra, c1), (rb, d1)):
        gg = math.gcd(m, N)
        if gg == 1:
            yield r * pow(m, -1, N) % N
            return
    # both share factors with N: brute force (small N only)
    yield from range(N)


def sl2_mod_elements(N: int, p: int) -> np.ndarray:
    """All of SL2(Z/N), N = p^l, as an (M, 4) int64 array in a fixed order."""
    out = []
    units = [x for x in range(N) if x % p]
    for a in range(N):
        if a % p:
            ai = pow(a, -1, N)
            bb, cc = np.meshgrid(np.arange(N), np.arange(N), indexing="ij")
            bb = bb.ravel()
            cc = cc.ravel()
            dd = (1 + bb * cc) * ai % N
            out.append(np.stack([np.full_like(bb, a), bb, cc, dd], axis=1))
        else:
            bs = np.array(units, dtype=np.int64)
            bb, dd = np.meshgrid(bs, np.arange(N), indexing="ij")
            bb = bb.ravel()
            dd = dd.ravel()
            inv = np.zeros(N, dtype=np.int64)
            for x in units:
                inv[x] = pow(x, -1, N)
            cc = (a * dd - 1) * inv[bb] % N
            out.append(np.stack([np.full_like(bb, a), bb, cc, dd], axis=1))
    return np.concatenate(out).astype(np.int64)


def sl2_lifts(N: int, p: int) -> np.ndarray:
    """Integer SL2(Z) lifts of every element of SL2(Z/N)."""
    el = sl2_mod_elements(N, p)
    return np.array([lift_sl2(*map(int, r), N) for r in el], dtype=np.int64)


def random_sl2_mod(N: int, p: int, size: int, rng) -> np.ndarray:
    """Uniform random elements of SL2(Z/N) by rejection on the first column."""
    out = []
    while len(out) < size:
        a, c = (int(x) for x in rng.integers(0, N, size=2))
        if a % p == 0 and c % p == 0:
            continue
        b = int(rng.integers(0, N))
        if a % p:
            d = (1 + b * c) * pow(a, -1, N) % N
        else:
            # c is a unit: solve a d - b c = 1 for b, with d free
            d = b
            b = (a * d - 1) * pow(c, -1, N) % N
        out.append((a, b, c, d))
    return np.array(out, dtype=np.int64)
