"""Exact sums of roots of unity via embeddings Z[zeta_M] -> F_r.

An integer-valued expression in M-th roots of unity (a character inner
product, a trace) is evaluated modulo two primes r = 1 mod M.  When the true
value is known to lie in [0, r) (or (-r/2, r/2) for signed results) the
residue determines it; the second prime is an independent check.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from functools import lru_cache

import numpy as np
from sympy import isprime
from sympy.ntheory import factorint


class OracleDisagreement(RuntimeError):
    """The two auxiliary primes gave different integers."""


class _Usage:
    """Process-wide tally of oracle evaluations (for reports and integrity checks)."""

    def __init__(self):
        self.reset()

    def reset(self):
        self.calls = 0
        self.agreed = 0
        self.primes = set()

    def snapshot(self) -> dict:
        return {"invocations": self.calls, "agreed": self.agreed, "aux_primes": sorted(self.primes)}


USAGE = _Usage()


@lru_cache(maxsize=None)
def find_aux_primes(M: int, lower: int, count: int = 2) -> tuple:
    out = []
    r = (lower // M + 1) * M + 1
    while len(out) < count:
        if isprime(r):
            out.append(r)
        r += M
    return tuple(out)


@lru_cache(maxsize=None)
def _root_of_order(r: int, M: int) -> int:
    fac = list(factorint(M))
    for x in range(2, r):
        z = pow(x, (r - 1) // M, r)
        if all(pow(z, M // q, r) != 1 for q in fac):
            return z
    raise ArithmeticError("no primitive root found")  # pragma: no cover


@dataclass(frozen=True)
class AuxField:
    r: int
    M: int

    @property
    def root(self) -> int:
        return _root_of_order(self.r, self.M)

    def table(self) -> np.ndarray:
        return _power_table(self.r, self.M)

    def embed(self, exps) -> np.ndarray:
        """zeta_M^e in F_r for an integer array e."""
        return self.table()[np.mod(np.asarray(exps, dtype=np.int64), self.M)]

    def inv(self, x: int) -> int:
        return pow(int(x) % self.r, -1, self.r)


@lru_cache(maxsize=None)
def _power_table(r: int, M: int) -> np.ndarray:
    z = _root_of_order(r, M)
    t = np.empty(M, dtype=np.int64)
    x = 1
    for k in range(M):
        t[k] = x
        x = x * z % r
    t.setflags(write=False)
    return t


def aux_fields(M: int, lower: int) -> tuple:
    lo = max(int(lower), 10 ** 6)
    fields = tuple(AuxField(r, M) for r in find_aux_primes(M, lo))
    USAGE.primes.update(F.r for F in fields)
    return fields


def signed(x: int, r: int) -> int:
    x %= r
    return x - r if x > r // 2 else x


def agree(values, what: str = "value") -> int:
    vals = list(values)
    USAGE.calls += 1
    if any(v != vals[0] for v in vals):
        raise OracleDisagreement(f"auxiliary primes disagree on {what}: {vals}")
    USAGE.agreed += 1
    return vals[0]


def root_sum(exps, M: int, weights=None, lower: int = 10 ** 6) -> int:
    """Exact integer value of sum_k w_k zeta_M^{e_k}, assumed to be an integer."""
    exps = np.asarray(exps, dtype=np.int64).ravel()
    w = np.ones_like(exps) if weights is None else np.asarray(weights, dtype=np.int64).ravel()
    bound = int(np.abs(w).sum()) * 2 + 1
    res = []
    for F in aux_fields(M, max(lower, bound)):
        v = int(np.mod(F.embed(exps) * np.mod(w, F.r), F.r).sum() % F.r)
        res.append(signed(v, F.r))
    return agree(res, "root sum")


def lcm(*xs: int) -> int:
    out = 1
    for x in xs:
        out = out * x // math.gcd(out, x)
    return out
