"""Finite quotients SL2(Z/p^l), GL2(Z/p^l), Borel double cosets, and an exact
character-theoretic oracle for Hom dimensions between induced representations.

The cover over K is split (via the section s), so a genuine character of the
cover restricted to the Borel is (b, z) -> eps(z) chi(b) with chi linear on b.
Induced characters are stored per group element as residues modulo two
auxiliary primes r = 1 mod M.
"""
from __future__ import annotations

from dataclasses import dataclass
from functools import cached_property

import numpy as np

from .cyclo import OracleDisagreement, agree, aux_fields
from .localfield import smallest_primitive_root, teichmuller

DEFAULT_BUDGET = 5 * 10 ** 6


class BudgetExceeded(RuntimeError):
    pass


def sl2_order(p: int, l: int) -> int:
    return p ** (3 * (l - 1)) * p * (p * p - 1)


def gl2_order(p: int, l: int) -> int:
    return p ** (4 * (l - 1)) * (p * p - 1) * (p * p - p)


def unit_generator(p: int, l: int) -> int:
    """A generator of (Z/p^l)^x."""
    g = smallest_primitive_root(p)
    if l >= 2 and pow(g, p - 1, p * p) == 1:
        g += p
    return g


def _inv_table(N: int, p: int) -> np.ndarray:
    inv = np.zeros(N, dtype=np.int64)
    for x in range(N):
        if x % p:
            inv[x] = pow(x, -1, N)
    return inv


def _sl_elements(N: int, p: int) -> np.ndarray:
    inv = _inv_table(N, p)
    blocks = []
    ar = np.arange(N, dtype=np.int64)
    units = ar[ar % p != 0]
    for a in range(N):
        if a % p:
            bb = np.repeat(ar, N)
            cc = np.tile(ar, N)
            dd = (1 + bb * cc) % N * inv[a] % N
        else:
            bb = np.repeat(units, N)
            dd = np.tile(ar, len(units))
            cc = (a * dd - 1) % N * inv[bb] % N
        blk = np.empty((len(bb), 4), dtype=np.int32)
        blk[:, 0] = a
        blk[:, 1] = bb
        blk[:, 2] = cc
        blk[:, 3] = dd
        blocks.append(blk)
    return np.concatenate(blocks)


class FiniteQuotient:
    """SL2(Z/p^l) or GL2(Z/p^l) with its elements enumerated in a fixed order."""

    def __init__(self, kind: str, p: int, l: int, budget: int = DEFAULT_BUDGET):
        if kind not in ("SL", "GL"):
            raise ValueError(kind)
        if l < 1:
            raise ValueError("level must be >= 1")
        self.kind, self.p, self.l = kind, p, l
        self.N = N = p ** l
        self.order = sl2_order(p, l) if kind == "SL" else gl2_order(p, l)
        if self.order > budget:
            raise BudgetExceeded(f"|{kind}2(Z/{p}^{l})| = {self.order} exceeds budget {budget}")
        self.inv_mod = _inv_table(N, p)
        sl = _sl_elements(N, p)
        self.sl_order = len(sl)
        assert self.sl_order == sl2_order(p, l)
        # dense lookup on (a,b,c) for a unit, (a,b,d) otherwise
        key = self._sl_key(sl[:, 0].astype(np.int64), sl[:, 1].astype(np.int64),
                           sl[:, 2].astype(np.int64), sl[:, 3].astype(np.int64))
        self._sl_table = np.full(2 * N ** 3, -1, dtype=np.int32)
        self._sl_table[key] = np.arange(len(sl), dtype=np.int32)
        if kind == "SL":
            self.elements = sl
        else:
            units = np.array([x for x in range(N) if x % p], dtype=np.int64)
            self.units = units
            self._unit_pos = np.full(N, -1, dtype=np.int64)
            self._unit_pos[units] = np.arange(len(units))
            # g = dg(delta, 1) h, h in SL
            el = np.empty((len(units) * len(sl), 4), dtype=np.int32)
            for k, dlt in enumerate(units):
                blk = el[k * len(sl):(k + 1) * len(sl)]
                blk[:, 0] = sl[:, 0].astype(np.int64) * dlt % N
                blk[:, 1] = sl[:, 1].astype(np.int64) * dlt % N
                blk[:, 2] = sl[:, 2]
                blk[:, 3] = sl[:, 3]
            self.elements = el
        assert len(self.elements) == self.order

    def _sl_key(self, a, b, c, d):
        N, p = self.N, self.p
        unit = a % p != 0
        return np.where(unit, (a * N + b) * N + c, N ** 3 + (a * N + b) * N + d)

    def index(self, a, b, c, d) -> np.ndarray:
        N = self.N
        a, b, c, d = (np.mod(np.asarray(x, dtype=np.int64), N) for x in (a, b, c, d))
        if self.kind == "SL":
            return self._sl_table[self._sl_key(a, b, c, d)].astype(np.int64)
        det = (a * d - b * c) % N
        di = self.inv_mod[det]
        h = self._sl_table[self._sl_key(a * di % N, b * di % N, c, d)].astype(np.int64)
        return self._unit_pos[det] * self.sl_order + h

    def index_of(self, M) -> np.ndarray:
        M = np.asarray(M, dtype=np.int64)
        return self.index(M[..., 0], M[..., 1], M[..., 2], M[..., 3])

    @cached_property
    def inverse_index(self) -> np.ndarray:
        E = self.elements.astype(np.int64)
        a, b, c, d = E[:, 0], E[:, 1], E[:, 2], E[:, 3]
        N = self.N
        di = self.inv_mod[(a * d - b * c) % N]
        return self.index(d * di, -b * di, -c * di, a * di).astype(np.int32)

    def mul_index(self, i, j) -> np.ndarray:
        A = self.elements[i].astype(np.int64)
        B = self.elements[j].astype(np.int64)
        return self.index_of(_mm(A, B) % self.N)

    # -- standard subgroups and coset data -------------------------------------
    def borel(self) -> np.ndarray:
        """Upper triangular elements as (K, 4) int64."""
        N, p = self.N, self.p
        units = np.array([x for x in range(N) if x % p], dtype=np.int64)
        s = np.arange(N, dtype=np.int64)
        if self.kind == "SL":
            t = np.repeat(units, N)
            ss = np.tile(s, len(units))
            return np.stack([t, ss, np.zeros_like(t), self.inv_mod[t]], axis=1)
        t1 = np.repeat(units, len(units) * N)
        t2 = np.tile(np.repeat(units, N), len(units))
        ss = np.tile(s, len(units) ** 2)
        return np.stack([t1, ss, np.zeros_like(t1), t2], axis=1)

    def borel_generators(self) -> list:
        g = unit_generator(self.p, self.l)
        gi = pow(g, -1, self.N)
        if self.kind == "SL":
            return [(g, 0, 0, gi), (1, 1, 0, 1)]
        return [(g, 0, 0, 1), (1, 0, 0, g), (1, 1, 0, 1)]

    def lines(self) -> list:
        """P^1(Z/p^l): (1, c) for all c, then (a, 1) for p | a."""
        N, p = self.N, self.p
        return [(1, c) for c in range(N)] + [(a, 1) for a in range(0, N, p)]

    def line_reps(self) -> np.ndarray:
        """x_v with x_v e1 on the line v: [[1,0],[c,1]] and [[a,-1],[1,0]]."""
        N = self.N
        out = []
        for x, y in self.lines():
            if x == 1:
                out.append((1, 0, y, 1))
            else:
                out.append((x, N - 1, 1, 0))
        return np.array(out, dtype=np.int64)

    def line_index(self, x, y) -> np.ndarray:
        """Normalize primitive vectors (x, y) and return the line position."""
        N, p = self.N, self.p
        x = np.mod(x, N)
        y = np.mod(y, N)
        xu = x % p != 0
        c = y * self.inv_mod[np.where(xu, x, 1)] % N
        a = x * self.inv_mod[np.where(xu, 1, y)] % N
        return np.where(xu, c, N + a // p)


def _mm(A, B):
    a, b, c, d = A[..., 0], A[..., 1], A[..., 2], A[..., 3]
    e, f, g, h = B[..., 0], B[..., 1], B[..., 2], B[..., 3]
    return np.stack([a * e + b * g, a * f + b * h, c * e + d * g, c * f + d * h], axis=-1)


def _inv_mat(cfg_N, inv_mod, X):
    a, b, c, d = X[..., 0], X[..., 1], X[..., 2], X[..., 3]
    di = inv_mod[(a * d - b * c) % cfg_N]
    return np.stack([d * di, -b * di, -c * di, a * di], axis=-1) % cfg_N


# -- Borel characters ------------------------------------------------------------------

@dataclass(frozen=True)
class BorelCharacter:
    """b -> zeta_M^(e1[b11] + e2[b22]) on the upper triangular subgroup mod p^l.

    For SL only e1 is used.  Tables are indexed by residues mod p^l.
    """
    M: int
    e1: tuple
    e2: tuple | None = None

    def exps(self, B: np.ndarray) -> np.ndarray:
        e1 = np.asarray(self.e1, dtype=np.int64)
        out = e1[B[..., 0]]
        if self.e2 is not None:
            out = out + np.asarray(self.e2, dtype=np.int64)[B[..., 3]]
        return np.mod(out, self.M)

    def conj(self) -> "BorelCharacter":
        f = lambda t: None if t is None else tuple((-x) % self.M for x in t)
        return BorelCharacter(self.M, f(self.e1), f(self.e2))

    def check_multiplicative(self, Q: FiniteQuotient, samples: int = 2000, seed: int = 0) -> bool:
        rng = np.random.default_rng(seed)
        B = Q.borel()
        i = rng.integers(0, len(B), samples)
        j = rng.integers(0, len(B), samples)
        P = _mm(B[i], B[j]) % Q.N
        return bool(np.all(np.mod(self.exps(B[i]) + self.exps(B[j]) - self.exps(P), self.M) == 0))


# -- class functions ------------------------------------------------------------------

@dataclass
class ClassFunction:
    """Values on every element of the quotient, modulo each auxiliary prime."""
    Q: FiniteQuotient
    M: int
    fields: tuple
    values: list
    degree: int
    label: str = ""

    def __sub__(self, other: "ClassFunction") -> "ClassFunction":
        _same(self, other)
        vals = [np.mod(a - b, F.r) for a, b, F in zip(self.values, other.values, self.fields)]
        return ClassFunction(self.Q, self.M, self.fields, vals, self.degree - other.degree,
                             f"{self.label}-{other.label}")

    def __add__(self, other: "ClassFunction") -> "ClassFunction":
        _same(self, other)
        vals = [np.mod(a + b, F.r) for a, b, F in zip(self.values, other.values, self.fields)]
        return ClassFunction(self.Q, self.M, self.fields, vals, self.degree + other.degree,
                             f"{self.label}+{other.label}")

    def at_identity(self) -> int:
        i = int(self.Q.index(1, 0, 0, 1))
        return agree([int(v[i]) for v in self.values], "degree")


def _same(V, W):
    if V.Q is not W.Q:
        raise ValueError("class functions live on different quotients")
    if V.fields != W.fields:
        raise ValueError("class functions use different auxiliary primes")


def oracle_fields(Q: FiniteQuotient, M: int, n: int) -> tuple:
    return aux_fields(M, Q.order * n * n)


def induced_character(Q: FiniteQuotient, chi: BorelCharacter, fields=None, n: int = 1,
                      label: str = "") -> ClassFunction:
    """Frobenius formula Ind_B^G chi(g) = sum over lines v with x_v^-1 g x_v in B.

    Evaluated by running over the support: for each line v, every element of
    x_v B x_v^-1 receives chi(b).  Total work is |G|.
    """
    fields = fields or oracle_fields(Q, chi.M, n)
    for F in fields:
        if (F.r - 1) % chi.M:
            raise ValueError("auxiliary prime incompatible with the character values")
    B = Q.borel()
    e = chi.exps(B)
    X = Q.line_reps()
    vals = [np.zeros(Q.order, dtype=np.int64) for _ in fields]
    for x in X:
        xi = _inv_mat(Q.N, Q.inv_mod, x)
        G = _mm(_mm(np.broadcast_to(x, B.shape), B) % Q.N, np.broadcast_to(xi, B.shape)) % Q.N
        idx = Q.index_of(G)
        for v, F in zip(vals, fields):
            v[idx] = (v[idx] + F.embed(e)) % F.r
    cf = ClassFunction(Q, chi.M, tuple(fields), vals, len(X), label)
    deg = cf.at_identity()
    if deg != len(X):
        raise ArithmeticError("induced degree differs from the index")  # pragma: no cover
    return cf


def trivial_character(Q: FiniteQuotient, M: int = 1, fields=None, n: int = 1) -> ClassFunction:
    fields = fields or oracle_fields(Q, M, n)
    return ClassFunction(Q, M, tuple(fields), [np.ones(Q.order, dtype=np.int64) for _ in fields], 1, "1")


def regular_character(Q: FiniteQuotient, fields=None) -> ClassFunction:
    fields = fields or oracle_fields(Q, 1, 1)
    i = int(Q.index(1, 0, 0, 1))
    vals = []
    for F in fields:
        v = np.zeros(Q.order, dtype=np.int64)
        v[i] = Q.order % F.r
        vals.append(v)
    return ClassFunction(Q, 1, tuple(fields), vals, Q.order, "reg")


def hom_dim_oracle(V: ClassFunction, W: ClassFunction) -> int:
    """<V, W> on the split cover Q x mu_n, exactly.

    Both are genuine for the same eps, so the mu_n average of eps(z) conj(eps(z))
    is 1 and the sum reduces to |Q|^-1 sum_g V(g) W(g^-1).
    """
    _same(V, W)
    Q = V.Q
    inv = Q.inverse_index
    out = []
    for a, b, F in zip(V.values, W.values, V.fields):
        s = 0
        step = 1 << 20
        for lo in range(0, Q.order, step):
            blk = a[lo:lo + step] * b[inv[lo:lo + step]] % F.r
            s = (s + int(blk.sum() % F.r)) % F.r
        out.append(s * pow(Q.order % F.r, -1, F.r) % F.r)
    val = agree(out, "inner product")
    if 2 * val > V.fields[0].r:
        raise OracleDisagreement("inner product is not a small nonnegative integer")
    return val


def inflate(V: ClassFunction, Q_big: FiniteQuotient, fields=None) -> ClassFunction:
    """Pull a class function on level l back to level l' >= l."""
    Q = V.Q
    if Q_big.kind != Q.kind or Q_big.p != Q.p or Q_big.l < Q.l:
        raise ValueError("incompatible quotients")
    if fields is not None and tuple(fields) != V.fields:
        raise ValueError("inflation keeps the auxiliary primes")
    E = Q_big.elements.astype(np.int64) % Q.N
    idx = Q.index_of(E)
    vals = [v[idx] for v in V.values]
    return ClassFunction(Q_big, V.M, V.fields, vals, V.degree, V.label + "^")


def fixed_part(V: ClassFunction, level: int) -> ClassFunction:
    """Character of the vectors fixed by the kernel of reduction to `level`.

    chi_{V^H}(g) = |H|^-1 sum_{h in H} chi_V(g h).
    """
    Q = V.Q
    E = Q.elements.astype(np.int64)
    Nl = Q.p ** level
    ker = np.flatnonzero(np.all((E - np.array([1, 0, 0, 1])) % Nl == 0, axis=1))
    out = [np.zeros(Q.order, dtype=np.int64) for _ in V.fields]
    for h in ker:
        gh = Q.mul_index(np.arange(Q.order), np.full(Q.order, h))
        for o, v, F in zip(out, V.values, V.fields):
            o += v[gh]
            o %= F.r
    for o, F in zip(out, V.fields):
        o *= pow(len(ker), -1, F.r)
        o %= F.r
    cf = ClassFunction(Q, V.M, V.fields, out, 0, V.label + "^H")
    cf.degree = cf.at_identity()
    return cf


def norm_of_difference(V: ClassFunction, W: ClassFunction) -> int:
    """<V-W, V-W>; zero iff the two characters coincide."""
    return hom_dim_oracle(V - W, V - W)


def equal_characters(V: ClassFunction, W: ClassFunction) -> bool:
    return norm_of_difference(V, W) == 0


# -- conjugacy classes (small quotients only) ---------------------------------------

def conjugacy_classes(Q: FiniteQuotient, max_order: int = 200000) -> np.ndarray:
    """Class label per element, by orbit refinement under generator conjugation."""
    if Q.order > max_order:
        raise BudgetExceeded("conjugacy classes only for small quotients")
    gens = [(1, 1, 0, 1), (1, 0, 1, 1)]
    if Q.kind == "GL":
        gens.append((unit_generator(Q.p, Q.l), 0, 0, 1))
    E = Q.elements.astype(np.int64)
    maps = []
    for g in gens:
        G = np.array(g, dtype=np.int64)
        Gi = _inv_mat(Q.N, Q.inv_mod, G)
        C = _mm(_mm(np.broadcast_to(G, E.shape), E) % Q.N, np.broadcast_to(Gi, E.shape)) % Q.N
        maps.append(Q.index_of(C))
    label = np.arange(Q.order)
    while True:
        old = label.copy()
        for mp in maps:
            label = np.minimum(label, label[mp])
            label[mp] = np.minimum(label[mp], label)
        label = label[label]
        if np.array_equal(old, label):
            break
    return label


def class_count(Q: FiniteQuotient) -> int:
    return len(np.unique(conjugacy_classes(Q)))


def is_class_function(V: ClassFunction, labels: np.ndarray) -> bool:
    for v in V.values:
        order = np.argsort(labels, kind="stable")
        ls = labels[order]
        vs = v[order]
        starts = np.r_[0, np.flatnonzero(np.diff(ls)) + 1]
        first = np.repeat(vs[starts], np.diff(np.r_[starts, len(vs)]))
        if not np.array_equal(first, vs):
            return False
    return True


# -- double cosets ----------------------------------------------------------------------

def _closure(Q: FiniteQuotient, start: int, left: list, right: list) -> np.ndarray:
    """Closure of {start} under left and right multiplication by the generators."""
    seen = np.zeros(Q.order, dtype=bool)
    seen[start] = True
    frontier = np.array([start], dtype=np.int64)
    E = Q.elements
    while frontier.size:
        F = E[frontier].astype(np.int64)
        nxt = []
        for g in left:
            G = np.broadcast_to(np.array(g, dtype=np.int64), F.shape)
            nxt.append(Q.index_of(_mm(G, F) % Q.N))
        for g in right:
            G = np.broadcast_to(np.array(g, dtype=np.int64), F.shape)
            nxt.append(Q.index_of(_mm(F, G) % Q.N))
        cand = np.unique(np.concatenate(nxt))
        cand = cand[~seen[cand]]
        seen[cand] = True
        frontier = cand
    return np.flatnonzero(seen)


def standard_coset_reps(Q: FiniteQuotient, eps: int | None = None) -> list:
    """I, w, lt(x p^r) (x in {1, eps} for SL, x = 1 for GL), 1 <= r < l."""
    N, p = Q.N, Q.p
    if eps is None:
        eps = teichmuller(p, smallest_primitive_root(p), Q.l)
    reps = [("I", (1, 0, 0, 1)), ("w", (0, 1, N - 1, 0))]
    for r in range(1, Q.l):
        reps.append((f"lt(p^{r})", (1, 0, p ** r % N, 1)))
        if Q.kind == "SL":
            reps.append((f"lt(eps p^{r})", (1, 0, eps * p ** r % N, 1)))
    return reps


def double_cosets(Q: FiniteQuotient, reps=None) -> dict:
    """Partition Q into Borel double cosets and match them with listed reps."""
    gens = Q.borel_generators()
    reps = reps if reps is not None else standard_coset_reps(Q)
    label = np.full(Q.order, -1, dtype=np.int64)
    found = []
    for name, x in reps:
        i = int(Q.index(*x))
        if label[i] >= 0:
            found.append({"rep": name, "size": 0, "duplicate_of": found[label[i]]["rep"]})
            continue
        cls = _closure(Q, i, gens, gens)
        overlap = bool(np.any(label[cls] >= 0))
        label[cls] = len(found)
        found.append({"rep": name, "size": int(cls.size), "overlap": overlap})
    covered = int(np.count_nonzero(label >= 0))
    # any classes missed by the listed reps
    extra = 0
    while np.any(label < 0):
        i = int(np.flatnonzero(label < 0)[0])
        cls = _closure(Q, i, gens, gens)
        label[cls] = len(found) + extra
        extra += 1
    ok = (covered == Q.order and extra == 0
          and all(f.get("size", 0) > 0 and not f.get("overlap") for f in found))
    return {"kind": Q.kind, "p": Q.p, "l": Q.l, "order": Q.order, "cosets": found,
            "count": len(found), "missed_classes": extra, "covers": covered == Q.order,
            "disjoint": all(not f.get("overlap") and f.get("size", 0) > 0 for f in found),
            "ok": ok}


def direct_double_coset(Q: FiniteQuotient, x) -> np.ndarray:
    """B x B by explicit products (used to cross-check the closure on small cases)."""
    B = Q.borel()
    X = np.array(x, dtype=np.int64)
    xB = _mm(np.broadcast_to(X, B.shape), B) % Q.N
    ids = set()
    for b in B:
        P = _mm(np.broadcast_to(b, xB.shape), xB) % Q.N
        ids.update(Q.index_of(P).tolist())
    return np.array(sorted(ids), dtype=np.int64)


# -- monomial model of Ind_B^G chi on lines ----------------------------------------

def _line_geometry(kind: str, p: int, l: int):
    N = p ** l
    inv = _inv_table(N, p)
    lines = [(1, c) for c in range(N)] + [(a, 1) for a in range(0, N, p)]
    X = np.array([(1, 0, y, 1) if x == 1 else (x, N - 1, 1, 0) for x, y in lines], dtype=np.int64)
    return N, inv, X


def _line_pos(N, p, inv, x, y):
    xu = x % p != 0
    c = y * inv[np.where(xu, x, 1)] % N
    a = x * inv[np.where(xu, 1, y)] % N
    return np.where(xu, c, N + a // p)


def monomial_generators(kind: str, p: int, l: int) -> list:
    gens = [(1, 1, 0, 1), (1, 0, 1, 1)]
    if kind == "GL":
        gens.append((unit_generator(p, l), 0, 0, 1))
    return gens


def monomial_action(kind: str, p: int, l: int, chi: BorelCharacter, g) -> tuple:
    """g e_v = zeta_M^e(v) e_{g v}: returns (targets, exponents)."""
    N, inv, X = _line_geometry(kind, p, l)
    G = np.broadcast_to(np.array(g, dtype=np.int64), X.shape)
    Y = _mm(G, X) % N
    tgt = _line_pos(N, p, inv, Y[:, 0], Y[:, 2])
    b = _mm(_inv_mat(N, inv, X[tgt]), Y) % N
    if np.any(b[:, 2] != 0):
        raise ArithmeticError("line representative bookkeeping failed")  # pragma: no cover
    return tgt, chi.exps(b)


@dataclass
class MonomialDecomposition:
    dimension: int
    end_dim: int
    constituent_dims: list
    multiplicity_free: bool


def monomial_decomposition(kind: str, p: int, l: int, chi: BorelCharacter, seed: int = 0) -> MonomialDecomposition:
    """Commutant of the monomial representation and its isotypic dimensions.

    A commutant element is constant up to the phase rule
    T[gv, gu] = lambda(g, v) lambda(g, u)^-1 T[v, u] on generator orbits of line
    pairs; orbits with contradictory phases carry nothing.  Eigenvalue multiplicities
    of a random Hermitian commutant element give the constituent dimensions.
    """
    acts = [monomial_action(kind, p, l, chi, g) for g in monomial_generators(kind, p, l)]
    D = len(acts[0][0])
    M = chi.M
    orbit = np.full((D, D), -1, dtype=np.int64)
    phase = np.zeros((D, D), dtype=np.int64)
    good = []
    for v0 in range(D):
        for u0 in range(D):
            if orbit[v0, u0] >= 0:
                continue
            k = len(good)
            orbit[v0, u0] = k
            ok = True
            fv = np.array([v0])
            fu = np.array([u0])
            while fv.size:
                nv, nu = [], []
                for tgt, e in acts:
                    gv, gu = tgt[fv], tgt[fu]
                    ph = (phase[fv, fu] + e[fv] - e[fu]) % M
                    seen = orbit[gv, gu] >= 0
                    if np.any(phase[gv[seen], gu[seen]] != ph[seen]):
                        ok = False
                    new = ~seen
                    key = gv[new] * D + gu[new]
                    uk, first, back = np.unique(key, return_index=True, return_inverse=True)
                    phn = ph[new]
                    if np.any(phn != phn[first][back]):
                        ok = False
                    a, b = uk // D, uk % D
                    orbit[a, b] = k
                    phase[a, b] = phn[first]
                    nv.append(a)
                    nu.append(b)
                fv = np.concatenate(nv)
                fu = np.concatenate(nu)
            good.append(ok)
    good = np.array(good)
    end_dim = int(good.sum())
    # random Hermitian element of the commutant
    rng = np.random.default_rng(seed)
    coef = rng.standard_normal(len(good)) + 1j * rng.standard_normal(len(good))
    coef[~good] = 0
    T = coef[orbit] * np.exp(2j * np.pi * phase / M)
    H = T + T.conj().T
    w = np.linalg.eigvalsh(H)
    scale = max(1.0, float(np.abs(w).max()))
    cuts = np.flatnonzero(np.diff(w) > 1e-7 * scale)
    sizes = np.diff(np.r_[0, cuts + 1, len(w)])
    dims = sorted(int(s) for s in sizes)
    return MonomialDecomposition(D, end_dim, dims, len(dims) == end_dim)
