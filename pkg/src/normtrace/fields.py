"""Finite fields F_{p^n}, the tower F_q < F_{q^r}, and a normal basis.

Elements are encoded as ints: the coefficient vector (c_0, ..., c_{n-1}) of
c_0 + c_1 t + ... + c_{n-1} t^{n-1} modulo the field modulus is stored as
c_0 + c_1 p + ... + c_{n-1} p^{n-1}. Every routine below takes and returns
those codes; :class:`FieldElement` is an operator-friendly wrapper.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from functools import lru_cache
from itertools import product
from typing import Iterable, Sequence

import numpy as np

DEFAULT_CAP = 1 << 24
# Full Q x Q addition/multiplication tables below this order.
TABLE_LIMIT = 1 << 11


class FieldError(ValueError):
    pass


def is_prime(n: int) -> bool:
    if n < 2:
        return False
    i = 2
    while i * i <= n:
        if n % i == 0:
            return False
        i += 1
    return True


def prime_factors(n: int) -> list[int]:
    out = []
    d = 2
    while d * d <= n:
        if n % d == 0:
            out.append(d)
            while n % d == 0:
                n //= d
        d += 1
    if n > 1:
        out.append(n)
    return out


def prime_power(q: int) -> tuple[int, int]:
    """Split q = p^m, raising FieldError if q is not a prime power."""
    if q < 2:
        raise FieldError(f"{q} is not a prime power")
    p = prime_factors(q)[0]
    m, rest = 0, q
    while rest % p == 0:
        rest //= p
        m += 1
    if rest != 1:
        raise FieldError(f"{q} is not a prime power")
    return p, m


# -- dense polynomials over F_p, little-endian coefficient lists -----------

def _trim(a: list[int]) -> list[int]:
    while a and a[-1] == 0:
        a.pop()
    return a


def _poly_mod(a: Sequence[int], b: Sequence[int], p: int) -> list[int]:
    a = _trim(list(a))
    b = _trim(list(b))
    inv_lead = pow(b[-1], p - 2, p)
    db = len(b) - 1
    while len(a) - 1 >= db and a:
        coef = a[-1] * inv_lead % p
        shift = len(a) - 1 - db
        for i, bi in enumerate(b):
            a[shift + i] = (a[shift + i] - coef * bi) % p
        _trim(a)
    return a


def _monic_polys(p: int, deg: int) -> Iterable[list[int]]:
    # ascending integer code of the low coefficients (c_0 least significant)
    for code in range(p**deg):
        c = []
        for _ in range(deg):
            c.append(code % p)
            code //= p
        yield c + [1]


def is_irreducible(poly: Sequence[int], p: int) -> bool:
    """Trial division by every monic polynomial of degree <= deg/2."""
    poly = _trim(list(poly))
    n = len(poly) - 1
    if n < 1:
        return False
    if n == 1:
        return True
    for d in range(1, n // 2 + 1):
        for g in _monic_polys(p, d):
            if not _poly_mod(poly, g, p):
                return False
    return True


@lru_cache(maxsize=None)
def lowest_irreducible(p: int, n: int) -> tuple[int, ...]:
    """Smallest monic irreducible of degree n, ordered by the integer code
    c_0 + c_1 p + ... + c_{n-1} p^{n-1} of its non-leading coefficients."""
    for cand in _monic_polys(p, n):
        if is_irreducible(cand, p):
            return tuple(cand)
    raise FieldError(f"no irreducible polynomial of degree {n} over F_{p}")


class GF:
    """The field F_{p^n} = F_p[t]/(modulus) with log/antilog tables."""

    def __init__(self, p: int, n: int, modulus: Sequence[int] | None = None,
                 cap: int = DEFAULT_CAP):
        if not is_prime(p):
            raise FieldError(f"p={p} is not prime")
        if n < 1:
            raise FieldError("extension degree must be positive")
        if p**n > cap:
            raise FieldError(f"field order {p}^{n} exceeds cap {cap}")
        self.p = p
        self.n = n
        self.order = p**n
        self.modulus = tuple(modulus) if modulus is not None else lowest_irreducible(p, n)
        if len(self.modulus) != n + 1 or self.modulus[-1] != 1:
            raise FieldError("modulus must be monic of degree n")
        if not is_irreducible(self.modulus, p):
            raise FieldError(f"modulus {self.modulus} is reducible over F_{p}")

        Q = self.order
        self.digits = np.array([self.coeffs(x) for x in range(Q)], dtype=np.int64).reshape(Q, n)
        self.place = p ** np.arange(n, dtype=np.int64)
        self.generator = self._find_generator()
        exp = np.empty(2 * (Q - 1), dtype=np.int64)
        x = 1
        for i in range(Q - 1):
            exp[i] = x
            x = self._slow_mul(x, self.generator)
        exp[Q - 1:] = exp[:Q - 1]
        log = np.zeros(Q, dtype=np.int64)
        log[exp[:Q - 1]] = np.arange(Q - 1)
        self.exp = exp
        self.log = log
        self._exp = exp.tolist()
        self._log = log.tolist()
        neg = self.digits.copy()
        neg = (-neg) % p
        self.neg_table = neg @ self.place

        if Q <= TABLE_LIMIT:
            el = np.arange(Q)
            self.add_table = self._digit_add(el[:, None], el[None, :])
            self.mul_table = self._log_mul(el[:, None], el[None, :])
            self.add_flat = self.add_table.ravel()
            self.mul_flat = self.mul_table.ravel()
            self._add = self.add_flat.tolist()
            self._mul = self.mul_flat.tolist()
        else:
            self.add_table = None
            self.mul_table = None
        self._neg = self.neg_table.tolist()

    def __repr__(self):
        return f"GF({self.p}^{self.n}, modulus={self.modulus})"

    def __eq__(self, other):
        return isinstance(other, GF) and (self.p, self.n, self.modulus) == (other.p, other.n, other.modulus)

    def __hash__(self):
        return hash((self.p, self.n, self.modulus))

    def __reduce__(self):
        return (GF, (self.p, self.n, self.modulus))

    # -- encoding ----------------------------------------------------------

    def coeffs(self, x: int) -> tuple[int, ...]:
        out = []
        for _ in range(self.n):
            out.append(x % self.p)
            x //= self.p
        return tuple(out)

    def from_coeffs(self, c: Sequence[int]) -> int:
        if len(c) > self.n:
            raise FieldError("too many coefficients")
        return sum((ci % self.p) * self.p**i for i, ci in enumerate(c))

    def elements(self) -> range:
        return range(self.order)

    def __call__(self, x: int) -> FieldElement:
        return FieldElement(self, int(x))

    # -- construction helpers ------------------------------------------------

    def _slow_mul(self, a: int, b: int) -> int:
        pa, pb = self.coeffs(a), self.coeffs(b)
        prod = [0] * (2 * self.n - 1)
        for i, ai in enumerate(pa):
            if ai:
                for j, bj in enumerate(pb):
                    prod[i + j] = (prod[i + j] + ai * bj) % self.p
        return self.from_coeffs(_poly_mod(prod, self.modulus, self.p) or [0])

    def _slow_pow(self, a: int, e: int) -> int:
        result = 1
        while e:
            if e & 1:
                result = self._slow_mul(result, a)
            a = self._slow_mul(a, a)
            e >>= 1
        return result

    def _find_generator(self) -> int:
        Q = self.order
        if Q == 2:
            return 1
        factors = prime_factors(Q - 1)
        for g in range(2, Q):
            if all(self._slow_pow(g, (Q - 1) // f) != 1 for f in factors):
                return g
        raise FieldError("no multiplicative generator found")  # pragma: no cover

    def _digit_add(self, a, b):
        return ((self.digits[a] + self.digits[b]) % self.p) @ self.place

    def _log_mul(self, a, b):
        a = np.asarray(a)
        b = np.asarray(b)
        out = self.exp[self.log[a] + self.log[b]]
        return np.where((a == 0) | (b == 0), 0, out)

    # -- scalar arithmetic ------------------------------------------------------

    def add(self, a: int, b: int) -> int:
        if self.p == 2:
            return a ^ b
        if self.add_table is not None:
            return self._add[a * self.order + b]
        return int(self._digit_add(a, b))

    def neg(self, a: int) -> int:
        return self._neg[a]

    def sub(self, a: int, b: int) -> int:
        return self.add(a, self._neg[b])

    def mul(self, a: int, b: int) -> int:
        if a == 0 or b == 0:
            return 0
        return self._exp[self._log[a] + self._log[b]]

    def inv(self, a: int) -> int:
        if a == 0:
            raise ZeroDivisionError("inverse of zero")
        return self._exp[(self.order - 1 - self._log[a]) % (self.order - 1)]

    def div(self, a: int, b: int) -> int:
        return self.mul(a, self.inv(b))

    def pow(self, a: int, e: int) -> int:
        if e == 0:
            return 1
        if a == 0:
            return 0
        return self._exp[(self._log[a] * e) % (self.order - 1)]

    def is_square(self, a: int) -> bool:
        if a == 0 or self.p == 2:
            return True
        return self._log[a] % 2 == 0

    def sqrt(self, a: int) -> int | None:
        """Some square root of a, or None when a is a non-square (p odd)."""
        if a == 0:
            return 0
        if self.p == 2:
            return self._exp[(self._log[a] * (self.order // 2)) % (self.order - 1)]
        la = self._log[a]
        if la % 2:
            return None
        return self._exp[la // 2]

    def sum(self, items: Iterable[int]) -> int:
        acc = 0
        for x in items:
            acc = self.add(acc, x)
        return acc

    # -- vectorized arithmetic on integer arrays ---------------------------------

    def vadd(self, a, b):
        a = np.asarray(a)
        b = np.asarray(b)
        if self.p == 2:
            return a ^ b
        if self.add_table is not None:
            return np.take(self.add_flat, a * self.order + b)
        return self._digit_add(a, b)

    def vneg(self, a):
        return np.take(self.neg_table, a)

    def vsub(self, a, b):
        return self.vadd(a, self.vneg(b))

    def vmul(self, a, b):
        if self.mul_table is not None:
            return np.take(self.mul_flat, np.asarray(a) * self.order + np.asarray(b))
        return self._log_mul(a, b)

    def vinv(self, a):
        a = np.asarray(a)
        if np.any(a == 0):
            raise ZeroDivisionError("inverse of zero")
        return self.exp[(self.order - 1 - self.log[a]) % (self.order - 1)]

    def vpow(self, a, e: int):
        a = np.asarray(a)
        if e == 0:
            return np.ones_like(a)
        out = self.exp[(self.log[a] * e) % (self.order - 1)]
        return np.where(a == 0, 0, out)

    def vsum(self, arr, axis: int = 0):
        arr = np.moveaxis(np.asarray(arr), axis, 0)
        acc = np.zeros(arr.shape[1:], dtype=np.int64)
        for row in arr:
            acc = self.vadd(acc, row)
        return acc


@dataclass(frozen=True)
class FieldElement:
    """An element of a :class:`GF`, with the usual operators."""

    field: GF = field(repr=False, compare=True)
    value: int

    def _coerce(self, other):
        if isinstance(other, FieldElement):
            if other.field != self.field:
                raise FieldError("elements of different fields")
            return other.value
        return int(other) % self.field.p if self.field.n == 1 else self.field.from_coeffs([int(other)])

    @property
    def coeffs(self) -> tuple[int, ...]:
        return self.field.coeffs(self.value)

    def __add__(self, other):
        return FieldElement(self.field, self.field.add(self.value, self._coerce(other)))

    __radd__ = __add__

    def __sub__(self, other):
        return FieldElement(self.field, self.field.sub(self.value, self._coerce(other)))

    def __rsub__(self, other):
        return FieldElement(self.field, self.field.sub(self._coerce(other), self.value))

    def __neg__(self):
        return FieldElement(self.field, self.field.neg(self.value))

    def __mul__(self, other):
        return FieldElement(self.field, self.field.mul(self.value, self._coerce(other)))

    __rmul__ = __mul__

    def __truediv__(self, other):
        return FieldElement(self.field, self.field.div(self.value, self._coerce(other)))

    def __pow__(self, e: int):
        if e < 0:
            return FieldElement(self.field, self.field.inv(self.value)) ** (-e)
        return FieldElement(self.field, self.field.pow(self.value, e))

    def __bool__(self):
        return self.value != 0

    def __int__(self):
        return self.value


# -- linear algebra ---------------------------------------------------------------

def rank(F: GF, matrix) -> int:
    """Rank of an integer-coded matrix over F by Gaussian elimination."""
    A = np.array(matrix, dtype=np.int64, copy=True)
    if A.ndim != 2 or A.size == 0:
        return 0
    rows, cols = A.shape
    r = 0
    for c in range(cols):
        if r == rows:
            break
        nz = np.nonzero(A[r:, c])[0]
        if nz.size == 0:
            continue
        piv = r + nz[0]
        if piv != r:
            A[[r, piv]] = A[[piv, r]]
        A[r] = F.vmul(A[r], F.inv(int(A[r, c])))
        below = r + 1 + np.nonzero(A[r + 1:, c])[0]
        if below.size:
            A[below] = F.vsub(A[below], F.vmul(A[below, c][:, None], A[r][None, :]))
        r += 1
    return r


def det(F: GF, matrix) -> int:
    A = [list(map(int, row)) for row in matrix]
    n = len(A)
    result = 1
    for c in range(n):
        piv = next((i for i in range(c, n) if A[i][c]), None)
        if piv is None:
            return 0
        if piv != c:
            A[c], A[piv] = A[piv], A[c]
            result = F.neg(result)
        result = F.mul(result, A[c][c])
        inv = F.inv(A[c][c])
        for i in range(c + 1, n):
            if A[i][c]:
                f = F.mul(A[i][c], inv)
                A[i] = [F.sub(x, F.mul(f, y)) for x, y in zip(A[i], A[c])]
    return result


# -- the tower F_q < F_{q^r} --------------------------------------------------------

@dataclass(frozen=True, eq=False)
class TowerContext:
    """F_q embedded in F_{q^r}, with Frobenius, norm, trace and a normal basis.

    ``ext`` is a single extension of F_p of degree m*r; ``base`` is F_q with
    its own modulus, mapped into ``ext`` by ``embed_table``.
    """

    base: GF
    ext: GF
    r: int
    embed_table: np.ndarray
    alpha: int
    basis: tuple[int, ...]
    frob_tables: np.ndarray = field(repr=False)
    norm_table: np.ndarray = field(repr=False)
    trace_table: np.ndarray = field(repr=False)
    unembed: dict = field(repr=False)

    @property
    def p(self) -> int:
        return self.base.p

    @property
    def m(self) -> int:
        return self.base.n

    @property
    def q(self) -> int:
        return self.base.order

    @property
    def Q(self) -> int:
        return self.ext.order

    def __reduce__(self):
        return (build_tower, (self.p, self.m, self.r))

    def embed(self, a: int) -> int:
        return int(self.embed_table[a])

    def restrict(self, x: int) -> int:
        """Inverse of embed on the subfield; FieldError off the subfield."""
        try:
            return self.unembed[int(x)]
        except KeyError:
            raise FieldError(f"{x} is not in the embedded copy of F_{self.q}") from None


def _embedding(base: GF, ext: GF) -> np.ndarray:
    # send the base generator t to the smallest root of base.modulus in ext
    mod = base.modulus
    for beta in range(ext.order):
        acc = 0
        for c in reversed(mod):
            acc = ext.add(ext.mul(acc, beta), ext.from_coeffs([c]))
        if acc == 0:
            break
    else:  # pragma: no cover
        raise FieldError("base modulus has no root in the extension")
    powers = [1]
    for _ in range(1, base.n):
        powers.append(ext.mul(powers[-1], beta))
    table = np.zeros(base.order, dtype=np.int64)
    for a in range(base.order):
        acc = 0
        for ci, bp in zip(base.coeffs(a), powers):
            acc = ext.add(acc, ext.mul(ext.from_coeffs([ci]), bp))
        table[a] = acc
    return table


def _frobenius_tables(ext: GF, q: int, r: int) -> np.ndarray:
    el = np.arange(ext.order)
    tables = np.empty((r + 1, ext.order), dtype=np.int64)
    tables[0] = el
    one_step = ext.vpow(el, q)
    for i in range(1, r + 1):
        tables[i] = one_step[tables[i - 1]]
    return tables


def _is_normal_generator(ext: GF, frob: np.ndarray, a: int, r: int) -> bool:
    conj = [int(frob[i, a]) for i in range(r)]
    M = [[conj[(i + j) % r] for j in range(r)] for i in range(r)]
    return rank(ext, M) == r


@lru_cache(maxsize=32)
def build_tower(p: int, m: int, r: int, cap: int = DEFAULT_CAP) -> TowerContext:
    """Construct F_{p^m} < F_{p^{m r}} with the first normal-basis generator."""
    if not is_prime(p):
        raise FieldError(f"p={p} is not prime")
    if m < 1 or r < 1:
        raise FieldError("m and r must be positive")
    if p ** (m * r) > cap:
        raise FieldError(f"tower order {p}^{m * r} exceeds cap {cap}")
    base = GF(p, m, cap=cap)
    ext = GF(p, m * r, cap=cap)
    q = base.order
    embed_table = _embedding(base, ext)
    frob = _frobenius_tables(ext, q, r)

    alpha = None
    for a in range(1, ext.order):
        if _is_normal_generator(ext, frob, a, r):
            alpha = a
            break
    if alpha is None:  # pragma: no cover - normal basis theorem
        raise FieldError("no normal basis generator found")
    basis = tuple(int(frob[i, alpha]) for i in range(r))

    el = np.arange(ext.order)
    norm = ext.vpow(el, (ext.order - 1) // (q - 1)) if q > 1 else el
    norm = np.where(el == 0, 0, norm)
    trace = ext.vsum(frob[:r], axis=0)
    unembed = {int(v): a for a, v in enumerate(embed_table)}
    return TowerContext(base=base, ext=ext, r=r, embed_table=embed_table, alpha=alpha,
                        basis=basis, frob_tables=frob, norm_table=norm,
                        trace_table=trace, unembed=unembed)


def tower_for_q(q: int, r: int, cap: int = DEFAULT_CAP) -> TowerContext:
    p, m = prime_power(q)
    return build_tower(p, m, r, cap)


# -- operations on the tower ----------------------------------------------------

def frobenius(ctx: TowerContext, x: int, i: int) -> int:
    """x^(q^i)."""
    if i < 0:
        raise ValueError("Frobenius power must be non-negative")
    return int(ctx.frob_tables[i % ctx.r, x])


def norm_and_trace(ctx: TowerContext, x: int) -> tuple[int, int]:
    """(N(x), T(x)) as elements of the base field F_q."""
    return ctx.restrict(ctx.norm_table[x]), ctx.restrict(ctx.trace_table[x])


def norm(ctx: TowerContext, x: int) -> int:
    """N(x) in the embedded copy of F_q inside F_{q^r}."""
    return int(ctx.norm_table[x])


def trace(ctx: TowerContext, x: int) -> int:
    """T(x) in the embedded copy of F_q inside F_{q^r}."""
    return int(ctx.trace_table[x])


def phi_basis(ctx: TowerContext, s: Sequence[int]) -> int:
    """s_1 alpha + s_2 alpha^q + ... + s_r alpha^(q^(r-1)) for s in F_q^r."""
    if len(s) != ctx.r:
        raise ValueError(f"expected {ctx.r} coordinates, got {len(s)}")
    E = ctx.ext
    acc = 0
    for sj, bj in zip(s, ctx.basis):
        if not 0 <= sj < ctx.q:
            raise FieldError(f"{sj} is not an element of F_{ctx.q}")
        acc = E.add(acc, E.mul(int(ctx.embed_table[sj]), bj))
    return acc


def phi_basis_all(ctx: TowerContext) -> np.ndarray:
    """Phi_B over all of F_q^r, rows in lexicographic order of s."""
    E = ctx.ext
    grid = np.array(list(product(range(ctx.q), repeat=ctx.r)), dtype=np.int64).reshape(-1, ctx.r)
    acc = np.zeros(len(grid), dtype=np.int64)
    for j, bj in enumerate(ctx.basis):
        acc = E.vadd(acc, E.vmul(ctx.embed_table[grid[:, j]], bj))
    return acc


def matrix_M(ctx: TowerContext) -> list[list[int]]:
    """The circulant matrix whose (i, j) entry is alpha^(q^((i+j) mod r))."""
    r = ctx.r
    return [[ctx.basis[(i + j) % r] for j in range(r)] for i in range(r)]


@dataclass
class IdentityReport:
    passed: bool
    checked: int
    counterexample: dict | None = None


def matrix_M_row_identity_check(ctx: TowerContext) -> IdentityReport:
    """Check (M s)_i == Phi_B(s)^(q^(i-1)) for every s in F_q^r and every row i."""
    E = ctx.ext
    M = np.array(matrix_M(ctx), dtype=np.int64)
    grid = np.array(list(product(range(ctx.q), repeat=ctx.r)), dtype=np.int64).reshape(-1, ctx.r)
    emb = ctx.embed_table[grid]
    images = phi_basis_all(ctx)
    for i in range(ctx.r):
        row = np.zeros(len(grid), dtype=np.int64)
        for j in range(ctx.r):
            row = E.vadd(row, E.vmul(emb[:, j], M[i, j]))
        expect = ctx.frob_tables[i][images]
        bad = np.nonzero(row != expect)[0]
        if bad.size:
            b = int(bad[0])
            return IdentityReport(False, len(grid) * ctx.r, {
                "s": grid[b].tolist(), "row": i, "got": int(row[b]), "expected": int(expect[b])})
    return IdentityReport(True, len(grid) * ctx.r)


def nullspace(F: GF, matrix) -> list[np.ndarray]:
    """Basis of {v : A v = 0} for an integer-coded matrix A over F."""
    A = np.array(matrix, dtype=np.int64, copy=True)
    rows, cols = A.shape
    pivots = []
    r = 0
    for c in range(cols):
        if r == rows:
            break
        nz = np.nonzero(A[r:, c])[0]
        if nz.size == 0:
            continue
        piv = r + nz[0]
        if piv != r:
            A[[r, piv]] = A[[piv, r]]
        A[r] = F.vmul(A[r], F.inv(int(A[r, c])))
        others = np.array([i for i in np.nonzero(A[:, c])[0] if i != r], dtype=np.int64)
        if others.size:
            A[others] = F.vsub(A[others], F.vmul(A[others, c][:, None], A[r][None, :]))
        pivots.append(c)
        r += 1
    free = [c for c in range(cols) if c not in pivots]
    basis = []
    for fc in free:
        v = np.zeros(cols, dtype=np.int64)
        v[fc] = 1
        for i, pc in enumerate(pivots):
            v[pc] = F.neg(int(A[i, fc]))
        basis.append(v)
    return basis
