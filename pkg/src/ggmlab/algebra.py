"""Exact arithmetic shared by every model.

Linear polynomials are coefficient vectors ``(b, a1, ..., at)`` for
``a1*X1 + ... + at*Xt + b``.  Index 0 is always the constant term.
"""
from __future__ import annotations

import math
import random
from dataclasses import dataclass
from typing import Iterable, Sequence


class ContractViolation(ValueError):
    """A caller broke a precondition (dimension, modulus, zero input...)."""


class SingularSystemError(ArithmeticError):
    """Raised when a square system has no unique solution (collisions not informative)."""


# ---------------------------------------------------------------------------
# residues and small number theory

def inv_mod(a: int, n: int) -> int:
    return pow(a % n, -1, n)


def crt(residues: Sequence[int], moduli: Sequence[int]) -> int:
    x, m = 0, 1
    for r, n in zip(residues, moduli):
        # x + m*k = r (mod n)
        k = ((r - x) * inv_mod(m, n)) % n
        x += m * k
        m *= n
    return x % m


def sqrt_mod(a: int, p: int) -> list[int]:
    """All square roots of a modulo an odd prime p (or p = 2), sorted."""
    a %= p
    if p == 2 or a == 0:
        return [a]
    if pow(a, (p - 1) // 2, p) != 1:
        return []
    # Tonelli-Shanks
    q, s = p - 1, 0
    while q % 2 == 0:
        q //= 2
        s += 1
    z = 2
    while pow(z, (p - 1) // 2, p) != p - 1:
        z += 1
    m, c, t, r = s, pow(z, q, p), pow(a, q, p), pow(a, (q + 1) // 2, p)
    while t != 1:
        i, t2 = 0, t
        while t2 != 1:
            t2 = t2 * t2 % p
            i += 1
        b = pow(c, 1 << (m - i - 1), p)
        m, c, t, r = i, b * b % p, t * b * b % p, r * b % p
    return sorted({r, p - r})


def roots_mod_p(coeffs: Sequence[int], p: int) -> list[int] | None:
    """Roots of c0 + c1*X + c2*X^2 over Z_p (p prime).

    Returns None when the polynomial is identically zero.
    """
    c0, c1, c2 = (list(coeffs) + [0, 0, 0])[:3]
    c0, c1, c2 = c0 % p, c1 % p, c2 % p
    if c2 == 0:
        if c1 == 0:
            return None if c0 == 0 else []
        return [(-c0 * inv_mod(c1, p)) % p]
    if p == 2:
        return [x for x in (0, 1) if (c0 + c1 * x + c2 * x * x) % 2 == 0]
    disc = (c1 * c1 - 4 * c2 * c0) % p
    inv2a = inv_mod(2 * c2, p)
    return sorted({((-c1 + s) * inv2a) % p for s in sqrt_mod(disc, p)})


def primes_upto(bound: int) -> list[int]:
    if bound < 2:
        return []
    sieve = bytearray([1]) * (bound + 1)
    sieve[0] = sieve[1] = 0
    for i in range(2, math.isqrt(bound) + 1):
        if sieve[i]:
            sieve[i * i :: i] = bytearray(len(range(i * i, bound + 1, i)))
    return [i for i, f in enumerate(sieve) if f]


def smooth_exponents(n: int, primes: Sequence[int]) -> tuple[int, ...] | None:
    """Exponent vector of n over ``primes`` if n factors completely, else None."""
    if n <= 0:
        return None
    out = []
    for q in primes:
        e = 0
        while n % q == 0:
            n //= q
            e += 1
        out.append(e)
    return tuple(out) if n == 1 else None


_SMALL_PRIMES = primes_upto(1000)
_MR_BASES = (2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37, 41)
# deterministic below 3.3e24; the extra bases only matter above that
_MR_EXTRA = (43, 47, 53, 59, 61, 67, 71, 73, 79, 83, 89, 97)


def is_prime(n: int) -> bool:
    if n < 2:
        return False
    for q in _SMALL_PRIMES[:25]:
        if n % q == 0:
            return n == q
    d, s = n - 1, 0
    while d % 2 == 0:
        d //= 2
        s += 1
    bases = _MR_BASES if n < 3_317_044_064_679_887_385_961_981 else _MR_BASES + _MR_EXTRA
    for a in bases:
        x = pow(a, d, n)
        if x in (1, n - 1):
            continue
        for _ in range(s - 1):
            x = x * x % n
            if x == n - 1:
                break
        else:
            return False
    return True


def _rho(n: int, rng: random.Random) -> int:
    # Brent's cycle detection with batched gcds
    if n % 2 == 0:
        return 2
    while True:
        y, c, m = rng.randrange(1, n), rng.randrange(1, n), 64
        g = r = q = 1
        x = ys = y
        while g == 1:
            x = y
            for _ in range(r):
                y = (y * y + c) % n
            k = 0
            while k < r and g == 1:
                ys = y
                for _ in range(min(m, r - k)):
                    y = (y * y + c) % n
                    q = q * abs(x - y) % n
                g = math.gcd(q, n)
                k += m
            r *= 2
        if g == n:
            g = 1
            while g == 1:
                ys = (ys * ys + c) % n
                g = math.gcd(abs(x - ys), n)
        if g != n:
            return g


FACTOR_LIMIT = 1 << 96


@dataclass(frozen=True)
class Factorization:
    factors: tuple[tuple[int, int], ...]

    def value(self) -> int:
        out = 1
        for q, e in self.factors:
            out *= q**e
        return out

    def primes(self) -> list[int]:
        return [q for q, _ in self.factors]

    def __iter__(self):
        return iter(self.factors)

    def __len__(self) -> int:
        return len(self.factors)


def factor_integer(n: int, seed: int = 0) -> Factorization:
    """Complete factorization by trial division then seeded Brent-rho."""
    if n < 1:
        raise ContractViolation("factor_integer needs n >= 1")
    if n > FACTOR_LIMIT:
        raise ContractViolation("n exceeds the desk-scale factoring bound 2^96")
    counts: dict[int, int] = {}
    for q in _SMALL_PRIMES:
        if q * q > n:
            break
        while n % q == 0:
            counts[q] = counts.get(q, 0) + 1
            n //= q
    rng = random.Random(seed)
    stack = [n] if n > 1 else []
    while stack:
        m = stack.pop()
        if is_prime(m):
            counts[m] = counts.get(m, 0) + 1
            continue
        r = math.isqrt(m)
        if r * r == m:
            stack += [r, r]
            continue
        d = _rho(m, rng)
        stack += [d, m // d]
    return Factorization(tuple(sorted(counts.items())))


def nbit_prime_divisors(x: int, n: int, seed: int = 0) -> list[int]:
    if x == 0:
        raise ContractViolation("nbit_prime_divisors needs x != 0")
    return [q for q, _ in factor_integer(abs(x), seed) if q.bit_length() == n]


def nbit_primes(n: int) -> list[int]:
    return [q for q in primes_upto((1 << n) - 1) if q.bit_length() == n]


def log2_comb(n: int, k: int) -> float:
    c = math.comb(n, k)
    return math.log2(c) if c > 0 else float("-inf")


# ---------------------------------------------------------------------------
# linear polynomials

@dataclass(frozen=True)
class LinPolyModN:
    modulus: int
    coeffs: tuple[int, ...]

    def __post_init__(self):
        if self.modulus < 1:
            raise ContractViolation("modulus must be positive")
        object.__setattr__(self, "coeffs", tuple(int(c) % self.modulus for c in self.coeffs))

    @classmethod
    def const(cls, modulus: int, nvars: int, b: int) -> "LinPolyModN":
        return cls(modulus, (b,) + (0,) * nvars)

    @classmethod
    def var(cls, modulus: int, nvars: int, i: int) -> "LinPolyModN":
        v = [0] * (nvars + 1)
        v[i] = 1
        return cls(modulus, tuple(v))

    @property
    def nvars(self) -> int:
        return len(self.coeffs) - 1

    def _check(self, other: "LinPolyModN"):
        if other.modulus != self.modulus or len(other.coeffs) != len(self.coeffs):
            raise ContractViolation("polynomials over different moduli or variable counts")

    def __add__(self, other: "LinPolyModN") -> "LinPolyModN":
        self._check(other)
        return LinPolyModN(self.modulus, tuple(a + b for a, b in zip(self.coeffs, other.coeffs)))

    def __sub__(self, other: "LinPolyModN") -> "LinPolyModN":
        self._check(other)
        return LinPolyModN(self.modulus, tuple(a - b for a, b in zip(self.coeffs, other.coeffs)))

    def scale(self, k: int) -> "LinPolyModN":
        return LinPolyModN(self.modulus, tuple(k * a for a in self.coeffs))

    def is_zero(self) -> bool:
        return not any(self.coeffs)

    def evaluate(self, xs: Sequence[int]) -> int:
        return (self.coeffs[0] + sum(a * x for a, x in zip(self.coeffs[1:], xs))) % self.modulus


@dataclass(frozen=True)
class LinPolyInt:
    coeffs: tuple[int, ...]

    @property
    def nvars(self) -> int:
        return len(self.coeffs) - 1

    def _check(self, other: "LinPolyInt"):
        if len(other.coeffs) != len(self.coeffs):
            raise ContractViolation("variable counts differ")

    def __add__(self, other: "LinPolyInt") -> "LinPolyInt":
        self._check(other)
        return LinPolyInt(tuple(a + b for a, b in zip(self.coeffs, other.coeffs)))

    def __sub__(self, other: "LinPolyInt") -> "LinPolyInt":
        self._check(other)
        return LinPolyInt(tuple(a - b for a, b in zip(self.coeffs, other.coeffs)))

    def is_zero(self) -> bool:
        return not any(self.coeffs)

    def evaluate(self, xs: Sequence[int]) -> int:
        return self.coeffs[0] + sum(a * x for a, x in zip(self.coeffs[1:], xs))

    def max_abs(self) -> int:
        return max((abs(c) for c in self.coeffs), default=0)


def _coeffs(poly) -> tuple[int, ...]:
    return poly.coeffs if hasattr(poly, "coeffs") else tuple(poly)


# ---------------------------------------------------------------------------
# span over Z_p

class SpanBasisModP:
    """Row space over Z_p kept in reduced row-echelon form.

    Pivots are searched over the variable columns first and the constant
    column last, so a relation like X1 + X2 - 5 pivots on X1.
    """

    def __init__(self, p: int, dim: int):
        self.p = p
        self.dim = dim
        self._order = list(range(1, dim)) + [0]
        self._rows: dict[int, list[int]] = {}

    @property
    def rank(self) -> int:
        return len(self._rows)

    @property
    def pivots(self) -> list[int]:
        return [c for c in self._order if c in self._rows]

    def rows(self) -> list[tuple[int, ...]]:
        return [tuple(self._rows[c]) for c in self.pivots]

    def copy(self) -> "SpanBasisModP":
        out = SpanBasisModP(self.p, self.dim)
        out._rows = {c: list(r) for c, r in self._rows.items()}
        return out

    def _vec(self, poly) -> list[int]:
        if isinstance(poly, LinPolyModN) and poly.modulus != self.p:
            raise ContractViolation("modulus mismatch")
        v = _coeffs(poly)
        if len(v) != self.dim:
            raise ContractViolation("dimension mismatch")
        return [c % self.p for c in v]

    def reduce(self, poly) -> list[int]:
        v = self._vec(poly)
        p = self.p
        for c, row in self._rows.items():
            f = v[c]
            if f:
                for k, rk in enumerate(row):
                    if rk:
                        v[k] = (v[k] - f * rk) % p
        return v

    def contains(self, poly) -> bool:
        return not any(self.reduce(poly))

    def insert(self, poly) -> bool:
        v = self.reduce(poly)
        if not any(v):
            return False
        p = self.p
        piv = next(c for c in self._order if v[c])
        inv = pow(v[piv], -1, p)
        v = [(a * inv) % p for a in v]
        for row in self._rows.values():
            f = row[piv]
            if f:
                for k, a in enumerate(v):
                    if a:
                        row[k] = (row[k] - f * a) % p
        self._rows[piv] = v
        return True


def span_contains_mod(basis: SpanBasisModP, poly) -> bool:
    return basis.contains(poly)


def span_insert_mod(basis: SpanBasisModP, poly) -> bool:
    return basis.insert(poly)


# ---------------------------------------------------------------------------
# span over Z (Hermite normal form)

def _xgcd(a: int, b: int) -> tuple[int, int, int]:
    x0, x1, y0, y1 = 1, 0, 0, 1
    while b:
        q, a, b = a // b, b, a % b
        x0, x1 = x1, x0 - q * x1
        y0, y1 = y1, y0 - q * y1
    return a, x0, y0


class SpanBasisZ:
    """Integer row lattice in Hermite normal form (positive pivots, reduced above)."""

    def __init__(self, dim: int):
        self.dim = dim
        self._rows: dict[int, list[int]] = {}

    @property
    def rank(self) -> int:
        return len(self._rows)

    def rows(self) -> list[tuple[int, ...]]:
        return [tuple(self._rows[c]) for c in sorted(self._rows)]

    def copy(self) -> "SpanBasisZ":
        out = SpanBasisZ(self.dim)
        out._rows = {c: list(r) for c, r in self._rows.items()}
        return out

    def _vec(self, poly) -> list[int]:
        v = list(_coeffs(poly))
        if len(v) != self.dim:
            raise ContractViolation("dimension mismatch")
        return v

    def contains(self, poly) -> bool:
        v = self._vec(poly)
        for c in range(self.dim):
            if v[c] == 0:
                continue
            row = self._rows.get(c)
            if row is None or v[c] % row[c]:
                return False
            f = v[c] // row[c]
            v = [a - f * b for a, b in zip(v, row)]
        return True

    def insert(self, poly) -> bool:
        v = self._vec(poly)
        changed = False
        for c in range(self.dim):
            if v[c] == 0:
                continue
            row = self._rows.get(c)
            if row is None:
                if v[c] < 0:
                    v = [-a for a in v]
                self._rows[c] = v
                changed = True
                break
            a, b = row[c], v[c]
            if b % a == 0:
                f = b // a
                v = [x - f * y for x, y in zip(v, row)]
                continue
            g, s, t = _xgcd(a, b)
            new_row = [s * x + t * y for x, y in zip(row, v)]
            v = [(a // g) * y - (b // g) * x for x, y in zip(row, v)]
            if new_row[c] < 0:
                new_row = [-x for x in new_row]
            self._rows[c] = new_row
            changed = True
        if changed:
            self._size_reduce()
        return changed

    def _size_reduce(self):
        cols = sorted(self._rows)
        for i, c in enumerate(cols):
            piv = self._rows[c]
            for c2 in cols[:i]:
                row = self._rows[c2]
                f = row[c] // piv[c]
                if f:
                    self._rows[c2] = [x - f * y for x, y in zip(row, piv)]


def z_span_contains(basis: SpanBasisZ, poly) -> bool:
    return basis.contains(poly)


# ---------------------------------------------------------------------------
# square systems

def solve_square_system_mod(equations: Iterable, p: int) -> tuple[int, ...]:
    """Unique root of m linear polynomials in m variables over Z_p."""
    rows = [list(_coeffs(e)) for e in equations]
    m = len(rows)
    if any(len(r) != m + 1 for r in rows):
        raise ContractViolation("need m equations in m variables")
    # augmented matrix [A | -b]
    mat = [[a % p for a in r[1:]] + [(-r[0]) % p] for r in rows]
    for col in range(m):
        piv = next((r for r in range(col, m) if mat[r][col]), None)
        if piv is None:
            raise SingularSystemError("collisions not informative: singular system")
        mat[col], mat[piv] = mat[piv], mat[col]
        inv = pow(mat[col][col], -1, p)
        mat[col] = [(a * inv) % p for a in mat[col]]
        for r in range(m):
            f = mat[r][col]
            if r != col and f:
                mat[r] = [(a - f * b) % p for a, b in zip(mat[r], mat[col])]
    return tuple(mat[r][m] for r in range(m))
