"""Exact number-theoretic substrate.

Arbitrary-precision rationals (``fractions.Fraction``), signed prime
factorizations, Legendre and Hilbert symbols, the two-square / norm-group
predicates, and arithmetic in the imaginary quadratic field Q(sqrt(-alpha)).

All values are immutable and all functions are pure, so everything here is
safe for unrestricted concurrent use.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache

Rational = Fraction

#: Inputs above this bound are not factored by trial division; predicates
#: that can fall back to a congruence argument do so instead.
FACTOR_LIMIT = 10**14

_MR_BASES = (2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37)


class DomainError(ValueError):
    """Raised when an operation is applied outside its mathematical domain."""


class FactoringBudgetError(DomainError):
    """Raised when an exact factorization would exceed the desk-scale budget."""


# ---------------------------------------------------------------------------
# rational serialization ("p/q" strings, "n" when integral)

def rational_to_str(q: Rational) -> str:
    q = Fraction(q)
    return str(q.numerator) if q.denominator == 1 else f"{q.numerator}/{q.denominator}"


def rational_from_str(s: str) -> Rational:
    return Fraction(s.strip())


# ---------------------------------------------------------------------------
# primality and integer factorization

def is_prime(n: int) -> bool:
    """Deterministic Miller-Rabin; the base set covers all n < 3.3e24."""
    if n < 2:
        return False
    for p in _MR_BASES:
        if n % p == 0:
            return n == p
    d, r = n - 1, 0
    while d % 2 == 0:
        d //= 2
        r += 1
    for a in _MR_BASES:
        x = pow(a, d, n)
        if x in (1, n - 1):
            continue
        for _ in range(r - 1):
            x = x * x % n
            if x == n - 1:
                break
        else:
            return False
    return True


def factor_positive_int(n: int) -> dict[int, int]:
    """Trial-division factorization of a positive integer.

    Rejects inputs beyond ``FACTOR_LIMIT``: everything this toolkit needs to
    factor stays comfortably below it, and trial division past that point is
    no longer a sensible strategy.
    """
    if n <= 0:
        raise DomainError("factor_positive_int expects a positive integer")
    if n > FACTOR_LIMIT:
        raise FactoringBudgetError(f"{n} exceeds the trial-division budget {FACTOR_LIMIT}")
    factors: dict[int, int] = {}
    for p in (2, 3):
        while n % p == 0:
            factors[p] = factors.get(p, 0) + 1
            n //= p
    d = 5
    while d * d <= n:
        if is_prime(n):
            break
        for p in (d, d + 2):
            while n % p == 0:
                factors[p] = factors.get(p, 0) + 1
                n //= p
        d += 6
    if n > 1:
        factors[n] = factors.get(n, 0) + 1
    return factors


@dataclass(frozen=True)
class PrimeFactorization:
    """Signed factorization of a nonzero rational; denominator primes get
    negative exponents."""

    sign: int
    factors: tuple[tuple[int, int], ...]  # sorted (prime, exponent) pairs

    def as_dict(self) -> dict[int, int]:
        return dict(self.factors)

    def value(self) -> Rational:
        v = Fraction(self.sign)
        for p, e in self.factors:
            v *= Fraction(p) ** e
        return v


def factor(q: Rational) -> PrimeFactorization:
    """Exact signed factorization of a nonzero rational."""
    q = Fraction(q)
    if q == 0:
        raise DomainError("cannot factor zero")
    sign = 1 if q > 0 else -1
    exps = factor_positive_int(abs(q.numerator))
    for p, e in factor_positive_int(q.denominator).items():
        exps[p] = exps.get(p, 0) - e
    items = tuple(sorted((p, e) for p, e in exps.items() if e != 0))
    return PrimeFactorization(sign, items)


def squarefree_part(q: Rational) -> int:
    """The unique squarefree integer s such that q/s is a rational square."""
    f = factor(q)
    s = f.sign
    for p, e in f.factors:
        if e % 2:
            s *= p
    return s


# ---------------------------------------------------------------------------
# places of Q

@dataclass(frozen=True, order=True)
class Place:
    """A place of the rationals: a finite prime, or the real place."""

    prime: int | None  # None encodes the real place

    def __post_init__(self) -> None:
        if self.prime is not None and not is_prime(self.prime):
            raise DomainError(f"{self.prime} is not prime")

    @property
    def is_real(self) -> bool:
        return self.prime is None

    def __str__(self) -> str:
        return "inf" if self.prime is None else str(self.prime)

    @staticmethod
    def parse(s: str) -> "Place":
        s = s.strip()
        return REAL_PLACE if s in ("inf", "infinity", "oo") else Place(int(s))


REAL_PLACE = Place(None)


def relevant_places(*values: Rational) -> list[Place]:
    """The real place, 2, and every odd prime dividing one of the values."""
    primes = {2}
    for v in values:
        if v != 0:
            primes.update(p for p, _ in factor(v).factors)
    return [REAL_PLACE] + [Place(p) for p in sorted(primes)]


# ---------------------------------------------------------------------------
# Legendre and Hilbert symbols

def legendre_symbol(a: int, p: int) -> int:
    """Quadratic-residue symbol (a|p) for an odd prime p."""
    if p == 2 or not is_prime(p):
        raise DomainError(f"{p} is not an odd prime")
    a %= p
    if a == 0:
        return 0
    r = pow(a, (p - 1) // 2, p)
    return 1 if r == 1 else -1


def _unit_mod(q: Rational, p: int, k: int = 1) -> int:
    """The p-unit part of q reduced mod p^k (q with all p's stripped)."""
    num, den = q.numerator, q.denominator
    while num % p == 0:
        num //= p
    while den % p == 0:
        den //= p
    mod = p**k
    return num * pow(den, -1, mod) % mod


def _valuation(q: Rational, p: int) -> int:
    v = 0
    num, den = q.numerator, q.denominator
    while num % p == 0:
        num //= p
        v += 1
    while den % p == 0:
        den //= p
        v -= 1
    return v


def hilbert_symbol(a: Rational, b: Rational, v: Place) -> int:
    """Hilbert symbol (a, b)_v: +1 iff z^2 = a x^2 + b y^2 has a nontrivial
    solution over the completion of Q at v.

    Computed by the classical closed-form local formulas: sign analysis at the
    real place, Legendre symbols and valuations at odd primes, and the unit
    invariants eps(u) = (u-1)/2, omega(u) = (u^2-1)/8 at 2.
    """
    a, b = Fraction(a), Fraction(b)
    if a == 0 or b == 0:
        raise DomainError("hilbert symbol requires nonzero arguments")
    if v.is_real:
        return -1 if (a < 0 and b < 0) else 1
    p = v.prime
    alpha, beta = _valuation(a, p), _valuation(b, p)
    if p == 2:
        u = _unit_mod(a, 2, 3)  # mod 8
        w = _unit_mod(b, 2, 3)
        eps_u, eps_w = (u - 1) // 2 % 2, (w - 1) // 2 % 2
        omega_u, omega_w = (u * u - 1) // 8 % 2, (w * w - 1) // 8 % 2
        exp = eps_u * eps_w + alpha * omega_w + beta * omega_u
        return -1 if exp % 2 else 1
    u = _unit_mod(a, p)
    w = _unit_mod(b, p)
    result = 1
    if alpha % 2 and beta % 2 and (p - 1) // 2 % 2:
        result = -result
    if beta % 2:
        result *= legendre_symbol(u, p)
    if alpha % 2:
        result *= legendre_symbol(w, p)
    return result


def _strip_square_factors(n: int) -> int:
    """Divide out square factors without full factorization (oracle helper)."""
    sign = 1 if n > 0 else -1
    n = abs(n)
    d = 2
    while d * d <= n:
        while n % (d * d) == 0:
            n //= d * d
        d += 1
    return sign * n


def hilbert_symbol_oracle(a: Rational, b: Rational, v: Place) -> int:
    """Brute-force local-solvability oracle for the Hilbert symbol.

    Independent of :func:`hilbert_symbol`: decides whether z^2 = a x^2 + b y^2
    has a nontrivial local solution by exhaustive search modulo p^K, where K is
    large enough for every solution found to lift (and every p-adic solution to
    descend).  A primitive solution can be scaled so that one unit coordinate
    equals 1, which leaves three two-variable scans.
    """
    a, b = Fraction(a), Fraction(b)
    if a == 0 or b == 0:
        raise DomainError("hilbert symbol requires nonzero arguments")
    if v.is_real:
        return -1 if (a < 0 and b < 0) else 1
    p = v.prime
    # The symbol only depends on square classes, so clear denominators and
    # strip square parts; exponents of p in a, b are then 0 or 1.
    ai = _strip_square_factors(a.numerator * a.denominator)
    bi = _strip_square_factors(b.numerator * b.denominator)
    k = 6 if p == 2 else 3
    mod = p**k
    ar, br = ai % mod, bi % mod
    squares = {x * x % mod for x in range(mod)}
    a_squares = {(ar * s) % mod for s in squares}
    for s in squares:
        if (br + ar * s) % mod in squares:  # y = 1, scanning x^2
            return 1
        if (ar + br * s) % mod in squares:  # x = 1, scanning y^2
            return 1
        if (1 - br * s) % mod in a_squares:  # z = 1, scanning y^2
            return 1
    return -1


# ---------------------------------------------------------------------------
# sums of two squares and norm groups of Q(sqrt(-alpha))

def is_sum_of_two_rational_squares(q: Rational) -> bool:
    """True iff q = x^2 + y^2 with rational (x, y) != (0, 0).

    Equivalently: q > 0 and every prime congruent to 3 mod 4 occurs in q with
    even exponent (infinite descent reduces the rational case to the classical
    integer two-square theorem).
    """
    q = Fraction(q)
    if q <= 0:
        return False
    return all(e % 2 == 0 for p, e in factor(q).factors if p % 4 == 3)


def is_norm_of(q: Rational, alpha: Rational) -> bool:
    """True iff q = x^2 + alpha y^2 for some rational (x, y) != (0, 0), i.e.
    q is a norm from Q(sqrt(-alpha)).

    Decided locally: representation of q by the form <1, alpha> amounts to
    isotropy of <1, alpha, -q>, i.e. (q, -alpha)_v = 1 at every place.
    """
    alpha, q = Fraction(alpha), Fraction(q)
    if alpha <= 0:
        raise DomainError("the field parameter alpha must be positive")
    if q == 0:
        raise DomainError("norm-group membership is a statement about nonzero values")
    if q < 0:
        return False
    return all(
        hilbert_symbol(q, -alpha, v) == 1 for v in relevant_places(q, Fraction(2) * alpha)
    )


# ---------------------------------------------------------------------------
# elements x + y*sqrt(-alpha) of an imaginary quadratic field

@dataclass(frozen=True)
class QuadFieldElement:
    """An element x + y*sqrt(-alpha) of Q(sqrt(-alpha)), alpha > 0 rational."""

    alpha: Rational
    x: Rational
    y: Rational

    def __post_init__(self) -> None:
        object.__setattr__(self, "alpha", Fraction(self.alpha))
        object.__setattr__(self, "x", Fraction(self.x))
        object.__setattr__(self, "y", Fraction(self.y))
        if self.alpha <= 0:
            raise DomainError("alpha must be positive")

    def _check(self, other: "QuadFieldElement") -> None:
        if self.alpha != other.alpha:
            raise DomainError("cannot mix elements of different quadratic fields")

    def __add__(self, other: "QuadFieldElement") -> "QuadFieldElement":
        self._check(other)
        return QuadFieldElement(self.alpha, self.x + other.x, self.y + other.y)

    def __sub__(self, other: "QuadFieldElement") -> "QuadFieldElement":
        self._check(other)
        return QuadFieldElement(self.alpha, self.x - other.x, self.y - other.y)

    def __neg__(self) -> "QuadFieldElement":
        return QuadFieldElement(self.alpha, -self.x, -self.y)

    def __mul__(self, other):
        if isinstance(other, QuadFieldElement):
            self._check(other)
            # (x + y s)(x' + y' s) with s^2 = -alpha
            return QuadFieldElement(
                self.alpha,
                self.x * other.x - self.alpha * self.y * other.y,
                self.x * other.y + self.y * other.x,
            )
        return QuadFieldElement(self.alpha, self.x * Fraction(other), self.y * Fraction(other))

    __rmul__ = __mul__

    def __truediv__(self, other):
        if isinstance(other, QuadFieldElement):
            self._check(other)
            n = other.norm()
            if n == 0:
                raise ZeroDivisionError("division by zero field element")
            num = self * other.conj()
            return QuadFieldElement(self.alpha, num.x / n, num.y / n)
        return QuadFieldElement(self.alpha, self.x / Fraction(other), self.y / Fraction(other))

    def conj(self) -> "QuadFieldElement":
        return QuadFieldElement(self.alpha, self.x, -self.y)

    def norm(self) -> Rational:
        """|z|^2 = z * conj(z) = x^2 + alpha y^2."""
        return self.x * self.x + self.alpha * self.y * self.y

    def is_zero(self) -> bool:
        return self.x == 0 and self.y == 0

    def square(self) -> "QuadFieldElement":
        return self * self

    def __str__(self) -> str:
        return f"{rational_to_str(self.x)} + {rational_to_str(self.y)}*sqrt(-{rational_to_str(self.alpha)})"


def gauss_int(x, y) -> QuadFieldElement:
    """Element x + y*i of Q(i) (alpha = 1)."""
    return QuadFieldElement(Fraction(1), Fraction(x), Fraction(y))


# ---------------------------------------------------------------------------
# small prime enumeration used by the family constructors

@lru_cache(maxsize=None)
def primes_congruent(residue: int, modulus: int, count: int) -> tuple[int, ...]:
    """The first ``count`` primes congruent to ``residue`` mod ``modulus``."""
    found: list[int] = []
    n = 2
    while len(found) < count:
        if n % modulus == residue and is_prime(n):
            found.append(n)
        n += 1
    return tuple(found)


def is_rational_square(q: Rational) -> bool:
    q = Fraction(q)
    if q < 0:
        return False
    if q == 0:
        return True
    return (
        math.isqrt(q.numerator) ** 2 == q.numerator
        and math.isqrt(q.denominator) ** 2 == q.denominator
    )


def is_rational_dth_power(q: Rational, d: int) -> bool:
    """True iff q = a^d for a rational a (positive a when d is even)."""
    q = Fraction(q)
    if q == 0:
        return True
    if q < 0:
        if d % 2 == 0:
            return False
        return is_rational_dth_power(-q, d)
    return _is_dth_power_int(q.numerator, d) and _is_dth_power_int(q.denominator, d)


def _is_dth_power_int(n: int, d: int) -> bool:
    r = round(n ** (1.0 / d))
    return any((r + k) >= 0 and (r + k) ** d == n for k in (-1, 0, 1))
