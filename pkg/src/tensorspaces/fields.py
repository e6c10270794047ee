"""Exact scalar arithmetic: rationals, prime fields, small extension fields.

Scalars are plain hashable values (Fraction, int, or tuple of ints); every
operation goes through a field object, so forms and matrices can stay
field-agnostic.  There is no floating point anywhere.
"""

from __future__ import annotations

from fractions import Fraction
from itertools import product

from .errors import CharacteristicError, FieldError, FormatError


def _is_prime(n):
    if n < 2:
        return False
    i = 2
    while i * i <= n:
        if n % i == 0:
            return False
        i += 1
    return True


class Field:
    """Common interface; concrete fields below."""

    char = 0
    is_finite = False

    def zero(self):
        raise NotImplementedError

    def one(self):
        raise NotImplementedError

    def from_int(self, n):
        raise NotImplementedError

    def add(self, a, b):
        raise NotImplementedError

    def neg(self, a):
        raise NotImplementedError

    def mul(self, a, b):
        raise NotImplementedError

    def inv(self, a):
        raise NotImplementedError

    def sub(self, a, b):
        return self.add(a, self.neg(b))

    def div(self, a, b):
        return self.mul(a, self.inv(b))

    def is_zero(self, a):
        return a == self.zero()

    def sum(self, values):
        acc = self.zero()
        for v in values:
            acc = self.add(acc, v)
        return acc

    def elements(self):
        """Iterate all elements (finite fields only), in canonical order."""
        raise FieldError("field is not finite")

    @property
    def order(self):
        raise FieldError("field is not finite")

    def check_partition_size(self, size):
        """Positive characteristic must exceed every partition size in use."""
        if 0 < self.char <= size:
            raise CharacteristicError(
                f"characteristic {self.char} too small for partition size {size}"
            )

    def format_scalar(self, a):
        raise NotImplementedError

    def parse_scalar(self, text):
        raise NotImplementedError

    def sort_key(self, a):
        """Total order on scalars, used only for canonical serialization."""
        raise NotImplementedError


class Rationals(Field):
    """Arbitrary-precision rationals (Fraction values, always normalized)."""

    char = 0
    is_finite = False

    def zero(self):
        return Fraction(0)

    def one(self):
        return Fraction(1)

    def from_int(self, n):
        return Fraction(n)

    def add(self, a, b):
        return a + b

    def neg(self, a):
        return -a

    def mul(self, a, b):
        return a * b

    def inv(self, a):
        if a == 0:
            raise ZeroDivisionError("inverse of zero")
        return 1 / a

    def is_zero(self, a):
        return a == 0

    def format_scalar(self, a):
        if a.denominator == 1:
            return str(a.numerator)
        return f"{a.numerator}/{a.denominator}"

    def parse_scalar(self, text):
        try:
            return Fraction(text)
        except (ValueError, ZeroDivisionError) as exc:
            raise FormatError(f"bad rational {text!r}") from exc

    def sort_key(self, a):
        return (a.numerator, a.denominator)

    def __repr__(self):
        return "Q"

    def __eq__(self, other):
        return isinstance(other, Rationals)

    def __hash__(self):
        return hash("Q")


class PrimeField(Field):
    """F_p for prime p; scalars are ints in [0, p)."""

    is_finite = True

    def __init__(self, p):
        if p < 2 or not _is_prime(p):
            raise FieldError(f"{p} is not prime")
        self.p = p
        self.char = p

    def zero(self):
        return 0

    def one(self):
        return 1

    def from_int(self, n):
        return n % self.p

    def add(self, a, b):
        return (a + b) % self.p

    def neg(self, a):
        return (-a) % self.p

    def mul(self, a, b):
        return (a * b) % self.p

    def inv(self, a):
        if a % self.p == 0:
            raise ZeroDivisionError("inverse of zero")
        return pow(a, self.p - 2, self.p)

    def is_zero(self, a):
        return a % self.p == 0

    def elements(self):
        return iter(range(self.p))

    @property
    def order(self):
        return self.p

    def format_scalar(self, a):
        return str(a % self.p)

    def parse_scalar(self, text):
        try:
            return int(text) % self.p
        except ValueError as exc:
            raise FormatError(f"bad F_{self.p} element {text!r}") from exc

    def sort_key(self, a):
        return a % self.p

    def __repr__(self):
        return f"F{self.p}"

    def __eq__(self, other):
        return isinstance(other, PrimeField) and other.p == self.p

    def __hash__(self):
        return hash(("F", self.p))


class ExtensionField(Field):
    """F_{p^s} as residues modulo a caller-supplied irreducible polynomial.

    Scalars are tuples of length s (coefficients of 1, t, ..., t^{s-1} over
    F_p).  The modulus is given by its full coefficient list, ascending
    degree, and must be monic of degree s.  Irreducibility is validated by
    exhaustive root / quadratic-factor checks, which covers s <= 4; larger
    degrees are rejected.
    """

    is_finite = True

    def __init__(self, p, modulus):
        if not _is_prime(p):
            raise FieldError(f"{p} is not prime")
        modulus = tuple(c % p for c in modulus)
        s = len(modulus) - 1
        if s < 1 or modulus[-1] != 1:
            raise FieldError("modulus must be monic of degree >= 1")
        if s > 4:
            raise FieldError("extension degree > 4 not supported")
        self.p = p
        self.s = s
        self.modulus = modulus
        self.char = p
        if not self._is_irreducible():
            raise FieldError(f"modulus {modulus} is reducible over F_{p}")

    # -- polynomial helpers on raw coefficient tuples -------------------

    def _poly_mod(self, coeffs):
        p, s, m = self.p, self.s, self.modulus
        cs = [c % p for c in coeffs]
        for deg in range(len(cs) - 1, s - 1, -1):
            lead = cs[deg]
            if lead:
                for j in range(s + 1):
                    cs[deg - s + j] = (cs[deg - s + j] - lead * m[j]) % p
        return tuple(cs[:s]) if len(cs) >= s else tuple(cs) + (0,) * (s - len(cs))

    def _is_irreducible(self):
        p, s = self.p, self.s
        # no roots rules out all linear factors; enough for s in {2, 3}
        for r in range(p):
            acc = 0
            for c in reversed(self.modulus):
                acc = (acc * r + c) % p
            if acc == 0:
                return False
        if s <= 3:
            return True
        # s == 4: also exclude products of two irreducible quadratics
        for b in range(p):
            for c in range(p):
                quad = (c, b, 1)
                if any((r * r + b * r + c) % p == 0 for r in range(p)):
                    continue
                if self._divides(quad):
                    return False
        return True

    def _divides(self, divisor):
        p = self.p
        rem = list(self.modulus)
        d = len(divisor) - 1
        while len(rem) - 1 >= d and any(rem):
            while rem and rem[-1] % p == 0:
                rem.pop()
            if len(rem) - 1 < d:
                break
            shift = len(rem) - 1 - d
            lead = rem[-1]  # divisor monic
            for j in range(d + 1):
                rem[shift + j] = (rem[shift + j] - lead * divisor[j]) % p
            rem.pop()
        return not any(c % p for c in rem)

    # -- field interface -------------------------------------------------

    def zero(self):
        return (0,) * self.s

    def one(self):
        return (1,) + (0,) * (self.s - 1)

    def from_int(self, n):
        return (n % self.p,) + (0,) * (self.s - 1)

    def add(self, a, b):
        p = self.p
        return tuple((x + y) % p for x, y in zip(a, b))

    def neg(self, a):
        p = self.p
        return tuple((-x) % p for x in a)

    def mul(self, a, b):
        raw = [0] * (2 * self.s - 1)
        for i, x in enumerate(a):
            if x:
                for j, y in enumerate(b):
                    raw[i + j] += x * y
        return self._poly_mod(raw)

    def inv(self, a):
        if all(c % self.p == 0 for c in a):
            raise ZeroDivisionError("inverse of zero")
        # a^(q-2) via square-and-multiply; q is tiny here
        e = self.order - 2
        result = self.one()
        base = a
        while e:
            if e & 1:
                result = self.mul(result, base)
            base = self.mul(base, base)
            e >>= 1
        return result

    def is_zero(self, a):
        return all(c % self.p == 0 for c in a)

    def elements(self):
        for coeffs in product(range(self.p), repeat=self.s):
            yield coeffs

    @property
    def order(self):
        return self.p**self.s

    def embed_scalar(self, base_field, a):
        """Image of an F_p scalar under the canonical embedding F_p -> F_{p^s}."""
        if not isinstance(base_field, PrimeField) or base_field.p != self.p:
            raise FieldError("base change requires matching characteristic")
        return self.from_int(a)

    def format_scalar(self, a):
        return ":".join(str(c % self.p) for c in a)

    def parse_scalar(self, text):
        try:
            coeffs = tuple(int(c) % self.p for c in text.split(":"))
        except ValueError as exc:
            raise FormatError(f"bad F_{self.p}^{self.s} element {text!r}") from exc
        if len(coeffs) != self.s:
            raise FormatError(f"element {text!r} needs {self.s} coefficients")
        return coeffs

    def sort_key(self, a):
        return tuple(c % self.p for c in a)

    def __repr__(self):
        return f"F{self.p}^{self.s}"

    def __eq__(self, other):
        return (
            isinstance(other, ExtensionField)
            and other.p == self.p
            and other.modulus == self.modulus
        )

    def __hash__(self):
        return hash(("F", self.p, self.modulus))


QQ = Rationals()

GF2 = PrimeField(2)
GF3 = PrimeField(3)
GF5 = PrimeField(5)
GF7 = PrimeField(7)


def GF(q):
    """F_q for prime q, or F_{p^s} with a default modulus for q in {4, 9}."""
    if _is_prime(q):
        return PrimeField(q)
    if q == 4:
        return ExtensionField(2, (1, 1, 1))  # t^2 + t + 1
    if q == 9:
        return ExtensionField(3, (1, 0, 1))  # t^2 + 1
    raise FieldError(f"no default field of order {q}")


def field_embedding(src, dst):
    """Return the scalar map of a supported ring embedding src -> dst.

    Supported: identity on any field, and F_p -> F_{p^s}.
    """
    if src == dst:
        return lambda a: a
    if isinstance(src, PrimeField) and isinstance(dst, ExtensionField):
        return lambda a: dst.embed_scalar(src, a)
    raise FieldError(f"no supported embedding {src!r} -> {dst!r}")
