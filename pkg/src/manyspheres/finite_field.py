"""Arithmetic in GF(p^e), polynomial basis.

Elements are coefficient tuples ``(c_0, ..., c_{e-1})`` of residues mod p,
lowest degree first, reduced modulo a monic irreducible polynomial of
degree e.  Text syntax for polynomials and elements is a comma-separated
list of residues, lowest degree first: ``"2,1,1"`` is ``2 + x + x^2``.
"""
from __future__ import annotations

import itertools
from dataclasses import dataclass, field

from .errors import CompositeCharacteristic, DivisionByZero, FieldMismatch, ReducibleModulus

MAX_ORDER = 1 << 16


def is_prime(n: int) -> bool:
    if n < 2:
        return False
    if n % 2 == 0:
        return n == 2
    d = 3
    while d * d <= n:
        if n % d == 0:
            return False
        d += 2
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


def prime_power(q: int) -> tuple[int, int] | None:
    """Return (p, e) with q == p**e, or None if q is not a prime power."""
    if q < 2:
        return None
    for p in prime_factors(q)[:1]:
        e, r = 0, q
        while r % p == 0:
            r //= p
            e += 1
        if r == 1:
            return p, e
    return None


def euler_phi(n: int) -> int:
    out = n
    for r in prime_factors(n):
        out = out // r * (r - 1)
    return out


def parse_poly(text: str) -> tuple[int, ...]:
    """``"2,1,1"`` -> ``(2, 1, 1)``; whitespace is ignored."""
    parts = [t for t in text.replace(" ", "").split(",") if t != ""]
    if not parts:
        raise ValueError(f"empty polynomial: {text!r}")
    return tuple(int(t) for t in parts)


def format_poly(coeffs) -> str:
    return ",".join(str(c) for c in coeffs)


# -- polynomials over Z/p, coefficient lists lowest degree first ------------

def _trim(a: list[int]) -> list[int]:
    while a and a[-1] == 0:
        a.pop()
    return a


def _polymod(a: list[int], m: list[int], p: int) -> list[int]:
    """Remainder of a modulo m (m need not be monic)."""
    a = _trim([c % p for c in a])
    m = _trim([c % p for c in m])
    inv_lead = pow(m[-1], p - 2, p)
    while len(a) >= len(m):
        shift = len(a) - len(m)
        f = a[-1] * inv_lead % p
        for i, c in enumerate(m):
            a[shift + i] = (a[shift + i] - f * c) % p
        _trim(a)
    return a


def _monic_polys(p: int, degree: int):
    """Monic polynomials of the given degree, lowest degree first.

    Iteration order is lexicographic on the coefficient tuple read from the
    highest non-leading degree down to the constant term.
    """
    for rest in itertools.product(range(p), repeat=degree):
        yield list(reversed(rest)) + [1]


def is_irreducible(poly, p: int) -> bool:
    poly = _trim([c % p for c in poly])
    deg = len(poly) - 1
    if deg <= 0:
        return False
    if deg == 1:
        return True
    if deg <= 3:
        return all(sum(c * pow(x, i, p) for i, c in enumerate(poly)) % p for x in range(p))
    for d in range(1, deg // 2 + 1):
        for f in _monic_polys(p, d):
            if not _polymod(list(poly), f, p):
                return False
    return True


def smallest_irreducible(p: int, e: int) -> tuple[int, ...]:
    for f in _monic_polys(p, e):
        if is_irreducible(f, p):
            return tuple(f)
    raise AssertionError("irreducible polynomials exist in every degree")


# -- the field ---------------------------------------------------------------

@dataclass(frozen=True)
class Field:
    p: int
    e: int
    modulus: tuple[int, ...]  # monic, length e + 1, lowest degree first

    @property
    def q(self) -> int:
        return self.p ** self.e

    def __repr__(self):
        return f"GF({self.p}^{self.e}, modulus={format_poly(self.modulus)})"

    def __call__(self, value) -> FieldElement:
        """Coerce an int, a coefficient sequence or a text token."""
        if isinstance(value, FieldElement):
            if value.field != self:
                raise FieldMismatch(f"{value!r} is not in {self!r}")
            return value
        if isinstance(value, str):
            value = parse_poly(value)
        if isinstance(value, int):
            value = (value,)
        coeffs = list(value)
        if len(coeffs) > self.e:
            coeffs = _polymod(coeffs, list(self.modulus), self.p)
        coeffs = [c % self.p for c in coeffs] + [0] * (self.e - len(coeffs))
        return FieldElement(tuple(coeffs[: self.e]), self)

    @property
    def zero(self) -> FieldElement:
        return self(0)

    @property
    def one(self) -> FieldElement:
        return self(1)

    @property
    def gen(self) -> FieldElement:
        """The class of x (equal to the residue 0 when e == 1 and modulus is x)."""
        return self((0, 1))

    def elements(self) -> list[FieldElement]:
        """All q elements, lexicographic on (c_0, c_1, ...)."""
        return [FieldElement(c, self) for c in itertools.product(range(self.p), repeat=self.e)]

    def nonzero(self) -> list[FieldElement]:
        return [a for a in self.elements() if a]


def make_field(p: int, e: int = 1, modulus=None) -> Field:
    """Build GF(p^e).

    Without ``modulus`` the lexicographically smallest monic irreducible
    polynomial of degree e is used (constant term compared last).
    """
    if not is_prime(p):
        raise CompositeCharacteristic(f"characteristic {p} is not prime")
    if e < 1:
        raise ValueError("extension degree must be >= 1")
    if p ** e > MAX_ORDER:
        raise ValueError(f"fields larger than {MAX_ORDER} are not supported")
    if modulus is None:
        mod = smallest_irreducible(p, e)
    else:
        if isinstance(modulus, str):
            modulus = parse_poly(modulus)
        mod = tuple(c % p for c in modulus)
        if len(mod) != e + 1 or mod[-1] != 1:
            raise ValueError(f"modulus {format_poly(modulus)} is not monic of degree {e}")
        if not is_irreducible(mod, p):
            raise ReducibleModulus(f"{format_poly(mod)} is reducible over GF({p})")
    return Field(p, e, mod)


def field_of_order(q: int, modulus=None) -> Field:
    pe = prime_power(q)
    if pe is None:
        raise CompositeCharacteristic(f"{q} is not a prime power")
    return make_field(pe[0], pe[1], modulus)


@dataclass(frozen=True, order=False)
class FieldElement:
    coeffs: tuple[int, ...]
    field: Field = field(repr=False)

    # ordering is lexicographic on coefficient vectors, low degree first
    def sort_key(self):
        return self.coeffs

    def __lt__(self, other):
        return self.coeffs < self._check(other).coeffs

    def __bool__(self):
        return any(self.coeffs)

    def __str__(self):
        return format_poly(self.coeffs)

    def __repr__(self):
        return f"<{self} in GF({self.field.q})>"

    def _check(self, other) -> FieldElement:
        if isinstance(other, int):
            return self.field(other)
        if not isinstance(other, FieldElement):
            return NotImplemented
        if other.field != self.field:
            raise FieldMismatch(f"{self!r} and {other!r} live in different fields")
        return other

    def __add__(self, other):
        other = self._check(other)
        if other is NotImplemented:
            return other
        p = self.field.p
        return FieldElement(tuple((a + b) % p for a, b in zip(self.coeffs, other.coeffs)), self.field)

    __radd__ = __add__

    def __neg__(self):
        p = self.field.p
        return FieldElement(tuple(-a % p for a in self.coeffs), self.field)

    def __sub__(self, other):
        other = self._check(other)
        if other is NotImplemented:
            return other
        return self + (-other)

    def __rsub__(self, other):
        return self._check(other) - self

    def __mul__(self, other):
        other = self._check(other)
        if other is NotImplemented:
            return other
        f = self.field
        prod = [0] * (2 * f.e - 1)
        for i, a in enumerate(self.coeffs):
            if a:
                for j, b in enumerate(other.coeffs):
                    prod[i + j] += a * b
        return f(_polymod(prod, list(f.modulus), f.p) if f.e > 1 else [prod[0] % f.p])

    __rmul__ = __mul__

    def inverse(self) -> FieldElement:
        if not self:
            raise DivisionByZero("0 has no inverse")
        return self ** (self.field.q - 2)

    def __truediv__(self, other):
        other = self._check(other)
        if other is NotImplemented:
            return other
        return self * other.inverse()

    def __rtruediv__(self, other):
        return self._check(other) / self

    def __pow__(self, k: int):
        if k < 0:
            if not self:
                raise DivisionByZero("0 raised to a negative power")
            return self.inverse() ** (-k)
        # 0**0 is 1 by convention
        result, base = self.field.one, self
        while k:
            if k & 1:
                result = result * base
            base = base * base
            k >>= 1
        return result

    def order(self) -> int:
        """Multiplicative order; raises on zero."""
        if not self:
            raise DivisionByZero("0 has no multiplicative order")
        n = self.field.q - 1
        for r in prime_factors(n):
            while n % r == 0 and (self ** (n // r)) == self.field.one:
                n //= r
        return n


def field_ops(a: FieldElement, b, op: str) -> FieldElement:
    """Dispatch one of add, sub, mul, div, pow, inv (b is ignored for inv)."""
    if op == "add":
        return a + b
    if op == "sub":
        return a - b
    if op == "mul":
        return a * b
    if op == "div":
        return a / b
    if op == "pow":
        return a ** b
    if op == "inv":
        return a.inverse()
    raise ValueError(f"unknown field operation {op!r}")


def primitive_elements(f: Field) -> list[FieldElement]:
    """Generators of the multiplicative group, in element order."""
    return [a for a in f.nonzero() if a.order() == f.q - 1]
