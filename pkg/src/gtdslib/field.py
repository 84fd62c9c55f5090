"""Exact arithmetic in prime fields F_p and small extensions F_{p^m}.

Elements are immutable coefficient vectors over F_p in the polynomial basis
of a user-supplied monic irreducible modulus (no built-in modulus tables).
Prime fields allow p up to 2^31; extension fields are capped at q = p^m
<= 2^20 so that the irreducibility check and exhaustive sweeps stay cheap.
"""

from __future__ import annotations

import cmath
from math import isqrt
from typing import Iterator

from .errors import (
    DivisionByZero,
    MixedFields,
    OddPrimeRequired,
    ParseError,
)

PRIME_CAP = 1 << 31
EXTENSION_CAP = 1 << 20


def is_prime(n: int) -> bool:
    """Trial-division primality test (sufficient below 2^31)."""
    if n < 2:
        return False
    if n < 4:
        return True
    if n % 2 == 0:
        return False
    for d in range(3, isqrt(n) + 1, 2):
        if n % d == 0:
            return False
    return True


def _poly_divmod(num: list[int], den: list[int], p: int) -> tuple[list[int], list[int]]:
    # dense coefficient lists over F_p, low-to-high; den must be nonzero
    num = list(num)
    dd = len(den) - 1
    while den[dd] == 0:
        dd -= 1
    inv_lead = pow(den[dd], -1, p)
    quot = [0] * max(len(num) - dd, 1)
    for k in range(len(num) - 1 - dd, -1, -1):
        c = num[k + dd] % p
        if c == 0:
            continue
        c = (c * inv_lead) % p
        quot[k] = c
        for j in range(dd + 1):
            num[k + j] = (num[k + j] - c * den[j]) % p
    while len(num) > 1 and num[-1] == 0:
        num.pop()
    return quot, num


def _irreducible(modulus: tuple[int, ...], p: int) -> bool:
    """Check irreducibility by trial division with every monic polynomial
    of degree up to deg/2 (fields here are small enough to enumerate)."""
    deg = len(modulus) - 1
    for d in range(1, deg // 2 + 1):
        # all monic degree-d divisor candidates
        for idx in range(p**d):
            cand = []
            t = idx
            for _ in range(d):
                cand.append(t % p)
                t //= p
            cand.append(1)
            _, rem = _poly_divmod(list(modulus), cand, p)
            if rem == [0]:
                return False
    return True


class FieldCtx:
    """A finite field F_q with q = p^m, p prime.

    For m > 1 a monic degree-m modulus (coefficients low-to-high, length
    m + 1) must be supplied and is verified irreducible over F_p.
    """

    __slots__ = ("p", "m", "q", "modulus", "_fold", "_hash")

    def __init__(self, p: int, m: int = 1, modulus: list[int] | tuple[int, ...] | None = None):
        if not isinstance(p, int) or p >= PRIME_CAP:
            raise ValueError(f"p = {p} exceeds the single-word cap 2^31")
        if not is_prime(p):
            raise ValueError(f"p = {p} is not prime")
        if m < 1:
            raise ValueError("extension degree must be >= 1")
        q = p**m
        if m > 1 and q > EXTENSION_CAP:
            raise ValueError(f"extension field size {q} exceeds cap 2^20")
        if m == 1:
            if modulus is not None:
                raise ValueError("prime field takes no modulus")
            self.modulus = None
        else:
            if modulus is None:
                raise ValueError("extension field requires a modulus polynomial")
            mod = tuple(c % p for c in modulus)
            if len(mod) != m + 1 or mod[-1] != 1:
                raise ValueError("modulus must be monic of degree m")
            if not _irreducible(mod, p):
                raise ValueError("modulus polynomial is reducible over F_p")
            self.modulus = mod
        self.p = p
        self.m = m
        self.q = q
        # x^(m+k) mod modulus for k = 0..m-2, used to fold products
        if m > 1:
            fold = []
            cur = [(-c) % p for c in self.modulus[:-1]]  # x^m
            fold.append(tuple(cur))
            for _ in range(m - 2):
                nxt = [0] + cur[:-1]
                top = cur[-1]
                if top:
                    for j in range(m):
                        nxt[j] = (nxt[j] - top * self.modulus[j]) % p
                cur = [c % p for c in nxt]
                fold.append(tuple(cur))
            self._fold = tuple(fold)
        else:
            self._fold = ()
        self._hash = hash((p, m, self.modulus))

    def __eq__(self, other) -> bool:
        if self is other:
            return True
        return (
            isinstance(other, FieldCtx)
            and self.p == other.p
            and self.m == other.m
            and self.modulus == other.modulus
        )

    def __hash__(self) -> int:
        return self._hash

    def __repr__(self) -> str:
        if self.m == 1:
            return f"FieldCtx(p={self.p})"
        return f"FieldCtx(p={self.p}, m={self.m}, modulus={list(self.modulus)})"

    # -- element construction -------------------------------------------

    def element(self, value) -> FieldElement:
        """Coerce an int, coefficient sequence, or FieldElement into this field."""
        if isinstance(value, FieldElement):
            if value.ctx != self:
                raise MixedFields("element belongs to a different field")
            return value
        if isinstance(value, int):
            if self.m == 1:
                return FieldElement(self, (value % self.p,))
            return self.from_index(value % self.q)
        coeffs = tuple(int(c) % self.p for c in value)
        if len(coeffs) != self.m:
            raise ValueError(f"expected {self.m} coefficients, got {len(coeffs)}")
        return FieldElement(self, coeffs)

    @property
    def zero(self) -> FieldElement:
        return FieldElement(self, (0,) * self.m)

    @property
    def one(self) -> FieldElement:
        return FieldElement(self, (1,) + (0,) * (self.m - 1))

    def from_index(self, i: int) -> FieldElement:
        """Element with base-p digit expansion i = sum coeffs[k] * p^k."""
        if not 0 <= i < self.q:
            raise ValueError(f"index {i} out of range for q = {self.q}")
        coeffs = []
        for _ in range(self.m):
            coeffs.append(i % self.p)
            i //= self.p
        return FieldElement(self, tuple(coeffs))

    def index(self, a: FieldElement) -> int:
        """Inverse of from_index."""
        i = 0
        for c in reversed(a.coeffs):
            i = i * self.p + c
        return i

    def elements(self) -> Iterator[FieldElement]:
        for i in range(self.q):
            yield self.from_index(i)

    # -- arithmetic kernels ----------------------------------------------

    def _mul(self, a: tuple[int, ...], b: tuple[int, ...]) -> tuple[int, ...]:
        p, m = self.p, self.m
        if m == 1:
            return ((a[0] * b[0]) % p,)
        prod = [0] * (2 * m - 1)
        for i, ai in enumerate(a):
            if ai:
                for j, bj in enumerate(b):
                    prod[i + j] += ai * bj
        out = [c % p for c in prod[:m]]
        for k in range(m - 1):
            c = prod[m + k] % p
            if c:
                red = self._fold[k]
                for j in range(m):
                    out[j] = (out[j] + c * red[j]) % p
        return tuple(out)

    def inv(self, a: FieldElement) -> FieldElement:
        """Multiplicative inverse via extended Euclid (int or polynomial)."""
        if a.is_zero():
            raise DivisionByZero("inverse of zero")
        if self.m == 1:
            return FieldElement(self, (pow(a.coeffs[0], -1, self.p),))
        # polynomial xgcd of a against the modulus
        p = self.p
        r0, r1 = list(self.modulus), list(a.coeffs)
        while len(r1) > 1 and r1[-1] == 0:
            r1.pop()
        s0, s1 = [0], [1]
        while r1 != [0]:
            q, r = _poly_divmod(r0, r1, p)
            # s0 - q*s1
            prod = [0] * (len(q) + len(s1) - 1)
            for i, qi in enumerate(q):
                if qi:
                    for j, sj in enumerate(s1):
                        prod[i + j] = (prod[i + j] + qi * sj) % p
            news = [0] * max(len(s0), len(prod))
            for i, c in enumerate(s0):
                news[i] = c
            for i, c in enumerate(prod):
                news[i] = (news[i] - c) % p
            while len(news) > 1 and news[-1] == 0:
                news.pop()
            r0, r1, s0, s1 = r1, r, s1, news
        # r0 is the gcd, a nonzero constant since the modulus is irreducible
        scale = pow(r0[0], -1, p)
        inv = [(c * scale) % p for c in s0]
        inv += [0] * (self.m - len(inv))
        return FieldElement(self, tuple(inv[: self.m]))

    def pow(self, a: FieldElement, e: int) -> FieldElement:
        """Square-and-multiply power; 0^0 is defined as 1."""
        if e < 0:
            raise ValueError("negative exponent; use inv() first")
        result = self.one
        base = a
        while e:
            if e & 1:
                result = result * base
            base = base * base
            e >>= 1
        return result

    # -- trace, characters, residues --------------------------------------

    def trace(self, a: FieldElement) -> int:
        """Absolute trace Tr(a) = sum of a^(p^i), returned as a residue mod p."""
        if a.ctx != self:
            raise MixedFields("element belongs to a different field")
        if self.m == 1:
            return a.coeffs[0]
        acc = a
        frob = a
        for _ in range(self.m - 1):
            frob = self.pow(frob, self.p)
            acc = acc + frob
        # the trace lands in the prime subfield
        assert all(c == 0 for c in acc.coeffs[1:]), "trace left the prime subfield"
        return acc.coeffs[0]

    def additive_character(self, a: FieldElement) -> complex:
        """Canonical additive character chi_1(a) = exp(2*pi*i*Tr(a)/p)."""
        return cmath.exp(2j * cmath.pi * self.trace(a) / self.p)

    def is_quadratic_residue(self, a: FieldElement) -> bool:
        """Euler criterion; zero counts as a residue. Odd prime fields only."""
        if self.m != 1 or self.p == 2:
            raise OddPrimeRequired("quadratic residue test needs an odd prime field")
        v = a.coeffs[0]
        if v == 0:
            return True
        return pow(v, (self.p - 1) // 2, self.p) == 1


class FieldElement:
    """Immutable element of a :class:`FieldCtx`.

    Arithmetic operators accept another element of the same field or a
    plain int (coerced mod p). ``a.value`` gives the residue for m = 1.
    """

    __slots__ = ("ctx", "coeffs")

    def __init__(self, ctx: FieldCtx, coeffs: tuple[int, ...]):
        self.ctx = ctx
        self.coeffs = coeffs

    @property
    def value(self) -> int:
        if self.ctx.m != 1:
            raise ValueError("value is only defined for prime fields; use index()")
        return self.coeffs[0]

    def index(self) -> int:
        return self.ctx.index(self)

    def is_zero(self) -> bool:
        return all(c == 0 for c in self.coeffs)

    def _coerce(self, other) -> "FieldElement":
        if isinstance(other, FieldElement):
            if other.ctx != self.ctx:
                raise MixedFields("operands from different fields")
            return other
        if isinstance(other, int):
            return self.ctx.element(other)
        return NotImplemented

    def __add__(self, other):
        o = self._coerce(other)
        if o is NotImplemented:
            return NotImplemented
        p = self.ctx.p
        return FieldElement(self.ctx, tuple((a + b) % p for a, b in zip(self.coeffs, o.coeffs)))

    __radd__ = __add__

    def __sub__(self, other):
        o = self._coerce(other)
        if o is NotImplemented:
            return NotImplemented
        p = self.ctx.p
        return FieldElement(self.ctx, tuple((a - b) % p for a, b in zip(self.coeffs, o.coeffs)))

    def __rsub__(self, other):
        o = self._coerce(other)
        if o is NotImplemented:
            return NotImplemented
        return o - self

    def __mul__(self, other):
        o = self._coerce(other)
        if o is NotImplemented:
            return NotImplemented
        return FieldElement(self.ctx, self.ctx._mul(self.coeffs, o.coeffs))

    __rmul__ = __mul__

    def __neg__(self):
        p = self.ctx.p
        return FieldElement(self.ctx, tuple((-c) % p for c in self.coeffs))

    def __pow__(self, e: int):
        return self.ctx.pow(self, e)

    def inverse(self) -> "FieldElement":
        return self.ctx.inv(self)

    def __truediv__(self, other):
        o = self._coerce(other)
        if o is NotImplemented:
            return NotImplemented
        return self * o.inverse()

    def __eq__(self, other) -> bool:
        if isinstance(other, int):
            other = self.ctx.element(other)
        return (
            isinstance(other, FieldElement)
            and self.ctx == other.ctx
            and self.coeffs == other.coeffs
        )

    def __hash__(self) -> int:
        return hash((self.coeffs, self.ctx.q))

    def __repr__(self) -> str:
        if self.ctx.m == 1:
            return str(self.coeffs[0])
        return str(list(self.coeffs))


# -- JSON codec -----------------------------------------------------------


def field_to_json(ctx: FieldCtx) -> dict:
    doc: dict = {"p": ctx.p, "m": ctx.m}
    if ctx.modulus is not None:
        doc["modulus"] = list(ctx.modulus)
    return doc


def field_from_json(doc) -> FieldCtx:
    if not isinstance(doc, dict) or "p" not in doc:
        raise ParseError("field description must be an object with a 'p' key")
    try:
        p = int(doc["p"])
        m = int(doc.get("m", 1))
        modulus = doc.get("modulus")
        return FieldCtx(p, m, modulus)
    except ParseError:
        raise
    except (ValueError, TypeError) as exc:
        raise ParseError(f"bad field description: {exc}") from exc
