"""Sparse univariate and multivariate polynomials over a finite field.

Polynomials are maps from exponents (or exponent vectors) to nonzero field
elements. They are treated as immutable: all operations return new objects,
and instances hash by their term data so certificates can be cached.

deg(0) is -1 throughout.
"""

from __future__ import annotations

import functools
import itertools
from dataclasses import dataclass
from math import gcd

from .errors import (
    ArityMismatch,
    DomainTooLarge,
    DuplicateAbscissa,
    MixedFields,
    NotAPermutation,
    ParseError,
)
from .field import FieldCtx, FieldElement

EXHAUSTIVE_CAP = 1 << 20
INTERPOLATION_CAP = 1 << 12


class UniPoly:
    """Sparse univariate polynomial: {exponent: nonzero coefficient}."""

    __slots__ = ("ctx", "coeffs", "_hash")

    def __init__(self, ctx: FieldCtx, coeffs: dict):
        self.ctx = ctx
        clean = {}
        for e, c in coeffs.items():
            if e < 0:
                raise ValueError("negative exponent")
            c = ctx.element(c)
            if not c.is_zero():
                clean[int(e)] = c
        self.coeffs = clean
        self._hash = None

    @classmethod
    def monomial(cls, ctx: FieldCtx, e: int, c=1) -> "UniPoly":
        return cls(ctx, {e: c})

    @classmethod
    def x(cls, ctx: FieldCtx) -> "UniPoly":
        return cls(ctx, {1: 1})

    @classmethod
    def constant(cls, ctx: FieldCtx, c) -> "UniPoly":
        return cls(ctx, {0: c})

    @classmethod
    def from_coeffs(cls, ctx: FieldCtx, coeffs) -> "UniPoly":
        """Dense low-to-high coefficient list."""
        return cls(ctx, {e: c for e, c in enumerate(coeffs)})

    def degree(self) -> int:
        return max(self.coeffs) if self.coeffs else -1

    def is_zero(self) -> bool:
        return not self.coeffs

    def leading_coeff(self) -> FieldElement:
        if not self.coeffs:
            return self.ctx.zero
        return self.coeffs[max(self.coeffs)]

    def eval(self, x: FieldElement) -> FieldElement:
        """Horner evaluation over the sparse exponent gaps."""
        x = self.ctx.element(x)
        if not self.coeffs:
            return self.ctx.zero
        exps = sorted(self.coeffs, reverse=True)
        acc = self.coeffs[exps[0]]
        prev = exps[0]
        for e in exps[1:]:
            acc = acc * x ** (prev - e) + self.coeffs[e]
            prev = e
        if prev > 0:
            acc = acc * x**prev
        return acc

    def __add__(self, other: "UniPoly") -> "UniPoly":
        if self.ctx != other.ctx:
            raise MixedFields("polynomials over different fields")
        out = dict(self.coeffs)
        for e, c in other.coeffs.items():
            out[e] = out[e] + c if e in out else c
        return UniPoly(self.ctx, out)

    def __sub__(self, other: "UniPoly") -> "UniPoly":
        return self + other.scale(-1)

    def __mul__(self, other: "UniPoly") -> "UniPoly":
        if self.ctx != other.ctx:
            raise MixedFields("polynomials over different fields")
        out: dict[int, FieldElement] = {}
        for e1, c1 in self.coeffs.items():
            for e2, c2 in other.coeffs.items():
                e = e1 + e2
                t = c1 * c2
                out[e] = out[e] + t if e in out else t
        return UniPoly(self.ctx, out)

    def scale(self, c) -> "UniPoly":
        c = self.ctx.element(c)
        return UniPoly(self.ctx, {e: v * c for e, v in self.coeffs.items()})

    def __eq__(self, other) -> bool:
        return (
            isinstance(other, UniPoly)
            and self.ctx == other.ctx
            and self.coeffs == other.coeffs
        )

    def __hash__(self) -> int:
        if self._hash is None:
            items = tuple(sorted((e, c.coeffs) for e, c in self.coeffs.items()))
            self._hash = hash((self.ctx.q, items))
        return self._hash

    def __repr__(self) -> str:
        if not self.coeffs:
            return "0"
        parts = []
        for e in sorted(self.coeffs, reverse=True):
            c = self.coeffs[e]
            if e == 0:
                parts.append(f"{c!r}")
            elif e == 1:
                parts.append(f"{c!r}*x" if c != self.ctx.one else "x")
            else:
                parts.append(f"{c!r}*x^{e}" if c != self.ctx.one else f"x^{e}")
        return " + ".join(parts)


class MultiPoly:
    """Sparse multivariate polynomial: {exponent vector: nonzero coefficient}."""

    __slots__ = ("ctx", "nvars", "terms", "_hash")

    def __init__(self, ctx: FieldCtx, nvars: int, terms: dict):
        if nvars < 1:
            raise ValueError("nvars must be >= 1")
        self.ctx = ctx
        self.nvars = nvars
        clean = {}
        for exps, c in terms.items():
            exps = tuple(int(e) for e in exps)
            if len(exps) != nvars:
                raise ArityMismatch(f"exponent vector {exps} has wrong length")
            if any(e < 0 for e in exps):
                raise ValueError("negative exponent")
            c = ctx.element(c)
            if not c.is_zero():
                clean[exps] = clean[exps] + c if exps in clean else c
        self.terms = {e: c for e, c in clean.items() if not c.is_zero()}
        self._hash = None

    @classmethod
    def constant(cls, ctx: FieldCtx, nvars: int, c) -> "MultiPoly":
        return cls(ctx, nvars, {(0,) * nvars: c})

    @classmethod
    def variable(cls, ctx: FieldCtx, nvars: int, j: int) -> "MultiPoly":
        exps = [0] * nvars
        exps[j] = 1
        return cls(ctx, nvars, {tuple(exps): 1})

    @classmethod
    def from_uni(cls, f: UniPoly, var: int, nvars: int) -> "MultiPoly":
        """Embed a univariate polynomial as a polynomial in variable `var`."""
        terms = {}
        for e, c in f.coeffs.items():
            exps = [0] * nvars
            exps[var] = e
            terms[tuple(exps)] = c
        return cls(f.ctx, nvars, terms)

    def used_vars(self) -> set[int]:
        used = set()
        for exps in self.terms:
            for j, e in enumerate(exps):
                if e > 0:
                    used.add(j)
        return used

    def total_degree(self) -> int:
        return max((sum(e) for e in self.terms), default=-1)

    def is_zero(self) -> bool:
        return not self.terms

    def eval(self, xs) -> FieldElement:
        if len(xs) != self.nvars:
            raise ArityMismatch(f"expected {self.nvars} values, got {len(xs)}")
        acc = self.ctx.zero
        for exps, c in self.terms.items():
            t = c
            for x, e in zip(xs, exps):
                if e:
                    t = t * x**e
            acc = acc + t
        return acc

    def scale(self, c) -> "MultiPoly":
        c = self.ctx.element(c)
        return MultiPoly(self.ctx, self.nvars, {e: v * c for e, v in self.terms.items()})

    def __add__(self, other: "MultiPoly") -> "MultiPoly":
        if self.ctx != other.ctx or self.nvars != other.nvars:
            raise MixedFields("incompatible polynomials")
        out = dict(self.terms)
        for e, c in other.terms.items():
            out[e] = out[e] + c if e in out else c
        return MultiPoly(self.ctx, self.nvars, out)

    def remap_vars(self, mapping: dict[int, int], nvars_new: int) -> "MultiPoly":
        """Move variable j to position mapping[j] in a wider polynomial."""
        terms = {}
        for exps, c in self.terms.items():
            new = [0] * nvars_new
            for j, e in enumerate(exps):
                if e:
                    new[mapping[j]] += e
            key = tuple(new)
            terms[key] = terms[key] + c if key in terms else c
        return MultiPoly(self.ctx, nvars_new, terms)

    def __eq__(self, other) -> bool:
        return (
            isinstance(other, MultiPoly)
            and self.ctx == other.ctx
            and self.nvars == other.nvars
            and self.terms == other.terms
        )

    def __hash__(self) -> int:
        if self._hash is None:
            items = tuple(sorted((e, c.coeffs) for e, c in self.terms.items()))
            self._hash = hash((self.ctx.q, self.nvars, items))
        return self._hash

    def __repr__(self) -> str:
        if not self.terms:
            return "0"
        parts = []
        for exps in sorted(self.terms, reverse=True):
            mono = "*".join(f"x{j + 1}^{e}" if e > 1 else f"x{j + 1}" for j, e in enumerate(exps) if e)
            c = self.terms[exps]
            parts.append(f"{c!r}*{mono}" if mono else f"{c!r}")
        return " + ".join(parts)


# -- reduction mod (x^q - x) ------------------------------------------------


def _reduce_exp(e: int, q: int) -> int:
    # pointwise-safe representative: x^q == x also at 0, so e = 0 stays
    if e == 0:
        return 0
    return (e - 1) % (q - 1) + 1 if q > 2 else min(e, 1)


def reduce_mod(f):
    """Reduce every exponent mod (x^q - x); pointwise values are unchanged."""
    q = f.ctx.q
    if isinstance(f, UniPoly):
        out: dict[int, FieldElement] = {}
        for e, c in f.coeffs.items():
            r = _reduce_exp(e, q)
            out[r] = out[r] + c if r in out else c
        return UniPoly(f.ctx, out)
    out = {}
    for exps, c in f.terms.items():
        r = tuple(_reduce_exp(e, q) for e in exps)
        out[r] = out[r] + c if r in out else c
    return MultiPoly(f.ctx, f.nvars, out)


# -- permutation polynomials --------------------------------------------------


def is_permutation_polynomial(f: UniPoly) -> bool:
    """Bijection test: gcd shortcut for monomials, exhaustive image otherwise."""
    q = f.ctx.q
    if not f.coeffs:
        return False
    if len(f.coeffs) == 1:
        (e,) = f.coeffs
        if e == 0:
            return False
        return gcd(e, q - 1) == 1
    if q > EXHAUSTIVE_CAP:
        raise DomainTooLarge(f"image check over q = {q} exceeds cap")
    seen = bytearray(q)
    ctx = f.ctx
    for x in ctx.elements():
        i = ctx.index(f.eval(x))
        if seen[i]:
            return False
        seen[i] = 1
    return True


def invert_permutation_polynomial(f: UniPoly) -> UniPoly:
    """Inverse permutation polynomial, reduced mod (x^q - x).

    Monomials c*x^d invert in closed form through d^-1 mod (q-1); anything
    else goes through Lagrange interpolation of the graph {(f(x), x)}.
    """
    if not is_permutation_polynomial(f):
        raise NotAPermutation(detail=repr(f))
    ctx = f.ctx
    q = ctx.q
    if len(f.coeffs) == 1:
        ((d, c),) = f.coeffs.items()
        einv = 1 if q == 2 else pow(d, -1, q - 1)
        coeff = ctx.pow(c.inverse(), einv)
        return UniPoly(ctx, {einv: coeff})
    if q > INTERPOLATION_CAP:
        raise DomainTooLarge(f"interpolation over q = {q} exceeds cap")
    points = [(f.eval(x), x) for x in ctx.elements()]
    return interpolate(ctx, points)


def interpolate(ctx: FieldCtx, points) -> UniPoly:
    """Unique polynomial of degree < len(points) through the given points."""
    xs = [ctx.element(x) for x, _ in points]
    ys = [ctx.element(y) for _, y in points]
    if len({x.coeffs for x in xs}) != len(xs):
        raise DuplicateAbscissa("repeated x coordinate")
    k = len(xs)
    if k == 0:
        return UniPoly(ctx, {})
    # master polynomial prod (x - x_i), dense low-to-high
    z = [ctx.one]
    for xi in xs:
        z = [ctx.zero] + z
        for j in range(len(z) - 1):
            z[j] = z[j] - z[j + 1] * xi
    acc = [ctx.zero] * k
    for xi, yi in zip(xs, ys):
        # synthetic division of z by (x - xi)
        num = [ctx.zero] * k
        num[k - 1] = z[k]
        for j in range(k - 1, 0, -1):
            num[j - 1] = z[j] + num[j] * xi
        # evaluate the numerator at xi (dense Horner)
        denom = num[k - 1]
        for j in range(k - 2, -1, -1):
            denom = denom * xi + num[j]
        w = yi * denom.inverse()
        for j in range(k):
            acc[j] = acc[j] + num[j] * w
    return UniPoly(ctx, {e: c for e, c in enumerate(acc)})


@dataclass(frozen=True)
class PermPolyCert:
    """Inverse-permutation certificate: how it was found plus both degrees
    taken after reduction mod (x^q - x)."""

    kind: str  # "monomial_gcd" | "exhaustive"
    inverse: UniPoly
    deg_f: int
    deg_finv: int


@functools.lru_cache(maxsize=4096)
def perm_poly_certificate(f: UniPoly) -> PermPolyCert:
    kind = "monomial_gcd" if len(f.coeffs) == 1 else "exhaustive"
    finv = invert_permutation_polynomial(f)
    return PermPolyCert(
        kind=kind,
        inverse=finv,
        deg_f=reduce_mod(f).degree(),
        deg_finv=reduce_mod(finv).degree(),
    )


# -- zero-freeness -----------------------------------------------------------


@dataclass(frozen=True)
class NoZerosResult:
    no_zeros: bool
    method: str  # "certificate" | "exhaustive"
    witness: tuple | None = None  # a zero, when one exists and was found by scan

    def __bool__(self) -> bool:
        return self.no_zeros


def _as_univariate(g) -> tuple[UniPoly, int] | None:
    """View g as a polynomial in a single variable, if it uses at most one."""
    if isinstance(g, UniPoly):
        return g, 0
    used = g.used_vars()
    if len(used) > 1:
        return None
    var = used.pop() if used else 0
    coeffs = {exps[var]: c for exps, c in g.terms.items()}
    return UniPoly(g.ctx, coeffs), var


def has_no_zeros(g, ctx: FieldCtx | None = None) -> NoZerosResult:
    """Decide whether g vanishes anywhere on F_q^nvars.

    Certificate paths: nonzero constants, univariate linears (always have a
    root), and univariate quadratics over odd prime fields via the
    discriminant/quadratic-residue test. Everything else is an exhaustive
    scan over the variables that actually occur (capped at 2^20 points).
    """
    ctx = ctx or g.ctx
    uni = _as_univariate(g)
    if uni is not None:
        u, _ = uni
        d = u.degree()
        if d <= 0:
            return NoZerosResult(not u.is_zero(), "certificate")
        if d == 1:
            return NoZerosResult(False, "certificate")
        if d == 2 and ctx.m == 1 and ctx.p != 2:
            a = u.coeffs.get(2, ctx.zero)
            b = u.coeffs.get(1, ctx.zero)
            c = u.coeffs.get(0, ctx.zero)
            disc = b * b - a * c * 4
            return NoZerosResult(not ctx.is_quadratic_residue(disc), "certificate")
        if ctx.q > EXHAUSTIVE_CAP:
            raise DomainTooLarge(f"scan over q = {ctx.q} exceeds cap")
        for x in ctx.elements():
            if u.eval(x).is_zero():
                return NoZerosResult(False, "exhaustive", witness=(x,))
        return NoZerosResult(True, "exhaustive")
    used = sorted(g.used_vars())
    if ctx.q ** len(used) > EXHAUSTIVE_CAP:
        raise DomainTooLarge(f"scan over q^{len(used)} exceeds cap")
    zero = ctx.zero
    for assignment in itertools.product(list(ctx.elements()), repeat=len(used)):
        xs = [zero] * g.nvars
        for j, v in zip(used, assignment):
            xs[j] = v
        if g.eval(xs).is_zero():
            return NoZerosResult(False, "exhaustive", witness=tuple(xs))
    return NoZerosResult(True, "exhaustive")


# -- JSON codec ----------------------------------------------------------------


def _coeff_to_json(c: FieldElement):
    return c.coeffs[0] if c.ctx.m == 1 else list(c.coeffs)


def poly_to_json(f) -> dict:
    if isinstance(f, UniPoly):
        return {"uni": {str(e): _coeff_to_json(c) for e, c in sorted(f.coeffs.items())}}
    return {
        "multi": [
            {"exps": list(exps), "coeff": _coeff_to_json(c)}
            for exps, c in sorted(f.terms.items())
        ],
        "nvars": f.nvars,
    }


def poly_from_json(doc, ctx: FieldCtx, nvars: int | None = None):
    """Decode {"uni": {...}} or {"multi": [...], "nvars": n}."""
    if not isinstance(doc, dict):
        raise ParseError("polynomial must be a JSON object")
    try:
        if "uni" in doc:
            return UniPoly(ctx, {int(e): _coeff_from_json(c, ctx) for e, c in doc["uni"].items()})
        if "multi" in doc:
            terms = doc["multi"]
            width = doc.get("nvars", nvars)
            if width is None:
                if not terms:
                    raise ParseError("empty multivariate polynomial needs 'nvars'")
                width = len(terms[0]["exps"])
            out = {}
            for t in terms:
                exps = tuple(int(e) for e in t["exps"])
                if len(exps) != width:
                    raise ParseError("inconsistent exponent vector lengths")
                out[exps] = _coeff_from_json(t["coeff"], ctx)
            return MultiPoly(ctx, int(width), out)
    except ParseError:
        raise
    except (ValueError, TypeError, KeyError, AttributeError, ArityMismatch) as exc:
        raise ParseError(f"bad polynomial: {exc}") from exc
    raise ParseError("polynomial needs a 'uni' or 'multi' key")


def _coeff_from_json(c, ctx: FieldCtx) -> FieldElement:
    if isinstance(c, list):
        return ctx.element(c)
    return ctx.element(int(c))
