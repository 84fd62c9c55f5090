"""Triangular dynamical systems over F_q^n: build, evaluate, invert.

A system has n ordered branches

    y_i = p_i(x_i) * g_i(x_{i+1..n}) + h_i(x_{i+1..n})   (i < n)
    y_n = p_n(x_n)

with every p_i a permutation polynomial and every g_i free of zeros, which
makes the map a bijection of F_q^n invertible branch by branch from the
bottom. Systems whose multipliers depend on *earlier* variables (Bricks-style)
are handled by the `flip` flag: branch data is stored in reversed variable
order and evaluation conjugates by the reversal permutation.
"""

from __future__ import annotations

import itertools
from typing import Callable, NamedTuple, Sequence

from .errors import (
    ArityMismatch,
    DomainTooLarge,
    GiHasZero,
    NotAPermutation,
    ParseError,
    VariableOutOfScope,
)
from .field import FieldCtx, FieldElement, field_from_json, field_to_json
from .polynomial import (
    MultiPoly,
    UniPoly,
    has_no_zeros,
    is_permutation_polynomial,
    perm_poly_certificate,
    poly_from_json,
    poly_to_json,
)

EXHAUSTIVE_CAP = 1 << 20

State = tuple[FieldElement, ...]


class Branch(NamedTuple):
    p: UniPoly
    g: MultiPoly
    h: MultiPoly


class Gtds:
    """Validated triangular dynamical system (see module docstring).

    Construction validates the side conditions eagerly; `Gtds.unchecked`
    skips that (useful as a negative control when probing what the
    conditions buy). Instances are immutable once built.
    """

    def __init__(
        self,
        ctx: FieldCtx,
        branches: Sequence[Branch | tuple],
        p_last: UniPoly,
        flip: bool = False,
        _validate: bool = True,
    ):
        self.ctx = ctx
        self.branches = tuple(Branch(*b) for b in branches)
        self.p_last = p_last
        self.n = len(self.branches) + 1
        self.flip = flip
        self._inv_cache: list[UniPoly] | None = None
        self.validated = False
        if _validate:
            self._validate()
            self.validated = True

    @classmethod
    def unchecked(cls, ctx, branches, p_last, flip=False) -> "Gtds":
        return cls(ctx, branches, p_last, flip=flip, _validate=False)

    def _validate(self) -> None:
        n = self.n
        for i, br in enumerate(self.branches):
            label = i + 1  # 1-based, in stored (core) order
            if not is_permutation_polynomial(br.p):
                raise NotAPermutation(label)
            for poly, name in ((br.g, "g"), (br.h, "h")):
                if poly.nvars != n:
                    raise ArityMismatch(f"{name}_{label} must be over {n} variables")
                bad = {v for v in poly.used_vars() if v <= i}
                if bad:
                    raise VariableOutOfScope(label, detail=f"{name} uses x{min(bad) + 1}")
            if not has_no_zeros(br.g, self.ctx):
                raise GiHasZero(label)
        if not is_permutation_polynomial(self.p_last):
            raise NotAPermutation(n)

    # -- branch hooks (overridden by feed-forward variants) ------------------

    def _brackets(self, i: int, xs: list, ys: list) -> tuple[FieldElement, FieldElement]:
        """Multiplier and offset for branch i; sees x_{i+1..n} and y_{i+1..n}."""
        br = self.branches[i]
        return br.g.eval(xs), br.h.eval(xs)

    @property
    def branch_perm_polys(self) -> list[UniPoly]:
        """p_1..p_n in stored (core) order."""
        return [br.p for br in self.branches] + [self.p_last]

    def _inverse_polys(self) -> list[UniPoly]:
        if self._inv_cache is None:
            self._inv_cache = [perm_poly_certificate(p).inverse for p in self.branch_perm_polys]
        return self._inv_cache

    # -- evaluation ------------------------------------------------------------

    def _coerce_state(self, xs) -> list[FieldElement]:
        if len(xs) != self.n:
            raise ArityMismatch(f"expected {self.n} components, got {len(xs)}")
        return [self.ctx.element(x) for x in xs]

    def eval(self, xs) -> State:
        xs = self._coerce_state(xs)
        if self.flip:
            xs.reverse()
        n = self.n
        ys: list = [None] * n
        ys[n - 1] = self.p_last.eval(xs[n - 1])
        for i in range(n - 2, -1, -1):
            g_val, h_val = self._brackets(i, xs, ys)
            ys[i] = self.branches[i].p.eval(xs[i]) * g_val + h_val
        if self.flip:
            ys.reverse()
        return tuple(ys)

    def invert(self, ys, use_power_inverse: bool = False) -> State:
        """Preimage, recovered bottom-up.

        Field division normally goes through extended-gcd inversion; with
        `use_power_inverse` the multiplier is raised to the q-2 power
        instead (the closed-form inverse system), kept for conformance
        testing of the two routes.
        """
        ys = self._coerce_state(ys)
        if self.flip:
            ys.reverse()
        n = self.n
        inv_polys = self._inverse_polys()
        zero = self.ctx.zero
        xs: list = [zero] * n
        xs[n - 1] = inv_polys[n - 1].eval(ys[n - 1])
        qm2 = self.ctx.q - 2
        for i in range(n - 2, -1, -1):
            g_val, h_val = self._brackets(i, xs, ys)
            g_inv = self.ctx.pow(g_val, qm2) if use_power_inverse else g_val.inverse()
            xs[i] = inv_polys[i].eval((ys[i] - h_val) * g_inv)
        if self.flip:
            xs.reverse()
        return tuple(xs)

    def __call__(self, xs) -> State:
        return self.eval(xs)

    def stage_json(self) -> dict:
        """Encoding used when this system appears inside a cipher pipeline."""
        return {"gtds": gtds_to_json(self, include_field=False)}


def build_gtds(ctx: FieldCtx, branches, p_last: UniPoly, flip: bool = False) -> Gtds:
    """Build and validate a triangular system (alias for the constructor)."""
    return Gtds(ctx, branches, p_last, flip=flip)


# -- state codecs -------------------------------------------------------------

# States encode big-endian: x_1 is the most significant base-q digit, so
# lexicographic tuple order equals numeric index order.


def state_index(ctx: FieldCtx, xs) -> int:
    i = 0
    for x in xs:
        i = i * ctx.q + ctx.index(x)
    return i


def state_from_index(ctx: FieldCtx, n: int, i: int) -> State:
    out = []
    for _ in range(n):
        out.append(ctx.from_index(i % ctx.q))
        i //= ctx.q
    return tuple(reversed(out))


def all_states(ctx: FieldCtx, n: int):
    """All of F_q^n in index order."""
    elems = list(ctx.elements())
    return itertools.product(elems, repeat=n)


# -- exhaustive checks ---------------------------------------------------------


def exhaustive_bijection_check(
    fn: Callable[[State], State], ctx: FieldCtx, n: int, max_domain: int = EXHAUSTIVE_CAP
) -> bool:
    """True iff fn hits every point of F_q^n exactly once."""
    size = ctx.q**n
    if size > max_domain:
        raise DomainTooLarge(f"domain {size} exceeds cap {max_domain}")
    seen = bytearray(size)
    for xs in all_states(ctx, n):
        j = state_index(ctx, fn(xs))
        if seen[j]:
            return False
        seen[j] = 1
    return True


def is_orthogonal_exhaustive(F: Gtds, max_domain: int = EXHAUSTIVE_CAP) -> bool:
    """Brute-force check that the system permutes F_q^n."""
    return exhaustive_bijection_check(F.eval, F.ctx, F.n, max_domain)


# -- JSON codec ----------------------------------------------------------------


def gtds_to_json(F: Gtds, include_field: bool = True) -> dict:
    doc: dict = {}
    if include_field:
        doc["field"] = field_to_json(F.ctx)
    doc["n"] = F.n
    doc["branches"] = [
        {"p": poly_to_json(br.p), "g": poly_to_json(br.g), "h": poly_to_json(br.h)}
        for br in F.branches
    ]
    doc["p_last"] = poly_to_json(F.p_last)
    if F.flip:
        doc["reversed"] = True
    return doc


def gtds_from_json(doc, ctx: FieldCtx | None = None) -> Gtds:
    if not isinstance(doc, dict) or "branches" not in doc or "p_last" not in doc:
        raise ParseError("GTDS spec needs 'branches' and 'p_last'")
    if ctx is None:
        if "field" not in doc:
            raise ParseError("GTDS spec needs a 'field'")
        ctx = field_from_json(doc["field"])
    n = int(doc.get("n", len(doc["branches"]) + 1))
    if n != len(doc["branches"]) + 1:
        raise ParseError("'n' does not match the branch count")
    branches = []
    for b in doc["branches"]:
        try:
            branches.append(
                Branch(
                    p=poly_from_json(b["p"], ctx),
                    g=poly_from_json(b["g"], ctx, nvars=n),
                    h=poly_from_json(b["h"], ctx, nvars=n),
                )
            )
        except (KeyError, TypeError) as exc:
            raise ParseError(f"bad branch: {exc}") from exc
    p_last = poly_from_json(doc["p_last"], ctx)
    if not isinstance(p_last, UniPoly):
        raise ParseError("p_last must be univariate")
    return Gtds(ctx, branches, p_last, flip=bool(doc.get("reversed", False)))
