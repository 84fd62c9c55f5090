"""Round functions and iterated keyed permutations.

A round applies a nonlinear core (one or more triangular systems and affine
permutations, composed left to right), then an affine mixing layer, then a
round-key addition. A cipher is a whitening key addition followed by r such
rounds; round keys are supplied explicitly as the columns of an
n x (r + 1) matrix -- there is no key schedule.
"""

from __future__ import annotations

import random
from dataclasses import dataclass, field as dc_field
from typing import Sequence, Union

from .errors import (
    ArityMismatch,
    DomainTooLarge,
    KeyShapeMismatch,
    MixedFields,
    ParseError,
    SingularMatrix,
)
from .field import FieldCtx, FieldElement, field_from_json, field_to_json
from .gtds import Gtds, State, exhaustive_bijection_check, gtds_from_json

KEYED_CHECK_CAP = 1 << 16


def _coerce_vector(ctx: FieldCtx, n: int, xs) -> tuple[FieldElement, ...]:
    if len(xs) != n:
        raise ArityMismatch(f"expected {n} components, got {len(xs)}")
    return tuple(ctx.element(x) for x in xs)


def key_add(x: Sequence, k: Sequence) -> State:
    """Componentwise sum; the paper's key addition map."""
    if len(x) != len(k):
        raise ArityMismatch("vector widths differ")
    return tuple(a + b for a, b in zip(x, k))


def matrix_inverse(ctx: FieldCtx, rows: list[list[FieldElement]]) -> list[list[FieldElement]]:
    """Gauss-Jordan inverse over F_q; raises SingularMatrix."""
    n = len(rows)
    aug = [list(r) + [ctx.one if i == j else ctx.zero for j in range(n)] for i, r in enumerate(rows)]
    for col in range(n):
        pivot = next((r for r in range(col, n) if not aug[r][col].is_zero()), None)
        if pivot is None:
            raise SingularMatrix(f"no pivot in column {col + 1}")
        aug[col], aug[pivot] = aug[pivot], aug[col]
        inv = aug[col][col].inverse()
        aug[col] = [v * inv for v in aug[col]]
        for r in range(n):
            if r != col and not aug[r][col].is_zero():
                f = aug[r][col]
                aug[r] = [a - f * b for a, b in zip(aug[r], aug[col])]
    return [row[n:] for row in aug]


class AffineLayer:
    """Invertible map x -> A*x + b; the inverse matrix is computed at build."""

    def __init__(self, ctx: FieldCtx, A, b=None):
        self.ctx = ctx
        self.n = len(A)
        rows = []
        for row in A:
            if len(row) != self.n:
                raise ArityMismatch("matrix must be square")
            rows.append([ctx.element(v) for v in row])
        self.A = tuple(tuple(r) for r in rows)
        if b is None:
            b = [0] * self.n
        self.b = _coerce_vector(ctx, self.n, b)
        self._A_inv = tuple(tuple(r) for r in matrix_inverse(ctx, rows))

    @classmethod
    def identity(cls, ctx: FieldCtx, n: int) -> "AffineLayer":
        return cls(ctx, [[1 if i == j else 0 for j in range(n)] for i in range(n)])

    @classmethod
    def permutation(cls, ctx: FieldCtx, targets: Sequence[int]) -> "AffineLayer":
        """Layer sending x to (x_{targets[0]}, x_{targets[1]}, ...), 0-based."""
        n = len(targets)
        return cls(ctx, [[1 if j == targets[i] else 0 for j in range(n)] for i in range(n)])

    def _mat_vec(self, M, x) -> State:
        zero = self.ctx.zero
        out = []
        for row in M:
            acc = zero
            for a, v in zip(row, x):
                acc = acc + a * v
            out.append(acc)
        return tuple(out)

    def apply(self, x) -> State:
        x = _coerce_vector(self.ctx, self.n, x)
        return key_add(self._mat_vec(self.A, x), self.b)

    def invert(self, y) -> State:
        y = _coerce_vector(self.ctx, self.n, y)
        shifted = tuple(a - b for a, b in zip(y, self.b))
        return self._mat_vec(self._A_inv, shifted)

    def transpose_mul(self, a) -> State:
        """A^T * a (no offset); transports output masks in linear analysis."""
        a = _coerce_vector(self.ctx, self.n, a)
        zero = self.ctx.zero
        out = []
        for j in range(self.n):
            acc = zero
            for i in range(self.n):
                acc = acc + self.A[i][j] * a[i]
            out.append(acc)
        return tuple(out)

    def stage_json(self) -> dict:
        return {"affine": affine_to_json(self)}


Stage = Union[Gtds, AffineLayer]


class RoundSpec:
    """One round: core pipeline (left to right), then mix, then key addition."""

    def __init__(self, core: Sequence[Stage], mix: AffineLayer):
        if not core:
            raise ValueError("round core must be nonempty")
        self.core = tuple(core)
        self.mix = mix
        self.ctx = mix.ctx
        self.n = mix.n
        for st in self.core:
            if st.ctx != self.ctx or st.n != self.n:
                raise MixedFields("pipeline stages disagree on field or width")

    def core_apply(self, x) -> State:
        for st in self.core:
            x = st.eval(x) if isinstance(st, Gtds) else st.apply(x)
        return tuple(x)

    def core_invert(self, y) -> State:
        for st in reversed(self.core):
            y = st.invert(y)
        return tuple(y)

    def apply(self, k, x) -> State:
        k = _coerce_vector(self.ctx, self.n, k)
        return key_add(self.mix.apply(self.core_apply(x)), k)

    def invert(self, k, y) -> State:
        k = _coerce_vector(self.ctx, self.n, k)
        y = _coerce_vector(self.ctx, self.n, y)
        shifted = tuple(a - b for a, b in zip(y, k))
        return self.core_invert(self.mix.invert(shifted))


class RoundKeys:
    """Columns k_0..k_r of the round-key matrix K in F_q^{n x (r+1)}."""

    def __init__(self, ctx: FieldCtx, columns: Sequence[Sequence]):
        if not columns:
            raise KeyShapeMismatch("need at least the whitening key k_0")
        width = len(columns[0])
        cols = []
        for c in columns:
            if len(c) != width:
                raise KeyShapeMismatch("key columns have unequal widths")
            cols.append(tuple(ctx.element(v) for v in c))
        self.ctx = ctx
        self.columns = tuple(cols)
        self.n = width
        self.rounds = len(cols) - 1

    def __getitem__(self, i: int) -> State:
        return self.columns[i]


def random_round_keys(ctx: FieldCtx, n: int, rounds: int, rng: random.Random) -> RoundKeys:
    cols = [[rng.randrange(ctx.q) for _ in range(n)] for _ in range(rounds + 1)]
    return RoundKeys(ctx, cols)


class CipherSpec:
    """Keyed permutation C_r = R^(r) o ... o R^(1) o (x + k_0)."""

    def __init__(self, ctx: FieldCtx, rounds: Sequence[RoundSpec]):
        if not rounds:
            raise ValueError("cipher needs at least one round")
        self.ctx = ctx
        self.rounds = tuple(rounds)
        self.n = rounds[0].n
        for r in rounds:
            if r.ctx != ctx or r.n != self.n:
                raise MixedFields("rounds disagree on field or width")

    @property
    def r(self) -> int:
        return len(self.rounds)

    def _check_keys(self, keys: RoundKeys) -> None:
        if keys.n != self.n or keys.rounds != self.r:
            raise KeyShapeMismatch(
                f"need {self.n} x {self.r + 1} key matrix, got {keys.n} x {keys.rounds + 1}"
            )

    def encrypt(self, x, keys: RoundKeys) -> State:
        self._check_keys(keys)
        x = _coerce_vector(self.ctx, self.n, x)
        x = key_add(x, keys[0])
        for i, rnd in enumerate(self.rounds):
            x = rnd.apply(keys[i + 1], x)
        return x

    def decrypt(self, y, keys: RoundKeys) -> State:
        self._check_keys(keys)
        y = _coerce_vector(self.ctx, self.n, y)
        for i in range(self.r - 1, -1, -1):
            y = self.rounds[i].invert(keys[i + 1], y)
        return tuple(a - b for a, b in zip(y, keys[0]))


@dataclass
class KeyedOrthReport:
    """Outcome of sampling keys and checking the fixed-key maps are bijections."""

    sample_keys: int
    seed: int
    failures: list[int] = dc_field(default_factory=list)

    @property
    def all_bijective(self) -> bool:
        return not self.failures


def keyed_orthogonality_check(
    cipher: CipherSpec,
    sample_keys: int = 10,
    seed: int = 0,
    max_domain: int = KEYED_CHECK_CAP,
) -> KeyedOrthReport:
    """For each sampled key matrix, verify encryption permutes F_q^n."""
    size = cipher.ctx.q**cipher.n
    if size > max_domain:
        raise DomainTooLarge(f"domain {size} exceeds cap {max_domain}")
    rng = random.Random(seed)
    report = KeyedOrthReport(sample_keys=sample_keys, seed=seed)
    for trial in range(sample_keys):
        keys = random_round_keys(cipher.ctx, cipher.n, cipher.r, rng)
        if not exhaustive_bijection_check(
            lambda x: cipher.encrypt(x, keys), cipher.ctx, cipher.n, max_domain
        ):
            report.failures.append(trial)
    return report


# -- JSON codecs -----------------------------------------------------------

# Extra stage kinds (feed-forward systems from the instantiation factories)
# register a decoder here under their JSON key.
STAGE_DECODERS: dict[str, object] = {}


def affine_to_json(layer: AffineLayer) -> dict:
    enc = lambda v: v.coeffs[0] if layer.ctx.m == 1 else list(v.coeffs)
    return {
        "A": [[enc(v) for v in row] for row in layer.A],
        "b": [enc(v) for v in layer.b],
    }


def affine_from_json(doc, ctx: FieldCtx) -> AffineLayer:
    try:
        return AffineLayer(ctx, doc["A"], doc.get("b"))
    except (KeyError, TypeError, ValueError) as exc:
        raise ParseError(f"bad affine layer: {exc}") from exc


def stage_from_json(doc, ctx: FieldCtx, n: int) -> Stage:
    if not isinstance(doc, dict) or len(doc) != 1:
        raise ParseError("stage must be a single-key object")
    (kind,) = doc
    if kind == "gtds":
        return gtds_from_json(doc["gtds"], ctx)
    if kind == "affine":
        return affine_from_json(doc["affine"], ctx)
    if kind in STAGE_DECODERS:
        return STAGE_DECODERS[kind](doc[kind], ctx, n)
    raise ParseError(f"unknown stage kind {kind!r}")


def cipher_to_json(cipher: CipherSpec) -> dict:
    return {
        "field": field_to_json(cipher.ctx),
        "n": cipher.n,
        "rounds": [
            {
                "core": [st.stage_json() for st in rnd.core],
                "mix": affine_to_json(rnd.mix),
            }
            for rnd in cipher.rounds
        ],
    }


def cipher_from_json(doc) -> CipherSpec:
    if not isinstance(doc, dict) or "rounds" not in doc:
        raise ParseError("cipher spec needs 'rounds'")
    ctx = field_from_json(doc.get("field", {}))
    try:
        n = int(doc["n"])
    except (KeyError, TypeError, ValueError) as exc:
        raise ParseError("cipher spec needs an integer 'n'") from exc
    rounds = []
    for rnd in doc["rounds"]:
        try:
            core = [stage_from_json(st, ctx, n) for st in rnd["core"]]
            mix = affine_from_json(rnd["mix"], ctx)
        except (KeyError, TypeError) as exc:
            raise ParseError(f"bad round: {exc}") from exc
        rounds.append(RoundSpec(core, mix))
    return CipherSpec(ctx, rounds)


def keys_to_json(keys: RoundKeys) -> dict:
    enc = lambda v: v.coeffs[0] if keys.ctx.m == 1 else list(v.coeffs)
    return {"K": [[enc(v) for v in col] for col in keys.columns]}


def keys_from_json(doc, ctx: FieldCtx) -> RoundKeys:
    try:
        return RoundKeys(ctx, doc["K"])
    except KeyShapeMismatch:
        raise
    except (KeyError, TypeError, ValueError) as exc:
        raise ParseError(f"bad round keys: {exc}") from exc
