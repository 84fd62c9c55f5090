"""Batch command-line front end.

Verbs: validate, instantiate, encrypt, decrypt, ddt, corr, bounds, weil,
trail-lp, permcheck. Exit codes: 0 success / no violations, 1 invalid input
or violations or domain overflow, 2 usage, I/O, or parse errors. All output
is deterministic for a fixed seed; vectors are decimal element indices,
comma-separated, one state per line.
"""

from __future__ import annotations

import argparse
import csv
import json
import sys

from . import analysis
from .cipher import (
    CipherSpec,
    RoundSpec,
    affine_from_json,
    cipher_from_json,
    cipher_to_json,
    keys_from_json,
    keyed_orthogonality_check,
)
from .errors import DomainTooLarge, Error, ParseError
from .field import field_from_json
from .gtds import Gtds, gtds_from_json, gtds_to_json, state_from_index
from .instantiations import (
    ArionParams,
    LaiMasseyParams,
    _arion_from_json,
    gtds_round,
    make_arion_gtds,
    make_bricks,
    make_feistel_unbalanced,
    make_horst,
    make_lai_massey_2,
    make_generalized_lai_massey,
    make_partial_spn,
    make_spn,
)
from .polynomial import is_permutation_polynomial, perm_poly_certificate, poly_from_json

FAMILIES = ("feistel", "spn", "pspn", "laimassey", "glm", "horst", "bricks", "arion")


def _load_json(path: str):
    try:
        if path.strip().startswith("{"):
            return json.loads(path)
        with open(path) as fh:
            return json.load(fh)
    except json.JSONDecodeError as exc:
        raise ParseError(f"malformed JSON: {exc}") from exc


def _load_system(doc):
    """Dispatch on document shape: cipher, plain system, or feed-forward system."""
    if not isinstance(doc, dict):
        raise ParseError("top-level JSON must be an object")
    if "rounds" in doc:
        return cipher_from_json(doc)
    if "branches" in doc:
        return gtds_from_json(doc)
    if "arion" in doc:
        ctx = field_from_json(doc.get("field", {}))
        return _arion_from_json(doc["arion"], ctx, int(doc.get("n", 0)))
    raise ParseError("expected a cipher ('rounds'), system ('branches'), or 'arion' document")


def _fmt(x: float) -> str:
    return f"{x:.12g}"


def _emit(args, summary: dict) -> None:
    print(json.dumps(summary, sort_keys=True))
    if args.out:
        with open(args.out + ".json", "w") as fh:
            json.dump(summary, fh, sort_keys=True, indent=2)
            fh.write("\n")


def _state_cols(ctx, n, idx):
    return [str(ctx.index(v)) for v in state_from_index(ctx, n, idx)]


# -- commands -----------------------------------------------------------------


def cmd_validate(args) -> int:
    obj = _load_system(_load_json(args.spec))
    if isinstance(obj, CipherSpec):
        kind = f"cipher with {obj.r} round(s)"
        if args.keyed_check:
            report = keyed_orthogonality_check(
                obj, sample_keys=args.keyed_check, seed=args.seed, max_domain=args.max_domain
            )
            if not report.all_bijective:
                print(f"keyed orthogonality FAILED for samples {report.failures}")
                return 1
            kind += f"; {args.keyed_check} sampled keys all bijective"
    else:
        kind = f"system with {obj.n} branch(es) over F_{obj.ctx.q}"
    print(f"valid: {kind}")
    return 0


def _build_family(args, params: dict):
    ctx = field_from_json(params["field"])
    fam = args.family
    if fam == "feistel":
        return make_feistel_unbalanced(poly_from_json(params["f"], ctx), int(params["n"]))
    if fam in ("spn", "pspn"):
        n = int(params["n"])
        mix = affine_from_json(params["mix"], ctx)
        S = poly_from_json(params["s"], ctx)
        if fam == "spn":
            return make_spn(S, n, mix)
        return make_partial_spn(S, n, [int(i) for i in params["active"]], mix)
    if fam == "laimassey":
        return make_lai_massey_2(poly_from_json(params["g"], ctx))
    if fam == "glm":
        n = len(params["omega"])
        lm = LaiMasseyParams(
            omega=[int(w) for w in params["omega"]],
            p_list=[poly_from_json(p, ctx) for p in params["p_list"]],
            g=poly_from_json(params["g"], ctx),
        )
        return make_generalized_lai_massey(lm).pipeline
    if fam == "horst":
        n = int(params["n"])
        g_list = [poly_from_json(g, ctx, nvars=n) for g in params["g_list"]]
        h_list = (
            [poly_from_json(h, ctx, nvars=n) for h in params["h_list"]]
            if "h_list" in params
            else None
        )
        return make_horst(g_list, h_list)
    if fam == "bricks":
        return make_bricks(ctx, int(params["d"]), params["alphas"], params["betas"])
    if fam == "arion":
        ap = ArionParams(
            d1=int(params["d1"]),
            d2=int(params["d2"]),
            e=int(params["e"]) if "e" in params else None,
            g_list=[poly_from_json(g, ctx) for g in params["g_list"]],
            h_list=[poly_from_json(h, ctx) for h in params["h_list"]],
        )
        return make_arion_gtds(ap, int(params["n"]))
    raise ParseError(f"unknown family {fam!r}")


def cmd_instantiate(args) -> int:
    params = _load_json(args.params)
    obj = _build_family(args, params)
    if isinstance(obj, Gtds) and not args.rounds:
        doc = gtds_to_json(obj) if type(obj) is Gtds else _arion_doc(obj)
    else:
        rnd = obj if isinstance(obj, RoundSpec) else gtds_round(obj)
        cipher = CipherSpec(rnd.ctx, [rnd] * (args.rounds or 1))
        doc = cipher_to_json(cipher)
    text = json.dumps(doc, sort_keys=True, indent=2) + "\n"
    if args.out:
        with open(args.out, "w") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)
    return 0


def _arion_doc(obj) -> dict:
    from .field import field_to_json

    doc = {"field": field_to_json(obj.ctx), "n": obj.n}
    doc.update(obj.stage_json())
    return doc


def _read_vectors(args, ctx, n):
    lines = []
    stream = open(args.infile) if args.infile else sys.stdin
    try:
        for line in stream:
            line = line.strip()
            if not line:
                continue
            parts = [int(v) for v in line.split(",")]
            lines.append([ctx.from_index(v % ctx.q) for v in parts])
    finally:
        if args.infile:
            stream.close()
    return lines


def _run_cipher(args, decrypt: bool) -> int:
    obj = _load_system(_load_json(args.spec))
    if isinstance(obj, Gtds):
        obj = CipherSpec(obj.ctx, [gtds_round(obj)])
    keys = keys_from_json(_load_json(args.keys), obj.ctx)
    rows = _read_vectors(args, obj.ctx, obj.n)
    out = []
    for vec in rows:
        res = obj.decrypt(vec, keys) if decrypt else obj.encrypt(vec, keys)
        out.append(",".join(str(obj.ctx.index(v)) for v in res))
    text = "\n".join(out) + ("\n" if out else "")
    if args.out:
        with open(args.out, "w") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)
    return 0


def cmd_encrypt(args) -> int:
    return _run_cipher(args, decrypt=False)


def cmd_decrypt(args) -> int:
    return _run_cipher(args, decrypt=True)


def _require_gtds(obj) -> Gtds:
    if not isinstance(obj, Gtds):
        raise ParseError("analysis verbs need a system document, not a cipher")
    return obj


def cmd_ddt(args) -> int:
    F = _require_gtds(_load_system(_load_json(args.spec)))
    report = analysis.check_ddt_against_bounds(F, max_domain=args.max_domain)
    if args.out:
        N = F.ctx.q**F.n
        with open(args.out + ".csv", "w", newline="") as fh:
            w = csv.writer(fh)
            head = [f"dx{i + 1}" for i in range(F.n)] + [f"dy{i + 1}" for i in range(F.n)]
            w.writerow(head + ["count", "bound", "ok"])
            for dx in range(N):
                for dy in range(N):
                    c = int(report.table[dx, dy])
                    bd = int(report.bound_table[dx, dy])
                    w.writerow(
                        _state_cols(F.ctx, F.n, dx)
                        + _state_cols(F.ctx, F.n, dy)
                        + [c, bd, int(c <= bd)]
                    )
    _emit(args, report.summary())
    return 0 if not report.violations else 1


def cmd_corr(args) -> int:
    F = _require_gtds(_load_system(_load_json(args.spec)))
    report = analysis.check_correlation_against_bounds(
        F, max_domain=args.max_domain, slack=args.tolerance
    )
    if args.out:
        N = F.ctx.q**F.n
        with open(args.out + ".csv", "w", newline="") as fh:
            w = csv.writer(fh)
            head = [f"a{i + 1}" for i in range(F.n)] + [f"b{i + 1}" for i in range(F.n)]
            w.writerow(head + ["corr_re", "corr_im", "lp", "lp_bound", "ok"])
            for a in range(N):
                for b in range(N):
                    c = report.corr[a, b]
                    lp = float(report.lp[a, b])
                    bd = float(report.bound[a, b] ** 2)
                    w.writerow(
                        _state_cols(F.ctx, F.n, a)
                        + _state_cols(F.ctx, F.n, b)
                        + [_fmt(c.real), _fmt(c.imag), _fmt(lp), _fmt(bd),
                           int(lp <= bd + args.tolerance)]
                    )
    _emit(args, report.summary())
    return 0 if not report.violations else 1


def cmd_bounds(args) -> int:
    F = _require_gtds(_load_system(_load_json(args.spec)))
    drep = analysis.check_ddt_against_bounds(F, max_domain=args.max_domain)
    crep = analysis.check_correlation_against_bounds(
        F, max_domain=args.max_domain, slack=args.tolerance
    )
    summary = {
        "delta_uniformity": int(drep.delta_uniformity),
        "max_lp": crep.max_lp(),
        "violations": len(drep.violations) + len(crep.violations),
    }
    _emit(args, summary)
    return 0 if summary["violations"] == 0 else 1


def cmd_weil(args) -> int:
    ctx = field_from_json(_load_json(args.field))
    f = poly_from_json(_load_json(args.poly), ctx)
    rows = []
    worst = 0.0
    ok_all = True
    for a in range(1, ctx.q):
        for b in range(1, ctx.q):
            chk = analysis.weil_sum_check(f, ctx.from_index(a), ctx.from_index(b))
            rows.append((a, b, chk))
            worst = max(worst, chk.lhs)
            ok_all = ok_all and chk.ok
    if args.out:
        with open(args.out + ".csv", "w", newline="") as fh:
            w = csv.writer(fh)
            w.writerow(["a", "b", "lhs", "bound", "ok"])
            for a, b, chk in rows:
                w.writerow([a, b, _fmt(chk.lhs), _fmt(chk.bound), int(chk.ok)])
    _emit(args, {"max_lhs": worst, "bound": rows[0][2].bound, "violations": 0 if ok_all else 1})
    return 0 if ok_all else 1


def cmd_trail_lp(args) -> int:
    obj = _load_system(_load_json(args.spec))
    if not isinstance(obj, CipherSpec):
        raise ParseError("trail-lp needs a cipher document")
    keys = keys_from_json(_load_json(args.keys), obj.ctx)
    doc = _load_json(args.trail)
    masks = doc["masks"] if isinstance(doc, dict) else doc
    trail = analysis.LinearTrail(tuple(tuple(int(v) for v in m) for m in masks))
    lp = analysis.trail_lp(obj, keys, trail, max_domain=args.max_domain)
    _emit(args, {"trail_lp": lp})
    return 0


def cmd_permcheck(args) -> int:
    ctx = field_from_json(_load_json(args.field))
    f = poly_from_json(_load_json(args.poly), ctx)
    if not is_permutation_polynomial(f):
        _emit(args, {"is_permutation": False})
        return 1
    cert = perm_poly_certificate(f)
    _emit(
        args,
        {
            "is_permutation": True,
            "kind": cert.kind,
            "deg": cert.deg_f,
            "deg_inv": cert.deg_finv,
        },
    )
    return 0


# -- argument parsing -------------------------------------------------------------


def _parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--max-domain", type=int, default=analysis.FULL_SWEEP_CAP,
                        help="cap on q^n for exhaustive sweeps (<= 2^20)")
    common.add_argument("--tolerance", type=float, default=analysis.BOUND_SLACK,
                        help="slack added to floating-point bound comparisons")
    common.add_argument("--seed", type=int, default=0, help="seed for randomized checks")
    common.add_argument("--out", help="output path (or prefix for CSV/JSON reports)")

    top = argparse.ArgumentParser(prog="gtdslib", description=__doc__)
    sub = top.add_subparsers(dest="command", required=True)

    p = sub.add_parser("validate", parents=[common], help="validate a system or cipher spec")
    p.add_argument("spec")
    p.add_argument("--keyed-check", type=int, default=0, metavar="K",
                   help="for ciphers: verify bijectivity under K sampled key matrices")
    p.set_defaults(fn=cmd_validate)

    p = sub.add_parser("instantiate", parents=[common], help="build a design family")
    p.add_argument("--family", required=True, choices=FAMILIES)
    p.add_argument("--params", required=True, help="JSON parameter file (includes 'field')")
    p.add_argument("--rounds", type=int, default=0, help="wrap into an r-round cipher")
    p.set_defaults(fn=cmd_instantiate)

    for name, fn in (("encrypt", cmd_encrypt), ("decrypt", cmd_decrypt)):
        p = sub.add_parser(name, parents=[common], help=f"{name} vectors, one per line")
        p.add_argument("--spec", required=True)
        p.add_argument("--keys", required=True)
        p.add_argument("--in", dest="infile", help="vector file (default: stdin)")
        p.set_defaults(fn=fn)

    for name, fn in (("ddt", cmd_ddt), ("corr", cmd_corr), ("bounds", cmd_bounds)):
        p = sub.add_parser(name, parents=[common], help=f"exhaustive {name} sweep with bounds")
        p.add_argument("--spec", required=True)
        p.set_defaults(fn=fn)

    p = sub.add_parser("weil", parents=[common], help="character-sum bound sweep for one polynomial")
    p.add_argument("--field", required=True, help="field JSON (inline or path)")
    p.add_argument("--poly", required=True, help="polynomial JSON (inline or path)")
    p.set_defaults(fn=cmd_weil)

    p = sub.add_parser("trail-lp", parents=[common], help="linear probability of a mask trail")
    p.add_argument("--spec", required=True)
    p.add_argument("--keys", required=True)
    p.add_argument("--trail", required=True)
    p.set_defaults(fn=cmd_trail_lp)

    p = sub.add_parser("permcheck", parents=[common], help="permutation test + inverse degrees")
    p.add_argument("--field", required=True)
    p.add_argument("--poly", required=True)
    p.set_defaults(fn=cmd_permcheck)
    return top


def main(argv=None) -> int:
    args = _parser().parse_args(argv)
    if args.max_domain > (1 << 20):
        print("--max-domain must not exceed 2^20", file=sys.stderr)
        return 2
    try:
        return args.fn(args)
    except ParseError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except DomainTooLarge as exc:
        print(f"domain too large: {exc}; raise --max-domain only up to 2^20", file=sys.stderr)
        return 1
    except Error as exc:
        print(str(exc), file=sys.stderr)
        return 1
    except OSError as exc:
        print(f"i/o error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
