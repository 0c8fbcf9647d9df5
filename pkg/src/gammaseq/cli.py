"""Command-line front end.

Exit status: 0 success, 1 unparsable input, 2 domain error or a campaign
that found a violation or an odd-order hit, 3 bounds exceeded.
"""

from __future__ import annotations

import argparse
import json
import sys

from .abgroup import format_group, parse_group
from .analysis import (
    TrivialCertificate,
    even_order_witness,
    infinite_witness,
    involution_from_table,
    normal_form_order4,
)
from .errors import BoundsError, DomainError, LiteralError
from .gamma import gamma_n1, gamma_object, parse_tag
from .gseq import GammaSequence, compute_b_group, moore_sequence, validate
from .search import CampaignSpec, default_even_order_spec, default_odd_order_spec, describe, run_campaign


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        print(f"{self.prog}: error: {message}", file=sys.stderr)
        raise SystemExit(1)


def _load_json(path: str):
    try:
        if path == "-":
            return json.load(sys.stdin)
        with open(path, encoding="utf-8") as fh:
            return json.load(fh)
    except (OSError, json.JSONDecodeError) as e:
        raise LiteralError(f"cannot read {path}: {e}") from None


def _load_sequence(path: str) -> GammaSequence:
    return GammaSequence.from_document(_load_json(path))


def _emit(args, doc) -> None:
    if getattr(args, "out", None):
        with open(args.out, "w", encoding="utf-8") as fh:
            json.dump(doc, fh, indent=2, sort_keys=True)
            fh.write("\n")


def _bgroup_doc(bres) -> dict:
    return bres.summary() if not bres.finite else {
        "finite": True,
        "order": bres.order,
        "element_orders": {str(k): v for k, v in bres.order_counts().items()},
    }


def _print_bgroup(bres) -> None:
    if bres.finite:
        counts = ", ".join(f"{k}:{v}" for k, v in bres.order_counts().items())
        print(f"B order {bres.order}  (element orders {counts})")
    else:
        print(f"B infinite  (witness: {bres.reason})")


def cmd_gamma(args) -> int:
    A = parse_group(args.group)
    G = gamma_n1(args.n, A)
    print(f"{G.group}    (invariant factors: {G.carrier})")
    for tag, o in G.tag_table():
        print(f"  {tag}: {'Z' if o == 0 else f'Z_{o}'}")
    _emit(args, {"group": format_group(A), "n": args.n, "carrier": format_group(G.carrier), "tags": G.tag_table()})
    return 0


def cmd_validate(args) -> int:
    seq = _load_sequence(args.sequence)
    problems = validate(seq)
    if problems:
        for p in problems:
            print(p)
        _emit(args, {"valid": False, "diagnostics": problems})
        return 2
    print("ok")
    _emit(args, {"valid": True, "diagnostics": []})
    return 0


def _require_valid(seq) -> None:
    problems = validate(seq)
    if problems:
        raise DomainError(f"invalid sequence: {problems[0]}")


def cmd_bgroup(args) -> int:
    seq = _load_sequence(args.sequence)
    _require_valid(seq)
    bres = compute_b_group(seq, method=args.method)
    _print_bgroup(bres)
    _emit(args, _bgroup_doc(bres))
    return 0


def cmd_moore(args) -> int:
    seq = moore_sequence(parse_group(args.group), args.n)
    bres = compute_b_group(seq)
    print(json.dumps(seq.to_document(), sort_keys=True))
    _print_bgroup(bres)
    _emit(args, {"sequence": seq.to_document(), "b_group": _bgroup_doc(bres)})
    return 0


def cmd_witness(args) -> int:
    seq = _load_sequence(args.sequence)
    _require_valid(seq)
    w = infinite_witness(seq)
    if w is None and seq.n >= 3:
        w = even_order_witness(seq)
    if w is None:
        print("no witness applies")
        _emit(args, {"witness": None})
        return 0
    if isinstance(w, TrivialCertificate):
        print(f"B is trivial [{w.step}]: {w.reason}")
    else:
        print(f"witness [{w.step}]")
        for k, v in w.morphism.to_document().items():
            print(f"  {k}: {v}")
    _emit(args, {"witness": w.to_document()})
    return 0


def _parse_element(G, text: str):
    pairs = []
    for part in text.split(";"):
        part = part.strip()
        if not part:
            continue
        tag, _, c = part.rpartition("=")
        if not tag:
            tag, c = part, "1"
        try:
            pairs.append((parse_tag(tag), int(c)))
        except ValueError:
            raise LiteralError(f"bad element term {part!r}") from None
    return G.element_from_pairs(pairs)


def cmd_normalform(args) -> int:
    A = parse_group(args.group)
    chi = _parse_element(gamma_object(A), args.element)
    nf = normal_form_order4(chi)
    doc = {"normal_form": nf.to_document()}
    print(f"basis: {[list(v) for v in nf.new_basis]}")
    print(f"alphas: {list(nf.alphas)}  betas: {list(nf.betas)}")
    if nf.r >= 2:
        g = involution_from_table(nf)
        print(f"involution: {[list(r) for r in g.matrix]}")
        doc["involution"] = [list(r) for r in g.matrix]
    _emit(args, doc)
    return 0


def cmd_search(args) -> int:
    if args.spec:
        spec = CampaignSpec.from_document(_load_json(args.spec))
    else:
        spec = default_odd_order_spec() if args.campaign == "odd-order" else default_even_order_spec()
    print(describe(spec))
    rep = run_campaign(args.campaign, spec, out=args.out, resume=args.resume, workers=args.threads)
    s = rep.summary
    print(
        f"sequences {s['sequences']} (of {s['candidates_examined']} candidates), skipped {s['skipped']}, "
        f"infinite {s['infinite']}, odd-order hits {len(s['odd_order_hits'])}, violations {s['violations']}"
    )
    print("B orders: " + ", ".join(f"{k}:{v}" for k, v in s["b_orders"].items()))
    for idx in s["odd_order_hits"]:
        print(f"odd-order hit: record {idx}")
    return 2 if s["violations"] or s["odd_order_hits"] else 0


def build_parser() -> argparse.ArgumentParser:
    p = _Parser(prog="gammaseq", description="Γ-sequences and their groups of Γ-isomorphisms")
    sub = p.add_subparsers(dest="command", required=True, parser_class=_Parser)

    def add(name, fn, help_):
        sp = sub.add_parser(name, help=help_)
        sp.set_defaults(fn=fn)
        sp.add_argument("--out", help="write the machine-readable result here")
        return sp

    sp = add("gamma", cmd_gamma, "Γ_n^1 of a group literal")
    sp.add_argument("--group", required=True)
    sp.add_argument("--n", type=int, default=2)
    sp = add("validate", cmd_validate, "check exactness of a sequence document")
    sp.add_argument("sequence")
    sp = add("bgroup", cmd_bgroup, "order and element orders of B^{n+2}")
    sp.add_argument("sequence")
    sp.add_argument("--method", choices=("family", "triples"), default="family")
    sp = add("moore", cmd_moore, "sequence and B-group of a Moore space")
    sp.add_argument("--group", required=True)
    sp.add_argument("--n", type=int, default=2)
    sp = add("witness", cmd_witness, "infinite-order or even-order witness, or a triviality certificate")
    sp.add_argument("sequence")
    sp = add("normalform", cmd_normalform, "chain normal form of an order-4 element of Γ(Z_2^r)")
    sp.add_argument("--group", required=True, help='elementary abelian 2-group, e.g. "2x2x2"')
    sp.add_argument("--element", required=True, help='terms like "g(0)=1; t(0,1)=1"')
    sp = add("search", cmd_search, "run a bounded campaign")
    sp.add_argument("--campaign", choices=("odd-order", "even-order"), default="odd-order")
    sp.add_argument("--spec", help="campaign spec document (JSON); defaults per campaign")
    sp.add_argument("--resume", action="store_true", help="continue the report at --out")
    sp.add_argument("--threads", type=int, default=1, help="worker processes")
    return p


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    if getattr(args, "n", 2) < 2:
        parser.error("--n must be at least 2")
    try:
        return args.fn(args)
    except LiteralError as e:
        print(f"error: {e}", file=sys.stderr)
        return 1
    except DomainError as e:
        print(f"error: {type(e).__name__}: {e}", file=sys.stderr)
        return 2
    except BoundsError as e:
        print(f"error: {type(e).__name__}: {e}", file=sys.stderr)
        return 3


if __name__ == "__main__":
    sys.exit(main())
