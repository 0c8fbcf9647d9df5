"""Bounded enumeration of Γ-sequences and campaigns over them.

Two enumeration modes produce the same isomorphism classes:

* ``extensions`` builds ``pi`` as an extension of ``H_mid`` by
  ``Q = coker b``: for ``H_mid = ⊕ Z_{m_k}`` every class is
  ``(Q ⊕ Z^K) / ⟨(−x_k, m_k e_k)⟩`` with ``x_k`` running over ``Q / m_k Q``.
* ``raw`` runs over abstract groups ``pi`` and all maps ``i``, ``h``,
  keeping the exact ones.  It is slow and meant for cross-checks.

Reports are JSON Lines: a header, one record per sequence, a summary.
"""

from __future__ import annotations

import itertools
import json
import os
from collections import Counter
from concurrent.futures import ProcessPoolExecutor
from dataclasses import asdict, dataclass, field

from .abgroup import (
    FgAbGroup,
    Homomorphism,
    abelian_groups_up_to,
    cokernel,
    enumerate_automorphisms,
    enumerate_homomorphisms,
    format_group,
    hom_count,
    parse_group,
    solve_hom_equations,
)
from .analysis import check_odd_order_conditions, even_order_witness, TrivialCertificate
from .errors import BoundsTooLarge, DomainError, InternalError, LiteralError, NotEnumerable, TooLarge
from .gamma import gamma_n1, gamma_n1_morphism
from .gseq import GammaSequence, compute_b_group, find_isomorphism, validate

SCHEMA_VERSION = 1
DEFAULT_MAX_CANDIDATES = 5_000_000


@dataclass(frozen=True)
class CampaignSpec:
    n: int
    bottoms: tuple[str, ...]
    tops: tuple[str, ...] = ("0",)
    max_mid: int = 4
    max_pi: int = 64
    two_groups: bool = False
    mode: str = "extensions"
    dedupe: bool = True
    max_candidates: int = DEFAULT_MAX_CANDIDATES

    def __post_init__(self):
        if self.n < 2:
            raise LiteralError("n must be >= 2")
        if self.max_mid < 1 or self.max_pi < 1 or self.max_candidates < 1:
            raise LiteralError("bounds must be positive")
        if self.mode not in ("extensions", "raw"):
            raise LiteralError(f"unknown enumeration mode {self.mode!r}")
        for t in self.tops:
            if not parse_group(t).is_free():
                raise LiteralError(f"H_top must be free, got {t!r}")
        for b in self.bottoms:
            parse_group(b)
        object.__setattr__(self, "bottoms", tuple(self.bottoms))
        object.__setattr__(self, "tops", tuple(self.tops))

    @classmethod
    def elementary(cls, n: int, max_rank: int, **kw) -> "CampaignSpec":
        """Bottoms ``(Z_2)^r`` for ``0 <= r <= max_rank``."""
        bottoms = tuple("0" if r == 0 else " x ".join(["2"] * r) for r in range(max_rank + 1))
        return cls(n, bottoms, **kw)

    def to_document(self) -> dict:
        d = asdict(self)
        d["bottoms"] = list(self.bottoms)
        d["tops"] = list(self.tops)
        return d

    @classmethod
    def from_document(cls, doc: dict) -> "CampaignSpec":
        doc = dict(doc)
        if "max_rank_bot" in doc:
            r = int(doc.pop("max_rank_bot"))
            return cls.elementary(int(doc.pop("n")), r, **_spec_kwargs(doc))
        try:
            return cls(int(doc.pop("n")), tuple(doc.pop("bottoms")), **_spec_kwargs(doc))
        except KeyError as e:
            raise LiteralError(f"campaign spec is missing field {e}") from None


def _spec_kwargs(doc: dict) -> dict:
    allowed = {"tops", "max_mid", "max_pi", "two_groups", "mode", "dedupe", "max_candidates"}
    unknown = set(doc) - allowed
    if unknown:
        raise LiteralError(f"unknown campaign spec fields {sorted(unknown)}")
    out = dict(doc)
    if "tops" in out:
        out["tops"] = tuple(out["tops"])
    return out


def default_odd_order_spec() -> CampaignSpec:
    """n = 2, (Z_2)^r with r <= 2, H_top in {0, Z}, |H_mid| <= 8, |pi| <= 64, 2-groups only."""
    return CampaignSpec.elementary(2, 2, tops=("0", "free^1"), max_mid=8, max_pi=64, two_groups=True)


def default_even_order_spec() -> CampaignSpec:
    """n = 3, (Z_2)^r with r <= 2, H_top = 0, |H_mid| <= 4, |pi| <= 64."""
    return CampaignSpec.elementary(3, 2, tops=("0",), max_mid=4, max_pi=64)


# ---------------------------------------------------------------------------
# enumeration


def _mids(spec: CampaignSpec) -> list[FgAbGroup]:
    return abelian_groups_up_to(spec.max_mid, 2 if spec.two_groups else None)


def _b_representatives(spec: CampaignSpec, H_top: FgAbGroup, H_bot: FgAbGroup) -> list[Homomorphism]:
    """All ``b`` (or one per Aut(H_top) × Aut(H_bot)-orbit when deduplicating)."""
    G = gamma_n1(spec.n, H_bot).group
    if H_top.free_rank and not G.is_finite():
        raise NotEnumerable(f"Hom({H_top}, {G}) is infinite")
    allb = list(enumerate_homomorphisms(H_top, G))
    if not spec.dedupe:
        return allb
    tops = enumerate_automorphisms(H_top)
    bots = [gamma_n1_morphism(spec.n, f) for f in enumerate_automorphisms(H_bot)]
    reps, seen = [], set()
    for b in allb:
        if b.matrix in seen:
            continue
        orbit = {(g @ b @ t.inverse()).matrix for t in tops for g in bots}
        seen |= orbit
        reps.append(b)
    return reps


def _coset_reps(Q: FgAbGroup, m: int) -> list[tuple[int, ...]]:
    """Smallest representative of each coset of ``mQ`` in ``Q``."""
    mQ = {Q.reduce([m * c for c in x]) for x in Q.elements()}
    reps, seen = [], set()
    for x in Q.elements():
        if x in seen:
            continue
        coset = {Q.add(x, y) for y in mQ}
        seen |= coset
        reps.append(min(coset))
    return reps


def _extension_sequence(n, H_top, H_bot, b, q, Q, H_mid, xs) -> GammaSequence:
    K = H_mid.ngens
    F = FgAbGroup(Q.orders + (0,) * K)
    cols = []
    for k, (m, x) in enumerate(zip(H_mid.orders, xs)):
        cols.append([-c for c in x] + [m if j == k else 0 for j in range(K)])
    R = Homomorphism.from_columns(FgAbGroup((0,) * K), F, cols)
    pi, proj = cokernel(R)
    incQ = Homomorphism.from_columns(Q, F, [list(e) + [0] * K for e in Q.basis()])
    i = proj @ incQ @ q
    p2 = Homomorphism.from_columns(F, H_mid, [H_mid.zero()] * Q.ngens + H_mid.basis())
    h = solve_hom_equations(pi, H_mid, [(proj, p2, "pre")])
    if h is None:
        raise InternalError("extension projection does not factor")
    seq = GammaSequence(n, H_top, H_mid, H_bot, pi, b, i, h)
    problems = validate(seq)
    if problems:
        raise InternalError(f"constructed extension is not exact: {problems}")
    return seq


def _raw_candidates(spec, H_top, H_bot, b, H_mid):
    G = gamma_n1(spec.n, H_bot).group
    for pi in abelian_groups_up_to(spec.max_pi, 2 if spec.two_groups else None):
        if pi.order % H_mid.order:
            continue
        for i in enumerate_homomorphisms(G, pi):
            if not (i @ b).is_zero():
                continue
            for h in enumerate_homomorphisms(pi, H_mid):
                seq = GammaSequence(spec.n, H_top, H_mid, H_bot, pi, b, i, h)
                if not validate(seq):
                    yield seq


def _candidates(spec: CampaignSpec):
    """Every candidate sequence with its dedupe bucket key, deterministic order."""
    for bot_lit in spec.bottoms:
        H_bot = parse_group(bot_lit)
        for top_lit in spec.tops:
            H_top = parse_group(top_lit)
            for bi, b in enumerate(_b_representatives(spec, H_top, H_bot)):
                Q, q = cokernel(b)
                for H_mid in _mids(spec):
                    if not H_mid.is_finite():
                        continue
                    if spec.mode == "raw":
                        for seq in _raw_candidates(spec, H_top, H_bot, b, H_mid):
                            yield (bot_lit, top_lit, bi, H_mid.orders, seq.pi.orders), seq
                        continue
                    # pi is bounded, so an infinite cokernel never fits
                    if not Q.is_finite() or Q.order * H_mid.order > spec.max_pi:
                        continue
                    per = [_coset_reps(Q, m) for m in H_mid.orders]
                    for xs in itertools.product(*per):
                        seq = _extension_sequence(spec.n, H_top, H_bot, b, q, Q, H_mid, xs)
                        yield (bot_lit, top_lit, bi, H_mid.orders, seq.pi.orders), seq


def count_candidates(spec: CampaignSpec) -> int:
    """Number of candidate sequences the enumerator will build (before dedupe)."""
    total = 0
    for bot_lit in spec.bottoms:
        H_bot = parse_group(bot_lit)
        G = gamma_n1(spec.n, H_bot).group
        for top_lit in spec.tops:
            H_top = parse_group(top_lit)
            bs = _b_representatives(spec, H_top, H_bot)
            for H_mid in _mids(spec):
                if spec.mode == "raw":
                    for pi in abelian_groups_up_to(spec.max_pi, 2 if spec.two_groups else None):
                        if pi.order % H_mid.order == 0:
                            total += len(bs) * hom_count(G, pi) * hom_count(pi, H_mid)
                    continue
                for b in bs:
                    Q, _ = cokernel(b)
                    if not Q.is_finite() or Q.order * H_mid.order > spec.max_pi:
                        continue
                    c = 1
                    for m in H_mid.orders:
                        c *= len(_coset_reps(Q, m))
                    total += c
    return total


def check_bounds(spec: CampaignSpec) -> int:
    est = count_candidates(spec)
    if est > spec.max_candidates:
        raise BoundsTooLarge(f"{est} candidate sequences exceed the limit {spec.max_candidates}", est)
    return est


def enumerate_classified(spec: CampaignSpec):
    """Yield ``(seq, rep)``: ``rep`` is ``None`` for a kept sequence, else the kept one it is isomorphic to."""
    check_bounds(spec)
    buckets: dict = {}
    for key, seq in _candidates(spec):
        if not spec.dedupe:
            yield seq, None
            continue
        reps = buckets.setdefault(key, [])
        match = next((r for r in reps if find_isomorphism(seq, r) is not None), None)
        if match is None:
            reps.append(seq)
        yield seq, match


def enumerate_sequences(spec: CampaignSpec):
    """All valid sequences within the bounds (one per isomorphism class if ``dedupe``)."""
    for seq, rep in enumerate_classified(spec):
        if rep is None:
            yield seq


# ---------------------------------------------------------------------------
# campaigns


def _orders_doc(bres) -> dict:
    return {str(k): v for k, v in bres.order_counts().items()}


def _is_moore(seq: GammaSequence) -> bool:
    return seq.H_top.is_trivial() and seq.H_bot.is_trivial()


def examine_odd_order(seq: GammaSequence) -> dict:
    rec: dict = {"sequence": seq.to_document()}
    try:
        bres = compute_b_group(seq)
    except (NotEnumerable, TooLarge) as e:
        rec["skip"] = f"{type(e).__name__}: {e}"
        return rec
    if not bres.finite:
        rec["b_group"] = {"finite": False}
        rec["witness"] = {"step": bres.reason, **bres.witness.to_document()}
        return rec
    rec["b_group"] = {"finite": True, "order": bres.order, "element_orders": _orders_doc(bres)}
    if bres.order > 1 and bres.order % 2 == 1:
        report = check_odd_order_conditions(seq, bres)
        rec["odd_order_hit"] = report
        # the conditions are necessary, so a hit failing one is an engine bug
        if not report.get("all_pass", False):
            rec["violation"] = "odd-order B^4 fails a necessary condition"
    if _is_moore(seq):
        expect = len(enumerate_automorphisms(seq.H_mid))
        if bres.order != expect:
            rec["violation"] = f"Moore sequence: |B| = {bres.order} but |Aut(H)| = {expect}"
    return rec


def examine_even_order(seq: GammaSequence) -> dict:
    rec: dict = {"sequence": seq.to_document()}
    try:
        bres = compute_b_group(seq)
    except (NotEnumerable, TooLarge) as e:
        rec["skip"] = f"{type(e).__name__}: {e}"
        return rec
    try:
        w = even_order_witness(seq)
    except (NotEnumerable, TooLarge) as e:
        w = None
        rec["witness_skip"] = f"{type(e).__name__}: {e}"
    if w is not None:
        rec["witness"] = w.to_document()
    problems = []
    if bres.finite:
        rec["b_group"] = {"finite": True, "order": bres.order, "element_orders": _orders_doc(bres)}
        if bres.order > 1 and not bres.has_even_order_element():
            problems.append("nontrivial B without elements of even order")
        if isinstance(w, TrivialCertificate) and bres.order != 1:
            problems.append("trivial certificate but |B| > 1")
        if bres.order == 1 and w is not None and not isinstance(w, TrivialCertificate):
            problems.append("witness found but B is trivial")
        if bres.order > 1 and (w is None or isinstance(w, TrivialCertificate)) and "witness_skip" not in rec:
            problems.append("B has even order but no witness was produced")
        if _is_moore(seq) and bres.order != len(enumerate_automorphisms(seq.H_mid)):
            problems.append("Moore sequence: |B| differs from |Aut(H)|")
    else:
        rec["b_group"] = {"finite": False}
    if problems:
        rec["violation"] = "; ".join(problems)
    return rec


_EXAMINERS = {"odd-order": examine_odd_order, "even-order": examine_even_order}


def _examine_doc(args):
    kind, doc = args
    return _EXAMINERS[kind](GammaSequence.from_document(doc))


def _dump(obj) -> str:
    return json.dumps(obj, sort_keys=True, separators=(",", ":"))


def _header(kind: str, spec: CampaignSpec, estimate: int) -> dict:
    return {
        "kind": "header",
        "schema_version": SCHEMA_VERSION,
        "campaign": kind,
        "spec": spec.to_document(),
        "candidates": estimate,
    }


def _summary(records: list[dict], examined_candidates: int) -> dict:
    orders = Counter()
    skips = violations = infinite = 0
    hits = []
    for r in records:
        if "skip" in r:
            skips += 1
        elif not r["b_group"]["finite"]:
            infinite += 1
        else:
            orders[r["b_group"]["order"]] += 1
        if "violation" in r:
            violations += 1
        if "odd_order_hit" in r:
            hits.append(r["index"])
    return {
        "kind": "summary",
        "candidates_examined": examined_candidates,
        "sequences": len(records),
        "skipped": skips,
        "infinite": infinite,
        "b_orders": {str(k): v for k, v in sorted(orders.items())},
        "odd_order_hits": hits,
        "violations": violations,
    }


@dataclass
class CampaignReport:
    header: dict
    records: list[dict] = field(default_factory=list)
    summary: dict = field(default_factory=dict)

    @property
    def violations(self) -> int:
        return self.summary.get("violations", 0)

    @property
    def odd_order_hits(self) -> list:
        return self.summary.get("odd_order_hits", [])

    def lines(self) -> list[str]:
        return [_dump(self.header)] + [_dump(r) for r in self.records] + [_dump(self.summary)]

    def dumps(self) -> str:
        return "\n".join(self.lines()) + "\n"


def _read_partial(path: str, header: dict) -> list[dict]:
    """Complete records of an interrupted report with the same header."""
    with open(path, encoding="utf-8") as fh:
        text = fh.read()
    lines = text.split("\n")
    if not text.endswith("\n"):
        lines = lines[:-1]  # drop a torn last line
    lines = [ln for ln in lines if ln]
    if not lines:
        return []
    if json.loads(lines[0]) != header:
        raise LiteralError("existing report was produced by a different campaign spec")
    out = []
    for ln in lines[1:]:
        rec = json.loads(ln)
        if rec.get("kind") == "summary":
            break
        out.append(rec)
    return out


def run_campaign(
    kind: str,
    spec: CampaignSpec,
    out: str | None = None,
    resume: bool = False,
    workers: int = 1,
) -> CampaignReport:
    """Examine every enumerated sequence; write a JSONL report to ``out`` if given."""
    if kind not in _EXAMINERS:
        raise ValueError(f"unknown campaign {kind!r}")
    if kind == "odd-order" and spec.n != 2:
        raise DomainError("the odd-order campaign needs n = 2")
    if kind == "even-order" and spec.n < 3:
        raise DomainError("the even-order sweep needs n >= 3")
    estimate = check_bounds(spec)
    header = _header(kind, spec, estimate)
    done: list[dict] = []
    if resume and out and os.path.exists(out):
        done = _read_partial(out, header)
    fh = None
    if out:
        fh = open(out, "w", encoding="utf-8")
        fh.write(_dump(header) + "\n")
        for r in done:
            fh.write(_dump(r) + "\n")
        fh.flush()
    records = list(done)
    examined = 0
    todo = []
    skip = len(done)  # kept sequences whose records are already written
    for seq, rep in enumerate_classified(spec):
        examined += 1
        if rep is not None:
            continue
        if skip:
            skip -= 1
            continue
        todo.append(seq)
    try:
        if workers > 1 and todo:
            with ProcessPoolExecutor(max_workers=workers) as ex:
                results = ex.map(_examine_doc, [(kind, s.to_document()) for s in todo], chunksize=4)
                for res in results:
                    _append(records, res, fh)
        else:
            ex_fn = _EXAMINERS[kind]
            for s in todo:
                _append(records, ex_fn(s), fh)
        summary = _summary(records, examined)
        if fh:
            fh.write(_dump(summary) + "\n")
    finally:
        if fh:
            fh.close()
    return CampaignReport(header, records, summary)


def _append(records, rec, fh):
    rec = {"kind": "record", "index": len(records), **rec}
    records.append(rec)
    if fh:
        fh.write(_dump(rec) + "\n")
        fh.flush()


def run_odd_order_campaign(spec: CampaignSpec | None = None, **kw) -> CampaignReport:
    """Look for a nontrivial finite B^4 of odd order (n = 2)."""
    return run_campaign("odd-order", spec or default_odd_order_spec(), **kw)


def run_even_order_sweep(spec: CampaignSpec | None = None, **kw) -> CampaignReport:
    """Check that every finite B^{n+2} (n >= 3) is trivial or has an element of even order."""
    return run_campaign("even-order", spec or default_even_order_spec(), **kw)


def describe(spec: CampaignSpec) -> str:
    mids = ", ".join(format_group(G) for G in _mids(spec))
    return f"n={spec.n} bottoms={list(spec.bottoms)} tops={list(spec.tops)} mids=[{mids}] |pi|<={spec.max_pi}"
