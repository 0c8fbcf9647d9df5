"""Γ-sequences, Γ-morphisms and the group B^{n+2} of Γ-isomorphisms.

A Γ-sequence is an exact sequence

    H_top --b--> Γ_n^1(H_bot) --i--> pi --h--> H_mid --> 0

with ``H_top`` free.  A Γ-morphism is a triple ``(f_top, f_mid, f_bot)``
for which some ``Ω: pi -> pi'`` makes both squares commute:

    Γ_n^1(f_bot) ∘ b = b' ∘ f_top
    Ω ∘ i = i' ∘ Γ_n^1(f_bot),   h' ∘ Ω = f_mid ∘ h

Ω is only a witness: two morphisms with the same triple are equal.
"""

from __future__ import annotations

import json
import math
from collections import Counter
from dataclasses import dataclass, field
from functools import lru_cache

from .abgroup import (
    TRIVIAL,
    CongruenceSolver,
    FgAbGroup,
    Homomorphism,
    enumerate_automorphisms,
    format_group,
    hom_count,
    hom_generators,
    in_subgroup,
    kernel,
    parse_group,
    section_columns,
    solve_hom_equations,
)
from .errors import InfiniteAutGroup, InternalError, LiteralError, NotEnumerable, ShapeMismatch
from .gamma import GammaGroup, gamma_n1, gamma_n1_morphism


@dataclass(frozen=True)
class GammaSequence:
    n: int
    H_top: FgAbGroup
    H_mid: FgAbGroup
    H_bot: FgAbGroup
    pi: FgAbGroup
    b: Homomorphism
    i: Homomorphism
    h: Homomorphism

    def __post_init__(self):
        if self.n < 2:
            raise ValueError(f"n must be >= 2, got {self.n}")
        G = self.gamma_bot.group
        for name, f, s, t in (
            ("b", self.b, self.H_top, G),
            ("i", self.i, G, self.pi),
            ("h", self.h, self.pi, self.H_mid),
        ):
            if f.source != s or f.target != t:
                raise ShapeMismatch(f"{name} must map {s} -> {t}, got {f.source} -> {f.target}")

    @property
    def gamma_bot(self) -> GammaGroup:
        return gamma_n1(self.n, self.H_bot)

    def is_valid(self) -> bool:
        return not validate(self)

    def to_document(self) -> dict:
        return {
            "n": self.n,
            "H_top": format_group(self.H_top),
            "H_mid": format_group(self.H_mid),
            "H_bot": format_group(self.H_bot),
            "pi": format_group(self.pi),
            "b": [list(r) for r in self.b.matrix],
            "i": [list(r) for r in self.i.matrix],
            "h": [list(r) for r in self.h.matrix],
        }

    @classmethod
    def from_document(cls, doc: dict) -> "GammaSequence":
        try:
            n = int(doc["n"])
            H_top, H_mid, H_bot, pi = (parse_group(doc[k]) for k in ("H_top", "H_mid", "H_bot", "pi"))
            G = gamma_n1(n, H_bot).group
            b = Homomorphism(H_top, G, doc["b"])
            i = Homomorphism(G, pi, doc["i"])
            h = Homomorphism(pi, H_mid, doc["h"])
        except KeyError as e:
            raise LiteralError(f"sequence document is missing field {e}") from None
        except (TypeError, ValueError) as e:
            if isinstance(e, ShapeMismatch):
                raise
            raise LiteralError(f"malformed sequence document: {e}") from None
        return cls(n, H_top, H_mid, H_bot, pi, b, i, h)

    def dumps(self) -> str:
        return json.dumps(self.to_document(), sort_keys=True)


def validate(seq: GammaSequence) -> list[str]:
    """Exactness diagnostics, first failing condition first; empty when valid."""
    problems = []
    if not seq.H_top.is_free():
        problems.append(f"H_top not free: {seq.H_top}")
    if not (seq.i @ seq.b).is_zero():
        problems.append("b/i mismatch: i∘b != 0")
    else:
        _, inc = kernel(seq.i)
        if not all(in_subgroup(seq.i.source, seq.b.columns(), c) for c in inc.columns()):
            problems.append("b/i mismatch: ker i is larger than im b")
    if not (seq.h @ seq.i).is_zero():
        problems.append("i/h mismatch: h∘i != 0")
    else:
        _, inc = kernel(seq.h)
        if not all(in_subgroup(seq.pi, seq.i.columns(), c) for c in inc.columns()):
            problems.append("i/h mismatch: ker h is larger than im i")
    if not seq.h.is_surjective():
        problems.append("h not surjective")
    return problems


def moore_sequence(H: FgAbGroup, n: int) -> GammaSequence:
    """0 -> 0 -> H = H -> 0, the sequence of a Moore space with homology H in degree n+1."""
    G = gamma_n1(n, TRIVIAL).group
    return GammaSequence(
        n,
        TRIVIAL,
        H,
        TRIVIAL,
        H,
        Homomorphism.zero(TRIVIAL, G),
        Homomorphism.zero(G, H),
        Homomorphism.identity(H),
    )


# ---------------------------------------------------------------------------
# morphisms


@dataclass(frozen=True, eq=False)
class GammaMorphism:
    source: GammaSequence
    target: GammaSequence
    f_top: Homomorphism
    f_mid: Homomorphism
    f_bot: Homomorphism
    omega: Homomorphism | None = None

    @property
    def triple(self) -> tuple[Homomorphism, Homomorphism, Homomorphism]:
        return (self.f_top, self.f_mid, self.f_bot)

    @property
    def key(self):
        return (self.f_top.matrix, self.f_mid.matrix, self.f_bot.matrix)

    def __eq__(self, other):
        if not isinstance(other, GammaMorphism):
            return NotImplemented
        return (self.source, self.target, self.key) == (other.source, other.target, other.key)

    def __hash__(self):
        return hash(self.key)

    def __matmul__(self, other: "GammaMorphism") -> "GammaMorphism":
        """Composition ``self ∘ other``; witnesses compose when both are stored."""
        if other.target != self.source:
            raise ShapeMismatch("Γ-morphisms are not composable")
        omega = None
        if self.omega is not None and other.omega is not None:
            omega = self.omega @ other.omega
        return GammaMorphism(
            other.source,
            self.target,
            self.f_top @ other.f_top,
            self.f_mid @ other.f_mid,
            self.f_bot @ other.f_bot,
            omega,
        )

    def is_identity(self) -> bool:
        return all(f.is_identity() for f in self.triple)

    def order(self, limit: int = 10_000):
        """Order of an endomorphism triple; ``math.inf`` if no power up to ``limit`` is the identity."""
        x = self
        for k in range(1, limit + 1):
            if x.is_identity():
                return k
            x = x @ self
        return float("inf")

    def check_omega(self) -> bool:
        """True when the stored Ω makes both squares commute."""
        if self.omega is None:
            return False
        s, t = self.source, self.target
        G = gamma_n1_morphism(s.n, self.f_bot)
        return self.omega @ s.i == t.i @ G and t.h @ self.omega == self.f_mid @ s.h

    def to_document(self) -> dict:
        doc = {k: [list(r) for r in f.matrix] for k, f in zip(("f_top", "f_mid", "f_bot"), self.triple)}
        doc["omega"] = None if self.omega is None else [list(r) for r in self.omega.matrix]
        return doc


def identity_morphism(seq: GammaSequence) -> GammaMorphism:
    return GammaMorphism(
        seq,
        seq,
        Homomorphism.identity(seq.H_top),
        Homomorphism.identity(seq.H_mid),
        Homomorphism.identity(seq.H_bot),
        Homomorphism.identity(seq.pi),
    )


def _check_shapes(source, target, f_top, f_mid, f_bot):
    if source.n != target.n:
        raise ShapeMismatch("sequences have different n")
    for name, f, s, t in (
        ("f_top", f_top, source.H_top, target.H_top),
        ("f_mid", f_mid, source.H_mid, target.H_mid),
        ("f_bot", f_bot, source.H_bot, target.H_bot),
    ):
        if f.source != s or f.target != t:
            raise ShapeMismatch(f"{name} must map {s} -> {t}")


def is_gamma_morphism(source: GammaSequence, target: GammaSequence, f_top, f_mid, f_bot) -> GammaMorphism | None:
    """The triple with a solved Ω witness, or ``None`` when no Ω exists."""
    _check_shapes(source, target, f_top, f_mid, f_bot)
    G = gamma_n1_morphism(source.n, f_bot)
    if G @ source.b != target.b @ f_top:
        return None
    omega = solve_hom_equations(
        source.pi,
        target.pi,
        [(source.i, target.i @ G, "pre"), (target.h, f_mid @ source.h, "post")],
    )
    if omega is None:
        return None
    return GammaMorphism(source, target, f_top, f_mid, f_bot, omega)


# ---------------------------------------------------------------------------
# families of morphisms with a shared Ω computation


_BFS_LIMIT = 1 << 12


@lru_cache(maxsize=4096)
def _corrections(h_tgt: Homomorphism, H_mid: FgAbGroup):
    """``{h' ∘ ψ : ψ ∈ Hom(H_mid, pi')}`` as a dict key -> ψ, or ``None`` if too big."""
    if hom_count(H_mid, h_tgt.target) > _BFS_LIMIT:
        return None
    zero = Homomorphism.zero(H_mid, h_tgt.source)
    gens = [(g, h_tgt @ g) for g in hom_generators(H_mid, h_tgt.source)]
    seen = {(h_tgt @ zero).matrix: zero}
    frontier = [(zero, h_tgt @ zero)]
    while frontier:
        nxt = []
        for psi, val in frontier:
            for g, hg in gens:
                v = val + hg
                if v.matrix not in seen:
                    p = psi + g
                    seen[v.matrix] = p
                    nxt.append((p, v))
        frontier = nxt
    return seen


@lru_cache(maxsize=256)
def _correction_solver(h_tgt: Homomorphism, H_mid: FgAbGroup):
    # unknowns: coefficients of ψ over hom_generators; equations: entries of h' ∘ ψ
    gens = hom_generators(H_mid, h_tgt.source)
    images = [h_tgt @ g for g in gens]
    rows = [(k, j) for k in range(h_tgt.target.ngens) for j in range(H_mid.ngens)]
    A = [[im.matrix[k][j] for im in images] for k, j in rows]
    moduli = [h_tgt.target.orders[k] for k, _ in rows]
    return gens, rows, CongruenceSolver(A, moduli, len(gens))


def _correction_for(h_tgt: Homomorphism, d: Homomorphism):
    table = _corrections(h_tgt, d.source)
    if table is not None:
        return table.get(d.matrix)
    gens, rows, solver = _correction_solver(h_tgt, d.source)
    c = solver.solve([d.matrix[k][j] for k, j in rows])
    if c is None:
        return None
    psi = Homomorphism.zero(d.source, h_tgt.source)
    for coef, g in zip(c, gens):
        if coef:
            psi = psi + coef * g
    return psi


def morphism_family(source: GammaSequence, target: GammaSequence, tops, mids, bots, first_only: bool = False):
    """All Γ-morphisms whose triple is drawn from ``tops × mids × bots``.

    For fixed ``(f_top, f_bot)`` the admissible Ω form a coset
    ``Ω_0 + Hom(H_mid, pi') ∘ h``; the induced maps on ``H_mid`` therefore
    form the coset ``f_0 + h' ∘ Hom(H_mid, pi')``, so one congruence solve
    per pair replaces one per triple.
    """
    n = source.n
    sec = section_columns(source.h)
    out = []
    for ft in tops:
        b_ft = target.b @ ft
        for fb in bots:
            G = gamma_n1_morphism(n, fb)
            if G @ source.b != b_ft:
                continue
            om0 = solve_hom_equations(source.pi, target.pi, [(source.i, target.i @ G, "pre")])
            if om0 is None:
                continue
            f0 = Homomorphism.from_columns(source.H_mid, target.H_mid, [target.h(om0(x)) for x in sec])
            for fm in mids:
                psi = _correction_for(target.h, fm - f0)
                if psi is None:
                    continue
                omega = om0 + psi @ source.h
                out.append(GammaMorphism(source, target, ft, fm, fb, omega))
                if first_only:
                    return out
    return out


def find_isomorphism(source: GammaSequence, target: GammaSequence) -> GammaMorphism | None:
    """Some Γ-isomorphism ``source -> target`` between sequences on identical groups."""
    if source.n != target.n:
        return None
    for a, b in (
        (source.H_top, target.H_top),
        (source.H_mid, target.H_mid),
        (source.H_bot, target.H_bot),
        (source.pi, target.pi),
    ):
        if a != b:
            if a.is_isomorphic(b):
                raise ValueError("isomorphism search expects identical group presentations")
            return None
    try:
        tops, mids, bots = (enumerate_automorphisms(G) for G in (source.H_top, source.H_mid, source.H_bot))
    except InfiniteAutGroup as e:
        raise NotEnumerable(str(e)) from None
    found = morphism_family(source, target, tops, mids, bots, first_only=True)
    return found[0] if found else None


# ---------------------------------------------------------------------------
# the B-group


@dataclass
class FiniteB:
    elements: list[GammaMorphism]
    element_orders: list[int] = field(default_factory=list)

    finite = True

    @property
    def order(self) -> int:
        return len(self.elements)

    def order_counts(self) -> dict[int, int]:
        return dict(sorted(Counter(self.element_orders).items()))

    def has_even_order_element(self) -> bool:
        return any(o % 2 == 0 for o in self.element_orders)

    def summary(self) -> dict:
        return {"finite": True, "order": self.order, "element_orders": self.element_orders}


@dataclass
class InfiniteB:
    witness: GammaMorphism
    reason: str = ""

    finite = False
    order = float("inf")

    def summary(self) -> dict:
        return {"finite": False, "reason": self.reason, "witness": self.witness.to_document()}


BGroupResult = FiniteB | InfiniteB


def _automorphism_lists(seq: GammaSequence):
    try:
        return tuple(enumerate_automorphisms(G) for G in (seq.H_top, seq.H_mid, seq.H_bot))
    except InfiniteAutGroup as e:
        raise NotEnumerable(f"{e}; no infinite-order witness applies") from None


def _assert_group(elements: list[GammaMorphism], identity: GammaMorphism) -> None:
    """Closure check: the subgroup generated by ``elements`` must be exactly ``elements``."""
    keys = {m.key for m in elements}
    if identity.key not in keys:
        raise InternalError("identity triple missing from B-group")
    generated = {identity.key: identity}
    gens: list[GammaMorphism] = []
    for m in elements:
        if m.key in generated:
            continue
        gens.append(m)
        frontier = list(generated.values())
        while frontier:
            nxt = []
            for x in frontier:
                for g in gens:
                    y = x @ g
                    if y.key not in generated:
                        if y.key not in keys:
                            raise InternalError("B-group is not closed under composition")
                        generated[y.key] = y
                        nxt.append(y)
            frontier = nxt
    if len(generated) != len(keys):
        raise InternalError("B-group closure mismatch")


def _element_orders(elements: list[GammaMorphism], identity: GammaMorphism) -> list[int]:
    # identity is the triple only, so the order is the lcm of the component orders
    bound = len(elements)
    cache: dict = {}

    def comp_order(f: Homomorphism) -> int:
        k = cache.get(f.matrix)
        if k is None:
            x, k = f, 1
            while not x.is_identity():
                x, k = x @ f, k + 1
                if k > bound:
                    raise InternalError("element order exceeds group order")
            cache[f.matrix] = k
        return k

    return [math.lcm(*(comp_order(f) for f in m.triple)) for m in elements]


def compute_b_group(seq: GammaSequence, method: str = "family") -> BGroupResult:
    """B^{n+2} of a valid sequence.

    ``method="family"`` shares one Ω solve per ``(f_top, f_bot)`` pair;
    ``method="triples"`` checks every triple with ``is_gamma_morphism``.
    Both enumerate triples in lexicographic order of the three
    automorphism lists.
    """
    from .analysis import infinite_witness

    w = infinite_witness(seq)
    if w is not None:
        return InfiniteB(w.morphism, w.step)
    tops, mids, bots = _automorphism_lists(seq)
    if method == "family":
        found = morphism_family(seq, seq, tops, mids, bots)
    elif method == "triples":
        found = []
        for ft in tops:
            for fm in mids:
                for fb in bots:
                    m = is_gamma_morphism(seq, seq, ft, fm, fb)
                    if m is not None:
                        found.append(m)
    else:
        raise ValueError(f"unknown method {method!r}")
    pos = [{f.matrix: k for k, f in enumerate(lst)} for lst in (tops, mids, bots)]
    found.sort(key=lambda m: (pos[0][m.f_top.matrix], pos[1][m.f_mid.matrix], pos[2][m.f_bot.matrix]))
    ident = identity_morphism(seq)
    _assert_group(found, ident)
    return FiniteB(found, _element_orders(found, ident))
