"""Witness constructions for elements of B^{n+2}.

Every construction here produces an explicit triple together with its Ω
and re-validates it through the Γ-morphism checker before returning.
"""

from __future__ import annotations

from dataclasses import dataclass

from sympy import factorint

from .abgroup import (
    FgAbGroup,
    Homomorphism,
    Zmod,
    block_sum,
    canonical_iso,
    direct_sum,
    enumerate_automorphisms,
    exponent,
    hom_generators,
    kernel,
    lift,
    solve_hom_equations,
    subgroup,
)
from .errors import (
    InternalError,
    InvalidCertificate,
    NoInvolution,
    NotEnumerable,
    NotOrder4,
    TooLarge,
    WrongN,
)
from .gamma import QuadraticElement, element_order, gamma_morphism
from .gseq import GammaMorphism, GammaSequence, is_gamma_morphism

SPLIT_SEARCH_BOUND = 1 << 12


@dataclass(frozen=True)
class Witness:
    """An element of B^{n+2} tagged with the construction that produced it."""

    step: str
    morphism: GammaMorphism

    def to_document(self) -> dict:
        return {"step": self.step, "order": _order_doc(self.morphism), **self.morphism.to_document()}


@dataclass(frozen=True)
class TrivialCertificate:
    """The case analysis shows B^{n+2} is the trivial group."""

    step: str
    reason: str

    def to_document(self) -> dict:
        return {"step": self.step, "trivial": True, "reason": self.reason}


def _order_doc(m: GammaMorphism):
    if m.source != m.target:
        return None
    o = m.order(limit=64)
    return "infinite" if o == float("inf") else o


def certify(m: GammaMorphism) -> GammaMorphism:
    """Re-check a constructed morphism; failure means a construction bug."""
    if m.source == m.target and not all(f.is_automorphism() for f in m.triple):
        raise InternalError("constructed triple is not invertible")
    if m.omega is not None and m.check_omega():
        return m
    found = is_gamma_morphism(m.source, m.target, *m.triple)
    if found is None:
        raise InternalError(f"constructed triple is not a Γ-morphism: {m.to_document()}")
    return found


def _conjugate(basis: Homomorphism, f_std: Homomorphism) -> Homomorphism:
    """``basis ∘ f_std ∘ basis⁻¹``: ``f_std`` written in the coordinates of ``basis.target``."""
    return basis @ f_std @ basis.inverse()


def _swap(G: FgAbGroup, a: int, b: int) -> Homomorphism:
    M = [[int(r == c) for c in range(G.ngens)] for r in range(G.ngens)]
    M[a][a] = M[b][b] = 0
    M[a][b] = M[b][a] = 1
    return Homomorphism(G, G, M)


def _involution(A: FgAbGroup) -> Homomorphism:
    """A nonidentity involution of ``A`` (``A`` not trivial, not Z_2)."""
    if exponent(A) != 2:
        return Homomorphism.scalar(A, -1)
    idx = [k for k, o in enumerate(A.orders) if o == 2]
    if len(idx) < 2:
        raise NoInvolution(f"{A} has no nonidentity involution")
    return _swap(A, idx[0], idx[1])


# ---------------------------------------------------------------------------
# infinite-order witnesses


def _unipotent_certified(M) -> bool:
    n = len(M)
    N = [[M[r][c] - int(r == c) for c in range(n)] for r in range(n)]
    N2 = [[sum(N[r][k] * N[k][c] for k in range(n)) for c in range(n)] for r in range(n)]
    return any(any(row) for row in N) and not any(any(row) for row in N2)


def infinite_witness(seq: GammaSequence) -> Witness | None:
    """A certified element of infinite order in B^{n+2}, or ``None``.

    Two constructions: a unipotent shear on a rank-two free summand of
    ``H_top`` whose off-diagonal entry kills the image of ``b``, and for
    ``n >= 3`` a shear with even off-diagonal entry on two free
    generators of ``H_bot``, invisible after tensoring with Z_2.
    """
    G = seq.gamma_bot.group
    free_top = [k for k, o in enumerate(seq.H_top.orders) if o == 0]
    if len(free_top) >= 2 and G.is_finite():
        p, q = free_top[:2]
        sub, _ = subgroup(G, [seq.b.column(p), seq.b.column(q)])
        k = exponent(sub)
        M = [[int(r == c) for c in range(seq.H_top.ngens)] for r in range(seq.H_top.ngens)]
        M[p][q] = k
        f = Homomorphism(seq.H_top, seq.H_top, M)
        m = GammaMorphism(
            seq, seq, f, Homomorphism.identity(seq.H_mid), Homomorphism.identity(seq.H_bot),
            Homomorphism.identity(seq.pi),
        )
        if not _unipotent_certified(M):
            raise InternalError("top shear is not unipotent")
        return Witness("top-unipotent-shear", certify(m))
    free_bot = [k for k, o in enumerate(seq.H_bot.orders) if o == 0]
    if seq.n >= 3 and len(free_bot) >= 2:
        p, q = free_bot[:2]
        M = [[int(r == c) for c in range(seq.H_bot.ngens)] for r in range(seq.H_bot.ngens)]
        M[p][q] = 2
        f = Homomorphism(seq.H_bot, seq.H_bot, M)
        m = GammaMorphism(
            seq, seq, Homomorphism.identity(seq.H_top), Homomorphism.identity(seq.H_mid), f,
            Homomorphism.identity(seq.pi),
        )
        if not _unipotent_certified(M):
            raise InternalError("bottom shear is not unipotent")
        return Witness("bottom-mod2-kernel-shear", certify(m))
    return None


# ---------------------------------------------------------------------------
# small involutions


def negate_all(seq: GammaSequence) -> GammaMorphism:
    """``(−id, −id, −id)`` with ``Ω = −id``; a Γ-morphism whenever ``n >= 3``."""
    return certify(
        GammaMorphism(
            seq, seq, Homomorphism.scalar(seq.H_top, -1), Homomorphism.scalar(seq.H_mid, -1),
            Homomorphism.scalar(seq.H_bot, -1), Homomorphism.scalar(seq.pi, -1),
        )
    )


def negate_bottom(seq: GammaSequence) -> GammaMorphism:
    """``(id, id, −id)``: Γ_n^1 sends ``−id`` to the identity."""
    return certify(
        GammaMorphism(
            seq, seq, Homomorphism.identity(seq.H_top), Homomorphism.identity(seq.H_mid),
            Homomorphism.scalar(seq.H_bot, -1), Homomorphism.identity(seq.pi),
        )
    )


def realise_top(seq: GammaSequence, f_top: Homomorphism) -> GammaMorphism | None:
    """``(f_top, id, id)`` when it is a Γ-morphism (always so when ``b = 0``)."""
    return is_gamma_morphism(
        seq, seq, f_top, Homomorphism.identity(seq.H_mid), Homomorphism.identity(seq.H_bot)
    )


# ---------------------------------------------------------------------------
# split summands of H_mid


@dataclass(frozen=True)
class SplitCertificate:
    """``pi ≅ A ⊕ B`` and ``H_mid = A ⊕ C`` with ``h = id_A ⊕ g``."""

    A: FgAbGroup
    B: FgAbGroup
    C: FgAbGroup
    iso_pi: Homomorphism  # A ⊕ B -> pi
    iso_h: Homomorphism  # A ⊕ C -> H_mid
    g: Homomorphism  # B -> C

    def verify(self, seq: GammaSequence) -> bool:
        if self.A.is_trivial():
            return False
        AB, AC = direct_sum(self.A, self.B), direct_sum(self.A, self.C)
        if self.iso_pi.source != AB or self.iso_pi.target != seq.pi:
            return False
        if self.iso_h.source != AC or self.iso_h.target != seq.H_mid:
            return False
        for f in (self.iso_pi, self.iso_h):
            if not (f.is_injective() and f.is_surjective()):
                return False
        lhs = seq.h @ self.iso_pi
        rhs = self.iso_h @ block_sum(Homomorphism.identity(self.A), self.g)
        return lhs == rhs

    @property
    def proper(self) -> bool:
        return not self.C.is_trivial()


def _split_along(seq: GammaSequence, A: FgAbGroup, incl: Homomorphism) -> SplitCertificate | None:
    rho = solve_hom_equations(seq.H_mid, A, [(incl, Homomorphism.identity(A), "pre")])
    if rho is None:
        return None
    s = solve_hom_equations(A, seq.pi, [(seq.h, incl, "post")])
    if s is None:
        return None
    C, inc_C = kernel(rho)
    B, inc_B = kernel(rho @ seq.h)
    g = solve_hom_equations(B, C, [(inc_C, seq.h @ inc_B, "post")])
    if g is None:
        raise InternalError("complement map does not land in the complement")
    cert = SplitCertificate(
        A,
        B,
        C,
        Homomorphism.from_columns(direct_sum(A, B), seq.pi, s.columns() + inc_B.columns()),
        Homomorphism.from_columns(direct_sum(A, C), seq.H_mid, incl.columns() + inc_C.columns()),
        g,
    )
    if not cert.verify(seq):
        raise InternalError("split certificate failed verification")
    return cert


def find_h_split(seq: GammaSequence, bound: int = SPLIT_SEARCH_BOUND) -> SplitCertificate | None:
    """A nontrivial ``h``-split subgroup of ``H_mid``, or ``None``.

    Candidates are cyclic prime-power summands ``⟨x⟩`` (any element ``x``,
    which covers summands of every twisted decomposition), then
    ``Z_2 ⊕ Z_2`` spanned by two split ``Z_2``'s, then single ``Z_2``'s,
    preferring proper ones with a complement of even order.  A summand
    ``A`` is split exactly when it is a direct summand of ``H_mid`` and its
    inclusion lifts through ``h``.
    """
    if not (seq.pi.is_finite() and seq.H_mid.is_finite()):
        raise NotEnumerable("split search needs finite pi and H_mid")
    if seq.pi.order > bound:
        raise TooLarge(f"|pi| = {seq.pi.order} exceeds split search bound {bound}")
    H = seq.H_mid
    seen: set = set()
    big: list = []
    twos: list = []
    for x in H.elements():
        q = H.element_order(x)
        if q < 2 or len(factorint(q)) != 1:
            continue
        key = frozenset(H.reduce([k * c for c in x]) for k in range(q))
        if key in seen:
            continue
        seen.add(key)
        (big if q > 2 else twos).append((q, x))
    big.sort(key=lambda t: t[0])
    for q, x in big:
        A = Zmod(q)
        cert = _split_along(seq, A, Homomorphism.from_columns(A, H, [x]))
        if cert is not None:
            return cert
    split_twos = []
    for _, x in twos:
        A = Zmod(2)
        cert = _split_along(seq, A, Homomorphism.from_columns(A, H, [x]))
        if cert is not None:
            split_twos.append((x, cert))
    V = FgAbGroup((2, 2))
    for a in range(len(split_twos)):
        for b in range(a + 1, len(split_twos)):
            cert = _split_along(seq, V, Homomorphism.from_columns(V, H, [split_twos[a][0], split_twos[b][0]]))
            if cert is not None:
                return cert
    for _, cert in split_twos:
        if cert.proper and cert.C.order % 2 == 0:
            return cert
    return split_twos[0][1] if split_twos else None


def involution_from_split(seq: GammaSequence, cert: SplitCertificate) -> GammaMorphism | None:
    """An order-two element ``(id, f, id)`` of B built from a split summand.

    For ``A ≇ Z_2`` the involution of ``A`` extends by the identity on
    ``C`` (and on ``B`` for Ω).  For a proper ``A = Z_2`` with an
    epimorphism ``τ: C -> Z_2`` the shear ``(t, c) ↦ (t + τ(c), c)`` works,
    with ``Ω(t, b) = (t + τ(g(b)), b)``.
    """
    if not cert.verify(seq):
        raise InvalidCertificate("certificate does not decompose h")
    A, B, C = cert.A, cert.B, cert.C
    idA, idB, idC = (Homomorphism.identity(G) for G in (A, B, C))
    if not A.is_isomorphic(Zmod(2)):
        iota = _involution(A)
        f_mid = _conjugate(cert.iso_h, block_sum(iota, idC))
        omega = _conjugate(cert.iso_pi, block_sum(iota, idB))
    else:
        tau = next((t for t in _nonzero_maps_to_z2(C)), None)
        if tau is None:
            return None
        AC, AB = direct_sum(A, C), direct_sum(A, B)
        # (t, c) ↦ (t + τ(c), c): identity plus τ in the top row
        shear_C = Homomorphism(AC, AC, _shear_matrix(A, C, tau))
        tg = tau @ cert.g
        shear_B = Homomorphism(AB, AB, _shear_matrix(A, B, tg))
        f_mid = _conjugate(cert.iso_h, shear_C)
        omega = _conjugate(cert.iso_pi, shear_B)
    m = GammaMorphism(
        seq, seq, Homomorphism.identity(seq.H_top), f_mid, Homomorphism.identity(seq.H_bot), omega
    )
    return certify(m)


def _nonzero_maps_to_z2(C: FgAbGroup):
    T = Zmod(2)
    for g in hom_generators(C, T):
        if not g.is_zero():
            yield g


def _shear_matrix(A: FgAbGroup, D: FgAbGroup, tau: Homomorphism):
    """Matrix of ``(t, d) ↦ (t + τ(d), d)`` on ``A ⊕ D`` with ``A`` cyclic."""
    n = 1 + D.ngens
    M = [[int(r == c) for c in range(n)] for r in range(n)]
    for j in range(D.ngens):
        M[0][1 + j] = tau.matrix[0][j]
    return M


# ---------------------------------------------------------------------------
# even-order witnesses for n >= 3


def even_order_witness(seq: GammaSequence) -> Witness | TrivialCertificate | None:
    """An element of order two in B^{n+2}, or a proof that B is trivial.

    Steps, in order: negation of everything when some homology group is
    not elementary abelian 2; split summands of ``H_mid``; and in the
    unsplit case ``pi ≅ Z_2^a ⊕ Z_4^c`` a swap of two ``Z_2`` factors
    (``a >= 2``), a shear of the ``Z_2`` factor into a ``Z_4`` factor
    (``a = 1``), or a swap of two ``Z_4`` factors (``a = 0``).
    """
    if seq.n < 3:
        raise WrongN("even-order witnesses are only available for n >= 3")
    if not all(G.is_elementary_abelian(2) for G in (seq.H_top, seq.H_mid, seq.H_bot)):
        m = negate_all(seq)
        if m.is_identity():
            raise InternalError("negation is trivial on groups that are not elementary abelian 2")
        return Witness("neg-id-all", m)
    cert = find_h_split(seq)
    if cert is not None:
        return _split_case(seq, cert)
    return _unsplit_case(seq)


def _checked_order_two(step: str, m: GammaMorphism) -> Witness:
    m = certify(m)
    if m.is_identity() or not (m @ m).is_identity():
        raise InternalError(f"{step}: constructed element does not have order two")
    return Witness(step, m)


def _split_case(seq: GammaSequence, cert: SplitCertificate):
    if not cert.A.is_isomorphic(Zmod(2)):
        return _checked_order_two("split-summand-involution", involution_from_split(seq, cert))
    if cert.proper:
        m = involution_from_split(seq, cert)
        if m is None:
            raise InternalError("proper Z_2 split without an epimorphism of the complement onto Z_2")
        return _checked_order_two("split-z2-shear", m)
    # H_mid = Z_2 splits off: any automorphism of H_bot extends
    idx = [k for k, o in enumerate(seq.H_bot.orders) if o == 2]
    if len(idx) < 2:
        return TrivialCertificate("split-z2-small-bottom", "H_mid = Z_2 splits and H_bot has rank at most one")
    m = is_gamma_morphism(
        seq, seq, Homomorphism.identity(seq.H_top), Homomorphism.identity(seq.H_mid), _swap(seq.H_bot, idx[0], idx[1])
    )
    if m is None:
        raise InternalError("split sequence does not admit the bottom swap")
    return _checked_order_two("split-bottom-swap", m)


def _unsplit_case(seq: GammaSequence):
    C, to_C, from_C = canonical_iso(seq.pi)
    if any(o not in (2, 4) for o in C.orders):
        raise InternalError(f"unsplit pi has unexpected shape {C}")
    a = sum(1 for o in C.orders if o == 2)
    c = len(C.orders) - a
    if c != seq.H_mid.rank:
        raise InternalError("unsplit sequence: Z_4 factors do not match H_mid")
    iC = to_C @ seq.i
    basis = C.basis()
    xs, us = basis[:a], basis[a:]
    X = [lift(iC, x) for x in xs]
    Y = [lift(iC, C.reduce([2 * v for v in u])) for u in us]
    if any(v is None for v in X + Y):
        raise InternalError("unsplit sequence: Ω_1(pi) is not the image of i")
    V = FgAbGroup((2,) * (a + c))
    T = Homomorphism.from_columns(V, seq.H_bot, X + Y)
    if a + c == 0 or (a == 1 and c == 0) or (a == 0 and c == 1):
        return TrivialCertificate(
            "unsplit-trivial", f"unsplit sequence with pi ≅ {C}: every Γ-isomorphism is the identity"
        )
    idm, idt = Homomorphism.identity(seq.H_mid), Homomorphism.identity(seq.H_top)
    if a >= 2:
        f_bot = _conjugate(T, _swap(V, 0, 1))
        om = _swap(C, 0, 1)
        step, f_mid = "unsplit-swap-z2", idm
    elif a == 1:
        # x ↦ x + y_1 on H_bot, x ↦ x + 2u_1 on pi
        S = [[int(r == c2) for c2 in range(a + c)] for r in range(a + c)]
        S[1][0] = 1
        f_bot = _conjugate(T, Homomorphism(V, V, S))
        M = [[int(r == c2) for c2 in range(C.ngens)] for r in range(C.ngens)]
        M[1][0] = 2
        om = Homomorphism(C, C, M)
        step, f_mid = "unsplit-shear", idm
    else:
        f_bot = _conjugate(T, _swap(V, 0, 1))
        om = _swap(C, 0, 1)
        W = FgAbGroup((2,) * c)
        Mb = Homomorphism.from_columns(W, seq.H_mid, [seq.h(from_C(u)) for u in us])
        step, f_mid = "unsplit-swap-z4", _conjugate(Mb, _swap(W, 0, 1))
    omega = from_C @ om @ to_C
    return _checked_order_two(step, GammaMorphism(seq, seq, idt, f_mid, f_bot, omega))


# ---------------------------------------------------------------------------
# normal form of an order-4 element of Γ(Z_2^r)


@dataclass(frozen=True)
class QuadraticNormalForm:
    """``χ = γ(e_1) + Σ α_j e_j⊗e_j + Σ β_j e_j⊗e_{j+1}`` in the basis ``new_basis``."""

    chi: QuadraticElement
    new_basis: tuple[tuple[int, ...], ...]
    alphas: tuple[int, ...]
    betas: tuple[int, ...]

    @property
    def r(self) -> int:
        return len(self.new_basis)

    def basis_map(self) -> Homomorphism:
        G = self.chi.parent.base
        return Homomorphism.from_columns(G, G, list(self.new_basis))

    def expand(self) -> QuadraticElement:
        """Re-expand the normal form in the original Γ-basis."""
        P = self.chi.parent
        e = self.new_basis
        out = P.gamma(e[0])
        for j, a in enumerate(self.alphas):
            if a:
                out = out + P.tensor(e[j], e[j])
        for j, b in enumerate(self.betas):
            if b:
                out = out + P.tensor(e[j], e[j + 1])
        return out

    def to_document(self) -> dict:
        return {
            "basis": [list(v) for v in self.new_basis],
            "alphas": list(self.alphas),
            "betas": list(self.betas),
        }


def _coordinates(chi: QuadraticElement, E: Homomorphism) -> tuple[int, ...]:
    """Coefficients of ``chi`` in the tag basis attached to the columns of ``E``."""
    return gamma_morphism(E.inverse())(chi.coeffs)


def normal_form_order4(chi: QuadraticElement) -> QuadraticNormalForm:
    """Inductive rebasing of an order-4 ``χ ∈ Γ(Z_2^r)`` into the chain form.

    ``e_1`` is the sum of the ``h_i`` whose γ-coefficient is odd; each
    further ``e_{k+1}`` collects the ``h_s`` paired with ``e_k``, or is the
    next unused ``h`` when ``e_k`` pairs with nothing.  Pivots realise the
    "without loss of generality" reorderings.
    """
    P = chi.parent
    G = P.base
    if not P.quadratic or any(o != 2 for o in G.orders):
        raise NotOrder4("normal form needs χ in Γ of an elementary abelian 2-group")
    if element_order(chi) != 4:
        raise NotOrder4(f"χ has order {element_order(chi)}, not 4")
    r = G.ngens
    idx = P._index()
    std = G.basis()

    def gcoef(v, k):
        return v[idx[("g", k)]]

    def tcoef(v, k, l):
        return v[idx[("t", min(k, l), max(k, l))]]

    # the first vector
    a = [gcoef(chi.coeffs, k) % 2 for k in range(r)]
    piv = a.index(1)
    e1 = G.reduce(a)
    rest = [std[k] for k in range(r) if k != piv]
    basis = [e1] + rest
    fixed = 1
    while fixed < r:
        E = Homomorphism.from_columns(G, G, basis)
        v = _coordinates(chi, E)
        k = fixed - 1
        b = [tcoef(v, k, s) % 2 for s in range(fixed, r)]
        if any(b):
            p = fixed + b.index(1)
            new = [0] * r
            for s in range(fixed, r):
                if b[s - fixed]:
                    new = [x + y for x, y in zip(new, basis[s])]
            nxt = G.reduce(new)
            tail = [basis[s] for s in range(fixed, r) if s != p]
            basis = basis[:fixed] + [nxt] + tail
        fixed += 1
    E = Homomorphism.from_columns(G, G, basis)
    v = _coordinates(chi, E)
    g1 = gcoef(v, 0)
    alphas = [((g1 - 1) // 2) % 2] + [(gcoef(v, k) // 2) % 2 for k in range(1, r)]
    betas = [tcoef(v, k, k + 1) for k in range(r - 1)]
    nf = QuadraticNormalForm(chi, tuple(basis), tuple(alphas), tuple(betas))
    if nf.expand() != chi:
        raise InternalError("normal form does not re-expand to χ")
    return nf


# rows: (α_r, β_{r-1}, α_{r-1}, β_{r-2}) with None as wildcard -> images of
# e_{r-1}, e_r as coefficient triples over (e_{r-2}, e_{r-1}, e_r)
INVOLUTION_TABLE = (
    ((0, 0, None, None), ((0, 1, 0), (0, 1, 1))),
    ((1, 1, None, None), ((0, 1, 0), (0, 1, 1))),
    ((0, 1, 0, 0), ((0, 0, 1), (0, 1, 0))),
    ((0, 1, 0, 1), ((1, 0, 1), (1, 1, 0))),
    ((0, 1, 1, 0), ((0, 1, 1), (0, 0, 1))),
    ((0, 1, 1, 1), ((1, 1, 1), (0, 0, 1))),
    ((1, 0, 0, 0), ((1, 1, 0), (0, 0, 1))),
    ((1, 0, 0, 1), ((1, 1, 0), (1, 0, 1))),
    ((1, 0, 1, 0), ((0, 0, 1), (0, 1, 0))),
    ((1, 0, 1, 1), ((1, 1, 0), (0, 0, 1))),
)


def table_row(nf: QuadraticNormalForm):
    r = nf.r
    key = (nf.alphas[r - 1], nf.betas[r - 2], nf.alphas[r - 2], nf.betas[r - 3])
    for pattern, images in INVOLUTION_TABLE:
        if all(p is None or p == k for p, k in zip(pattern, key)):
            return key, images
    raise InternalError(f"no table row for {key}")


def _fixes(g: Homomorphism, chi: QuadraticElement) -> bool:
    return gamma_morphism(g)(chi.coeffs) == chi.coeffs


def involution_from_table(nf: QuadraticNormalForm) -> Homomorphism:
    """An order-two automorphism ``g`` of ``Z_2^r`` with ``Γ(g)(χ) = χ``.

    For ``r >= 3`` it is read off the lookup table in the normal-form
    basis; for ``r = 2`` the shear ``e_2 ↦ e_1 + e_2`` is tried and then
    the whole automorphism group.
    """
    chi = nf.chi
    G = chi.parent.base
    r = nf.r
    if r == 1:
        raise NoInvolution("Aut(Z_2) is trivial")
    E = nf.basis_map()
    V = FgAbGroup((2,) * r)
    if r == 2:
        cand = [_conjugate(E, Homomorphism(V, V, [[1, 1], [0, 1]]))]
        cand += [f for f in enumerate_automorphisms(G) if not f.is_identity() and (f @ f).is_identity()]
        for g in cand:
            if (g @ g).is_identity() and not g.is_identity() and _fixes(g, chi):
                return g
        raise NoInvolution("no involution of Z_2^2 fixes χ")
    _, (img1, img2) = table_row(nf)
    M = [[int(a == b) for b in range(r)] for a in range(r)]
    for col, img in ((r - 2, img1), (r - 1, img2)):
        for k in range(r):
            M[k][col] = 0
        for off, c in zip((r - 3, r - 2, r - 1), img):
            M[off][col] = c
    g = _conjugate(E, Homomorphism(V, V, M))
    if g.is_identity() or not (g @ g).is_identity() or not _fixes(g, chi):
        raise InternalError(f"table involution fails for key {table_row(nf)[0]}")
    return g


def stabilizer(chi: QuadraticElement) -> list[Homomorphism]:
    """Automorphisms ``f`` of the base with ``Γ(f)(χ) = χ``."""
    return [f for f in enumerate_automorphisms(chi.parent.base) if _fixes(f, chi)]


# ---------------------------------------------------------------------------
# necessary conditions for a nontrivial odd-order B^4


def check_odd_order_conditions(seq: GammaSequence, bres) -> dict:
    """Evaluate the four necessary conditions for an odd-order B^4 > 1.

    (1) rank H_top <= 1; (2) pi, H_mid are 2-groups and H_bot is
    elementary abelian 2; (3) rank H_mid <= r(r+1)/2 - rank H_top <= rank pi
    with r = rank H_bot; (4) the projection to Aut(H_bot) is injective.
    """
    if seq.n != 2 or not getattr(bres, "finite", False) or bres.order == 1 or bres.order % 2 == 0:
        return {"hypotheses": False, "conditions": {}}
    r = seq.H_bot.rank
    top = seq.H_top.rank
    bound = r * (r + 1) // 2 - top
    bots = {m.f_bot.matrix for m in bres.elements}
    conds = {
        "1": top <= 1,
        "2": seq.pi.is_p_group(2) and seq.H_mid.is_p_group(2) and seq.H_bot.is_elementary_abelian(2),
        "3": seq.H_mid.rank <= bound <= seq.pi.rank,
        "4": len(bots) == len(bres.elements),
    }
    return {"hypotheses": True, "conditions": conds, "all_pass": all(conds.values())}


def rank_bound_holds(rank_mid: int, rank_bot: int, rank_top: int, rank_pi: int) -> bool:
    """The inequality chain of condition (3) on bare ranks."""
    bound = rank_bot * (rank_bot + 1) // 2 - rank_top
    return rank_mid <= bound <= rank_pi
