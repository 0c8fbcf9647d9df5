"""Finitely generated abelian groups, their elements and homomorphisms.

A group is stored as an ordered direct sum of cyclic groups, ``orders[k]``
being the order of generator ``k`` (``0`` marks an infinite cyclic factor).
Canonical groups list the free generators first and then the invariant
factors ``d_1 | d_2 | ...``; two canonical groups are isomorphic iff equal.
Non-canonical presentations are allowed because the quadratic functor
produces them naturally (see ``gamma``).

A homomorphism ``S -> T`` is an integer matrix with one row per generator of
``T`` and one column per generator of ``S``; column ``j`` is the image of
generator ``j``.  Rows belonging to torsion generators are kept reduced.

Everything uses Python integers, so intermediate growth in Smith normal form
reductions never overflows.

>>> G = parse_group("free^1 x 2 x 4")
>>> G.free_rank, G.torsion
(1, (2, 4))
>>> h = Homomorphism(Z, Z, [[2]])
>>> Q, proj = cokernel(h)
>>> str(Q)
'Z_2'
"""

from __future__ import annotations

import itertools
import math
import re
from dataclasses import dataclass, field
from functools import lru_cache, reduce
from typing import Iterable, Iterator, Sequence

from sympy import factorint

from .errors import IllDefined, InfiniteAutGroup, LiteralError, ShapeMismatch

INFINITE = math.inf

Matrix = tuple[tuple[int, ...], ...]


# ---------------------------------------------------------------------------
# integer matrix helpers


def identity_matrix(n: int) -> list[list[int]]:
    return [[int(i == j) for j in range(n)] for i in range(n)]


def matmul(A: Sequence[Sequence[int]], B: Sequence[Sequence[int]], inner: int, ncols: int) -> list[list[int]]:
    out = []
    for row in A:
        r = [0] * ncols
        for k in range(inner):
            a = row[k]
            if a:
                bk = B[k]
                for j in range(ncols):
                    if bk[j]:
                        r[j] += a * bk[j]
        out.append(r)
    return out


def _snf(M, m: int, n: int, want_uinv: bool = False):
    """Core Smith reduction.  Returns (U, A, V, Uinv, rank) with U*M*V == A."""
    A = [list(r) for r in M]
    U = identity_matrix(m)
    V = identity_matrix(n)
    Ui = identity_matrix(m) if want_uinv else None

    def swap_rows(i, j):
        A[i], A[j] = A[j], A[i]
        U[i], U[j] = U[j], U[i]
        if Ui is not None:
            for row in Ui:
                row[i], row[j] = row[j], row[i]

    def add_row(dst, src, c):
        ra, rs = A[dst], A[src]
        for k in range(n):
            if rs[k]:
                ra[k] += c * rs[k]
        ua, us = U[dst], U[src]
        for k in range(m):
            if us[k]:
                ua[k] += c * us[k]
        if Ui is not None:
            # inverse operation acts on columns: col_src -= c * col_dst
            for row in Ui:
                if row[dst]:
                    row[src] -= c * row[dst]

    def neg_row(i):
        A[i] = [-x for x in A[i]]
        U[i] = [-x for x in U[i]]
        if Ui is not None:
            for row in Ui:
                row[i] = -row[i]

    def swap_cols(i, j):
        for row in A:
            row[i], row[j] = row[j], row[i]
        for row in V:
            row[i], row[j] = row[j], row[i]

    def add_col(dst, src, c):
        for row in A:
            if row[src]:
                row[dst] += c * row[src]
        for row in V:
            if row[src]:
                row[dst] += c * row[src]

    t = 0
    while t < min(m, n):
        best = None
        for i in range(t, m):
            row = A[i]
            for j in range(t, n):
                v = row[j]
                if v and (best is None or abs(v) < best[0]):
                    best = (abs(v), i, j)
            if best is not None and best[0] == 1:
                break
        if best is None:
            break
        _, i, j = best
        if i != t:
            swap_rows(t, i)
        if j != t:
            swap_cols(t, j)
        while True:
            p = A[t][t]
            clean = True
            for i in range(t + 1, m):
                if A[i][t]:
                    add_row(i, t, -(A[i][t] // p))
                    if A[i][t]:
                        clean = False
            for j in range(t + 1, n):
                if A[t][j]:
                    add_col(j, t, -(A[t][j] // p))
                    if A[t][j]:
                        clean = False
            if not clean:
                best = (abs(p), t, t)
                for i in range(t + 1, m):
                    if A[i][t] and abs(A[i][t]) < best[0]:
                        best = (abs(A[i][t]), i, t)
                for j in range(t + 1, n):
                    if A[t][j] and abs(A[t][j]) < best[0]:
                        best = (abs(A[t][j]), t, j)
                _, i, j = best
                if i != t:
                    swap_rows(t, i)
                if j != t:
                    swap_cols(t, j)
                continue
            bad = None
            for i in range(t + 1, m):
                row = A[i]
                for j in range(t + 1, n):
                    if row[j] % p:
                        bad = i
                        break
                if bad is not None:
                    break
            if bad is None:
                break
            add_row(t, bad, 1)
        if A[t][t] < 0:
            neg_row(t)
        t += 1
    return U, A, V, Ui, t


def smith_normal_form(M: Sequence[Sequence[int]], ncols: int | None = None):
    """Smith normal form ``U*M*V = D`` of an integer matrix.

    ``U`` and ``V`` are unimodular, ``D`` is diagonal with non-negative
    entries ``d_1 | d_2 | ...``.  ``ncols`` is only needed when ``M`` has
    no rows.

    >>> U, D, V = smith_normal_form([[2, 0], [0, 3]])
    >>> D
    [[1, 0], [0, 6]]
    """
    m = len(M)
    n = len(M[0]) if m else (ncols or 0)
    U, D, V, _, _ = _snf(M, m, n)
    return U, D, V


def integer_kernel(M: Sequence[Sequence[int]], ncols: int) -> list[list[int]]:
    """Basis (as columns, returned as a list of vectors) of ``{x in Z^n : M x = 0}``."""
    m = len(M)
    _, _, V, _, rank = _snf(M, m, ncols)
    return [[V[i][j] for i in range(ncols)] for j in range(rank, ncols)]


class CongruenceSolver:
    """Reusable solver for ``A x = rhs`` row-wise modulo ``moduli``.

    The Smith form of the augmented matrix is computed once; each
    :meth:`solve` call is a back-substitution.
    """

    def __init__(self, A: Sequence[Sequence[int]], moduli: Sequence[int], ncols: int):
        m = len(moduli)
        self.m, self.ncols = m, ncols
        if m == 0:
            return
        slack = [i for i in range(m) if moduli[i]]
        width = ncols + len(slack)
        aug = [list(A[i]) + [0] * len(slack) for i in range(m)]
        for s, i in enumerate(slack):
            aug[i][ncols + s] = moduli[i]
        self.U, self.D, self.V, _, self.rank = _snf(aug, m, width)

    def solve(self, rhs: Sequence[int]):
        """A list ``x`` or ``None`` when there is no integer solution."""
        m, ncols = self.m, self.ncols
        if m == 0:
            return [0] * ncols
        U, D, V, rank = self.U, self.D, self.V, self.rank
        y = [sum(u * b for u, b in zip(U[i], rhs) if u) for i in range(m)]
        w = []
        for k in range(rank):
            d = D[k][k]
            if y[k] % d:
                return None
            w.append(y[k] // d)
        for k in range(rank, m):
            if y[k]:
                return None
        return [sum(V[i][k] * w[k] for k in range(rank) if w[k]) for i in range(ncols)]


def solve_congruences(A: Sequence[Sequence[int]], rhs: Sequence[int], moduli: Sequence[int], ncols: int):
    """Find integers ``x`` with ``A x = rhs`` row-wise modulo ``moduli``.

    A modulus of ``0`` demands exact equality.  Returns a list or ``None``
    when the system has no integer solution.
    """
    return CongruenceSolver(A, moduli, ncols).solve(rhs)


def _quotient(m: int, relations: Sequence[Sequence[int]]):
    """Structure of ``Z^m / <relations>``.

    Returns ``(orders, P, L)``: canonical orders, the projection rows ``P``
    (one per quotient generator, length ``m``) and lifts ``L`` (one vector
    in ``Z^m`` per quotient generator).
    """
    k = len(relations)
    R = [[relations[c][r] for c in range(k)] for r in range(m)]
    U, D, _, Ui, rank = _snf(R, m, k, want_uinv=True)
    diag = [D[i][i] if i < rank else 0 for i in range(m)]
    idx = [i for i in range(m) if diag[i] == 0] + [i for i in range(rank) if diag[i] != 1]
    orders = tuple(diag[i] for i in idx)
    P = []
    for i in idx:
        d = diag[i]
        P.append([x % d for x in U[i]] if d else list(U[i]))
    L = [[Ui[r][i] for r in range(m)] for i in idx]
    return orders, P, L


# ---------------------------------------------------------------------------
# groups


@dataclass(frozen=True)
class FgAbGroup:
    """Direct sum of cyclic groups, ``orders[k] == 0`` meaning ``Z``."""

    orders: tuple[int, ...] = ()

    def __post_init__(self):
        orders = tuple(int(o) for o in self.orders)
        if any(o < 0 for o in orders):
            raise ValueError(f"negative cyclic order in {orders}")
        object.__setattr__(self, "orders", orders)

    @classmethod
    def from_invariants(cls, free_rank: int = 0, torsion: Iterable[int] = ()) -> "FgAbGroup":
        torsion = tuple(torsion)
        for a, b in zip(torsion, torsion[1:]):
            if b % a:
                raise ValueError(f"torsion {torsion} is not a divisibility chain")
        if any(d < 2 for d in torsion):
            raise ValueError("invariant factors must be >= 2")
        return cls((0,) * free_rank + torsion)

    @property
    def ngens(self) -> int:
        return len(self.orders)

    @property
    def free_rank(self) -> int:
        return sum(1 for o in self.orders if o == 0)

    @property
    def torsion(self) -> tuple[int, ...]:
        return tuple(o for o in self.orders if o > 1)

    def is_finite(self) -> bool:
        return 0 not in self.orders

    def is_trivial(self) -> bool:
        return all(o == 1 for o in self.orders)

    def is_free(self) -> bool:
        return all(o in (0, 1) for o in self.orders)

    @property
    def order(self):
        if not self.is_finite():
            return INFINITE
        return math.prod(self.orders)

    def is_canonical(self) -> bool:
        seen_torsion = False
        prev = None
        for o in self.orders:
            if o == 1:
                return False
            if o == 0:
                if seen_torsion:
                    return False
                continue
            seen_torsion = True
            if prev is not None and o % prev:
                return False
            prev = o
        return True

    def canonical(self) -> "FgAbGroup":
        return _canonical_data(self)[0]

    def is_isomorphic(self, other: "FgAbGroup") -> bool:
        return self.canonical() == other.canonical()

    @property
    def rank(self) -> int:
        """Minimal number of generators."""
        return self.canonical().ngens

    def exponent(self):
        return exponent(self)

    def is_p_group(self, p: int) -> bool:
        if not self.is_finite():
            return False
        n = self.order
        while n % p == 0:
            n //= p
        return n == 1

    def is_elementary_abelian(self, p: int = 2) -> bool:
        return all(o in (1, p) for o in self.orders)

    def reduce(self, vec: Sequence[int]) -> tuple[int, ...]:
        if len(vec) != len(self.orders):
            raise ShapeMismatch(f"vector of length {len(vec)} in group with {len(self.orders)} generators")
        return tuple(v % o if o else v for v, o in zip(vec, self.orders))

    def zero(self) -> tuple[int, ...]:
        return (0,) * len(self.orders)

    def basis(self) -> list[tuple[int, ...]]:
        n = len(self.orders)
        return [self.reduce([int(i == j) for j in range(n)]) for i in range(n)]

    def element(self, coeffs: Sequence[int]) -> "GroupElement":
        return GroupElement(self, tuple(coeffs))

    def element_order(self, vec: Sequence[int]):
        vec = self.reduce(vec)
        out = 1
        for v, o in zip(vec, self.orders):
            if v == 0:
                continue
            if o == 0:
                return INFINITE
            out = math.lcm(out, o // math.gcd(v, o))
        return out

    def elements(self) -> Iterator[tuple[int, ...]]:
        if not self.is_finite():
            raise ValueError(f"cannot list the elements of infinite group {self}")
        return itertools.product(*(range(o) for o in self.orders))

    def add(self, x, y) -> tuple[int, ...]:
        return self.reduce([a + b for a, b in zip(x, y)])

    def literal(self) -> str:
        return format_group(self)

    def __str__(self) -> str:
        parts = []
        for o in self.orders:
            if o == 1:
                continue
            parts.append("Z" if o == 0 else f"Z_{o}")
        return " ⊕ ".join(parts) if parts else "0"


Z = FgAbGroup((0,))
TRIVIAL = FgAbGroup(())


def Zmod(n: int) -> FgAbGroup:
    return FgAbGroup((n,))


def free(rank: int) -> FgAbGroup:
    return FgAbGroup((0,) * rank)


def direct_sum(*groups: FgAbGroup) -> FgAbGroup:
    return FgAbGroup(tuple(itertools.chain.from_iterable(g.orders for g in groups)))


@dataclass(frozen=True)
class GroupElement:
    parent: FgAbGroup
    coeffs: tuple[int, ...]

    def __post_init__(self):
        object.__setattr__(self, "coeffs", self.parent.reduce(self.coeffs))

    def __add__(self, other: "GroupElement") -> "GroupElement":
        return GroupElement(self.parent, tuple(a + b for a, b in zip(self.coeffs, other.coeffs)))

    def __neg__(self) -> "GroupElement":
        return GroupElement(self.parent, tuple(-a for a in self.coeffs))

    def __sub__(self, other: "GroupElement") -> "GroupElement":
        return self + (-other)

    def __rmul__(self, k: int) -> "GroupElement":
        return GroupElement(self.parent, tuple(k * a for a in self.coeffs))

    def is_zero(self) -> bool:
        return not any(self.coeffs)

    @property
    def order(self):
        return self.parent.element_order(self.coeffs)


# ---------------------------------------------------------------------------
# literals

_FREE_TOKEN = re.compile(r"^(?:free|Z)(?:\^(\d+))?$")


def parse_group(text: str) -> FgAbGroup:
    """Parse ``"free^r x d1 x d2 ..."`` (``"0"`` is the trivial group).

    Factors keep their written order, which fixes the generator order.
    """
    s = text.strip()
    if s == "0":
        return TRIVIAL
    if not s:
        raise LiteralError("empty group literal")
    orders: list[int] = []
    for tok in re.split(r"\s*[x×]\s*", s):
        tok = tok.strip()
        m = _FREE_TOKEN.match(tok)
        if m:
            orders.extend([0] * int(m.group(1) or 1))
            continue
        if not tok.isdigit():
            raise LiteralError(f"bad group factor {tok!r} in {text!r}")
        d = int(tok)
        if d < 2:
            raise LiteralError(f"cyclic factor must have order >= 2, got {d} in {text!r}")
        orders.append(d)
    return FgAbGroup(tuple(orders))


def format_group(G: FgAbGroup) -> str:
    if G.is_trivial():
        return "0"
    parts: list[str] = []
    run = 0
    for o in G.orders + (None,):
        if o == 0:
            run += 1
            continue
        if run:
            parts.append(f"free^{run}")
            run = 0
        if o is not None and o != 1:
            parts.append(str(o))
    return " x ".join(parts)


# ---------------------------------------------------------------------------
# homomorphisms


@dataclass(frozen=True)
class Homomorphism:
    source: FgAbGroup
    target: FgAbGroup
    matrix: Matrix = field(default=())

    def __post_init__(self):
        rows = tuple(tuple(int(x) for x in r) for r in self.matrix)
        m, n = self.target.ngens, self.source.ngens
        if len(rows) != m or any(len(r) != n for r in rows):
            raise ShapeMismatch(
                f"matrix shape {len(rows)}x{len(rows[0]) if rows else 0} does not match {self.source} -> {self.target}"
            )
        tgt = self.target.orders
        rows = tuple(tuple(x % tgt[k] for x in r) if tgt[k] else r for k, r in enumerate(rows))
        object.__setattr__(self, "matrix", rows)
        for j, d in enumerate(self.source.orders):
            if d == 0:
                continue
            for k, o in enumerate(tgt):
                x = rows[k][j]
                if (d * x) % o if o else x:
                    raise IllDefined(
                        f"generator {j} of order {d} cannot map to a coordinate {x} of order {o or 'inf'}"
                    )

    @classmethod
    def from_columns(cls, source: FgAbGroup, target: FgAbGroup, columns: Sequence[Sequence[int]]) -> "Homomorphism":
        m = target.ngens
        return cls(source, target, tuple(tuple(col[k] for col in columns) for k in range(m)))

    @classmethod
    def identity(cls, G: FgAbGroup) -> "Homomorphism":
        return cls(G, G, identity_matrix(G.ngens))

    @classmethod
    def zero(cls, source: FgAbGroup, target: FgAbGroup) -> "Homomorphism":
        return cls(source, target, tuple((0,) * source.ngens for _ in range(target.ngens)))

    @classmethod
    def scalar(cls, G: FgAbGroup, k: int) -> "Homomorphism":
        return cls(G, G, [[k * int(i == j) for j in range(G.ngens)] for i in range(G.ngens)])

    def column(self, j: int) -> tuple[int, ...]:
        return tuple(r[j] for r in self.matrix)

    def columns(self) -> list[tuple[int, ...]]:
        return [self.column(j) for j in range(self.source.ngens)]

    def __call__(self, x: Sequence[int] | GroupElement) -> tuple[int, ...]:
        if isinstance(x, GroupElement):
            x = x.coeffs
        return self.target.reduce([sum(a * b for a, b in zip(r, x)) for r in self.matrix])

    def __matmul__(self, other: "Homomorphism") -> "Homomorphism":
        """Composition ``self ∘ other``."""
        if other.target != self.source:
            raise ShapeMismatch(f"cannot compose {self.source}->{self.target} after {other.source}->{other.target}")
        prod = matmul(self.matrix, other.matrix, self.source.ngens, other.source.ngens)
        tgt = self.target.orders
        rows = tuple(tuple(x % tgt[k] for x in r) if tgt[k] else tuple(r) for k, r in enumerate(prod))
        return Homomorphism._trusted(other.source, self.target, rows)

    @classmethod
    def _trusted(cls, source: FgAbGroup, target: FgAbGroup, rows: Matrix) -> "Homomorphism":
        # composites of well-defined maps need no re-validation
        h = object.__new__(cls)
        object.__setattr__(h, "source", source)
        object.__setattr__(h, "target", target)
        object.__setattr__(h, "matrix", rows)
        return h

    def _reduced(self, rows) -> "Homomorphism":
        tgt = self.target.orders
        rows = tuple(tuple(x % tgt[k] for x in r) if tgt[k] else tuple(r) for k, r in enumerate(rows))
        return Homomorphism._trusted(self.source, self.target, rows)

    def __add__(self, other: "Homomorphism") -> "Homomorphism":
        self._same_shape(other)
        return self._reduced([[a + b for a, b in zip(r, s)] for r, s in zip(self.matrix, other.matrix)])

    def __neg__(self) -> "Homomorphism":
        return self._reduced([[-a for a in r] for r in self.matrix])

    def __sub__(self, other: "Homomorphism") -> "Homomorphism":
        self._same_shape(other)
        return self._reduced([[a - b for a, b in zip(r, s)] for r, s in zip(self.matrix, other.matrix)])

    def __rmul__(self, k: int) -> "Homomorphism":
        return self._reduced([[k * a for a in r] for r in self.matrix])

    def _same_shape(self, other):
        if (self.source, self.target) != (other.source, other.target):
            raise ShapeMismatch("homomorphisms have different source or target")

    def is_zero(self) -> bool:
        return not any(any(r) for r in self.matrix)

    def is_identity(self) -> bool:
        if self.source != self.target:
            return False
        return all(x == (i == j) for i, r in enumerate(self.matrix) for j, x in enumerate(r))

    def is_surjective(self) -> bool:
        return cokernel(self)[0].is_trivial()

    def is_injective(self) -> bool:
        return kernel(self)[0].is_trivial()

    def is_automorphism(self) -> bool:
        return self.source == self.target and _is_automorphism(self.source, self.matrix)

    def inverse(self) -> "Homomorphism":
        inv = solve_hom_equations(self.target, self.source, [(self, Homomorphism.identity(self.source), "pre")])
        if inv is None or not (self @ inv).is_identity():
            raise IllDefined("homomorphism is not invertible")
        return inv

    def image_group(self):
        return subgroup(self.target, self.columns())

    def __repr__(self) -> str:
        return f"Homomorphism({format_group(self.source)!r} -> {format_group(self.target)!r}, {[list(r) for r in self.matrix]})"


def block_sum(*maps: Homomorphism) -> Homomorphism:
    """Direct sum ``f_1 ⊕ f_2 ⊕ ...`` acting block-diagonally."""
    src = direct_sum(*(f.source for f in maps))
    tgt = direct_sum(*(f.target for f in maps))
    M = [[0] * src.ngens for _ in range(tgt.ngens)]
    r0 = c0 = 0
    for f in maps:
        for i, row in enumerate(f.matrix):
            for j, x in enumerate(row):
                M[r0 + i][c0 + j] = x
        r0 += f.target.ngens
        c0 += f.source.ngens
    return Homomorphism(src, tgt, M)


def _relation_columns(G: FgAbGroup) -> list[list[int]]:
    n = G.ngens
    return [[o if i == k else 0 for i in range(n)] for k, o in enumerate(G.orders) if o]


def subgroup(G: FgAbGroup, gens: Sequence[Sequence[int]]):
    """Canonical form of the subgroup generated by ``gens`` with its inclusion."""
    k = len(gens)
    n = G.ngens
    # relations among the generators: kernel of [gens | diag(orders)]
    tors = [i for i, o in enumerate(G.orders) if o]
    width = k + len(tors)
    M = [[gens[c][r] for c in range(k)] + [G.orders[r] if r == i else 0 for i in tors] for r in range(n)]
    rels = [v[:k] for v in integer_kernel(M, width)]
    orders, _, L = _quotient(k, rels)
    H = FgAbGroup(orders)
    cols = [[sum(gens[c][r] * lift[c] for c in range(k)) for r in range(n)] for lift in L]
    return H, Homomorphism.from_columns(H, G, cols)


def cokernel(h: Homomorphism):
    """``coker h`` in canonical form together with the quotient projection."""
    T = h.target
    rels = h.columns() + _relation_columns(T)
    orders, P, _ = _quotient(T.ngens, rels)
    Q = FgAbGroup(orders)
    return Q, Homomorphism(T, Q, P)


def kernel(h: Homomorphism):
    """``ker h`` in canonical form together with its inclusion into the source."""
    S, T = h.source, h.target
    tors = [i for i, o in enumerate(T.orders) if o]
    width = S.ngens + len(tors)
    M = [list(h.matrix[r]) + [T.orders[r] if r == i else 0 for i in tors] for r in range(T.ngens)]
    gens = [v[: S.ngens] for v in integer_kernel(M, width)]
    return subgroup(S, gens)


def image(h: Homomorphism):
    return subgroup(h.target, h.columns())


def lift(h: Homomorphism, y: Sequence[int]):
    """Some ``x`` with ``h(x) == y``, or ``None``."""
    y = h.target.reduce(y)
    x = solve_congruences(h.matrix, y, h.target.orders, h.source.ngens)
    return None if x is None else h.source.reduce(x)


def in_subgroup(G: FgAbGroup, gens: Sequence[Sequence[int]], x: Sequence[int]) -> bool:
    A = [[g[r] for g in gens] for r in range(G.ngens)]
    return solve_congruences(A, G.reduce(x), G.orders, len(gens)) is not None


def same_subgroup(G: FgAbGroup, gens1, gens2) -> bool:
    return all(in_subgroup(G, gens2, g) for g in gens1) and all(in_subgroup(G, gens1, g) for g in gens2)


def exponent(A: FgAbGroup):
    """Least common multiple of the generator orders (``INFINITE`` if not finite).

    >>> exponent(FgAbGroup((4, 2)))
    4
    """
    if not A.is_finite():
        return INFINITE
    return reduce(math.lcm, A.orders, 1)


# ---------------------------------------------------------------------------
# primary and canonical decompositions


def _primary_factors(G: FgAbGroup):
    """Primary cyclic factors as (generator, prime, prime power, idempotent)."""
    out = []
    for j, o in enumerate(G.orders):
        if o == 0:
            out.append((j, 0, 0, 1))
        elif o > 1:
            for p, e in sorted(factorint(o).items()):
                q = p**e
                m = o // q
                c = (m * pow(m, -1, q)) % o
                out.append((j, p, q, c))
    free = [f for f in out if f[1] == 0]
    tors = sorted((f for f in out if f[1]), key=lambda f: (f[1], f[2], f[0]))
    return free + tors


@lru_cache(maxsize=None)
def primary_decomposition(G: FgAbGroup):
    """Free factors first, then primary cyclic factors sorted by (prime, power).

    Returns ``(P, to_P, from_P)`` with mutually inverse isomorphisms.
    """
    factors = _primary_factors(G)
    P = FgAbGroup(tuple(f[2] for f in factors))
    n = G.ngens
    to_cols = [[0] * len(factors) for _ in range(n)]
    from_cols = []
    for idx, (j, p, q, c) in enumerate(factors):
        to_cols[j][idx] = 1
        col = [0] * n
        col[j] = c
        from_cols.append(col)
    return P, Homomorphism.from_columns(G, P, to_cols), Homomorphism.from_columns(P, G, from_cols)


@lru_cache(maxsize=None)
def _canonical_data(G: FgAbGroup):
    P, to_P, from_P = primary_decomposition(G)
    nfree = P.free_rank
    by_prime: dict[int, list[int]] = {}
    for idx in range(nfree, P.ngens):
        q = P.orders[idx]
        p = min(factorint(q))
        by_prime.setdefault(p, []).append(idx)
    t = max((len(v) for v in by_prime.values()), default=0)
    # invariant factor k (ascending) collects the k-th smallest-from-the-top power of every prime
    slots: list[list[int]] = [[] for _ in range(t)]
    for p, idxs in by_prime.items():
        idxs = sorted(idxs, key=lambda i: P.orders[i], reverse=True)
        for r, i in enumerate(idxs):
            slots[t - 1 - r].append(i)
    inv = [math.prod(P.orders[i] for i in s) for s in slots]
    C = FgAbGroup((0,) * nfree + tuple(inv))
    # P -> C: primary generator i inside slot s maps to idempotent * generator
    pc_cols = [[0] * C.ngens for _ in range(P.ngens)]
    cp_cols = [[0] * P.ngens for _ in range(C.ngens)]
    for i in range(nfree):
        pc_cols[i][i] = 1
        cp_cols[i][i] = 1
    for s, members in enumerate(slots):
        D = inv[s]
        for i in members:
            q = P.orders[i]
            m = D // q
            pc_cols[i][nfree + s] = (m * pow(m, -1, q)) % D
            cp_cols[nfree + s][i] = 1
    P_to_C = Homomorphism.from_columns(P, C, pc_cols)
    C_to_P = Homomorphism.from_columns(C, P, cp_cols)
    return C, P_to_C @ to_P, from_P @ C_to_P


def canonical_iso(G: FgAbGroup):
    """``(C, to_C, from_C)`` with ``C`` the canonical form of ``G``."""
    return _canonical_data(G)


# ---------------------------------------------------------------------------
# Hom-sets and automorphisms


def _hom_entry_scales(S: FgAbGroup, T: FgAbGroup):
    """Per-entry generator of the cyclic group of admissible matrix entries.

    Entry ``(k, j)`` of a homomorphism ``S -> T`` must be a multiple of
    ``scale[k][j]``; ``None`` marks an entry forced to zero.  ``period`` is
    the number of distinct values (``0`` for infinitely many).
    """
    scale, period = [], []
    for o_t in T.orders:
        srow, prow = [], []
        for o_s in S.orders:
            if o_s == 0:
                srow.append(1)
                prow.append(o_t)
            elif o_t == 0:
                srow.append(None)
                prow.append(1)
            else:
                g = math.gcd(o_s, o_t)
                srow.append(o_t // g)
                prow.append(g)
        scale.append(srow)
        period.append(prow)
    return scale, period


def hom_generators(S: FgAbGroup, T: FgAbGroup) -> list[Homomorphism]:
    """Generators of ``Hom(S, T)`` as an abelian group."""
    scale, period = _hom_entry_scales(S, T)
    gens = []
    for k in range(T.ngens):
        for j in range(S.ngens):
            s = scale[k][j]
            if s is None or period[k][j] == 1:
                continue
            M = [[0] * S.ngens for _ in range(T.ngens)]
            M[k][j] = s
            gens.append(Homomorphism(S, T, M))
    return gens


def hom_count(S: FgAbGroup, T: FgAbGroup):
    scale, period = _hom_entry_scales(S, T)
    out = 1
    for k in range(T.ngens):
        for j in range(S.ngens):
            if scale[k][j] is not None:
                if period[k][j] == 0:
                    return INFINITE
                out *= period[k][j]
    return out


def _torsion_elements(T: FgAbGroup, d: int):
    """All ``x`` in finite ``T`` with ``d*x == 0`` (``d == 0``: all of ``T``)."""
    ranges = []
    for o in T.orders:
        if o == 0:
            raise ValueError("target must be finite")
        step = o // math.gcd(o, d) if d else 1
        ranges.append(range(0, o, step))
    return itertools.product(*ranges)


def enumerate_homomorphisms(S: FgAbGroup, T: FgAbGroup) -> Iterator[Homomorphism]:
    """Every homomorphism ``S -> T`` for finite ``T``, lexicographic in columns."""
    cols = [list(_torsion_elements(T, d)) for d in S.orders]
    for choice in itertools.product(*cols):
        yield Homomorphism.from_columns(S, T, choice)


def _det_mod_p_nonzero(M: list[list[int]], p: int) -> bool:
    n = len(M)
    A = [[x % p for x in r] for r in M]
    for c in range(n):
        piv = next((r for r in range(c, n) if A[r][c]), None)
        if piv is None:
            return False
        A[c], A[piv] = A[piv], A[c]
        inv = pow(A[c][c], -1, p)
        for r in range(c + 1, n):
            if A[r][c]:
                f = (A[r][c] * inv) % p
                A[r] = [(a - f * b) % p for a, b in zip(A[r], A[c])]
    return True


def _int_det(M: list[list[int]]) -> int:
    n = len(M)
    if n == 0:
        return 1
    _, D, _ = smith_normal_form(M)
    return math.prod(D[i][i] for i in range(n))


def _is_automorphism(G: FgAbGroup, M: Matrix) -> bool:
    free_idx = [i for i, o in enumerate(G.orders) if o == 0]
    tors_idx = [i for i, o in enumerate(G.orders) if o > 1]
    # block triangular: torsion generators never reach free coordinates
    if free_idx:
        F = [[M[i][j] for j in free_idx] for i in free_idx]
        if _int_det(F) != 1:  # SNF determinant is |det|
            return False
    primes = sorted({p for i in tors_idx for p in factorint(G.orders[i])})
    for p in primes:
        idx = [i for i in tors_idx if G.orders[i] % p == 0]
        if not _det_mod_p_nonzero([[M[i][j] for j in idx] for i in idx], p):
            return False
    return True


def is_automorphism(f: Homomorphism) -> bool:
    return f.is_automorphism()


@lru_cache(maxsize=None)
def _automorphisms(G: FgAbGroup) -> tuple[Homomorphism, ...]:
    if G.free_rank >= 2:
        raise InfiniteAutGroup(f"Aut({G}) contains GL_2(Z) and is infinite")
    n = G.ngens
    col_choices = []
    for j, d in enumerate(G.orders):
        if d == 0:
            cands = []
            for x in _torsion_elements(FgAbGroup(tuple(o if o else 1 for o in G.orders)), 0):
                for u in (1, -1):
                    v = list(x)
                    v[j] = u
                    cands.append(tuple(v))
            col_choices.append(cands)
        else:
            tors_part = FgAbGroup(tuple(o if o else 1 for o in G.orders))
            col_choices.append([x for x in _torsion_elements(tors_part, d) if G.element_order(x) == d])
    out = []
    for choice in itertools.product(*col_choices):
        M = tuple(tuple(choice[j][k] for j in range(n)) for k in range(n))
        if _is_automorphism(G, M):
            out.append(Homomorphism(G, G, M))
    out.sort(key=lambda f: f.matrix)
    return tuple(out)


def enumerate_automorphisms(A: FgAbGroup) -> list[Homomorphism]:
    """All automorphisms of ``A``, sorted lexicographically by reduced matrix.

    ``A`` must be finite or of free rank one; otherwise ``InfiniteAutGroup``.

    >>> len(enumerate_automorphisms(FgAbGroup((2, 2))))
    6
    """
    return list(_automorphisms(A))


# ---------------------------------------------------------------------------
# linear equations in Hom(S, T)


class HomEquationSystem:
    """Linear conditions ``Ω ∘ L = R`` / ``L ∘ Ω = R`` on ``Ω ∈ Hom(source, target)``.

    The left-hand maps fix the coefficient matrix, so it is reduced once
    and reused for every choice of right-hand sides.
    """

    def __init__(self, source: FgAbGroup, target: FgAbGroup, lefts):
        self.source, self.target, self.lefts = source, target, tuple(lefts)
        scale, period = _hom_entry_scales(source, target)
        var = {}
        for k in range(target.ngens):
            for j in range(source.ngens):
                if scale[k][j] is not None and period[k][j] != 1:
                    var[(k, j)] = len(var)
        nv = len(var)
        rows: list[list[int]] = []
        mods: list[int] = []
        for L, side in self.lefts:
            if side == "pre":
                if L.target != source:
                    raise ShapeMismatch("constraint Ω∘L = R has incompatible shapes")
                for c in range(L.source.ngens):
                    for k in range(target.ngens):
                        row = [0] * nv
                        for j in range(source.ngens):
                            v = var.get((k, j))
                            if v is not None and L.matrix[j][c]:
                                row[v] += scale[k][j] * L.matrix[j][c]
                        rows.append(row)
                        mods.append(target.orders[k])
            elif side == "post":
                if L.source != target:
                    raise ShapeMismatch("constraint L∘Ω = R has incompatible shapes")
                Y = L.target
                for j in range(source.ngens):
                    for y in range(Y.ngens):
                        row = [0] * nv
                        for k in range(target.ngens):
                            v = var.get((k, j))
                            if v is not None and L.matrix[y][k]:
                                row[v] += L.matrix[y][k] * scale[k][j]
                        rows.append(row)
                        mods.append(Y.orders[y])
            else:
                raise ValueError(f"constraint side must be 'pre' or 'post', got {side!r}")
        self._scale, self._var = scale, var
        self._solver = CongruenceSolver(rows, mods, nv)

    def solve(self, rights) -> Homomorphism | None:
        source, target = self.source, self.target
        rhs: list[int] = []
        for (L, side), R in zip(self.lefts, rights, strict=True):
            if side == "pre":
                if R.target != target or R.source != L.source:
                    raise ShapeMismatch("constraint Ω∘L = R has incompatible shapes")
                rhs.extend(R.matrix[k][c] for c in range(L.source.ngens) for k in range(target.ngens))
            else:
                if R.source != source or R.target != L.target:
                    raise ShapeMismatch("constraint L∘Ω = R has incompatible shapes")
                rhs.extend(R.matrix[y][j] for j in range(source.ngens) for y in range(L.target.ngens))
        sol = self._solver.solve(rhs)
        if sol is None:
            return None
        M = [[0] * source.ngens for _ in range(target.ngens)]
        for (k, j), v in self._var.items():
            M[k][j] = self._scale[k][j] * sol[v]
        return Homomorphism(source, target, M)


@lru_cache(maxsize=2048)
def hom_equation_system(source: FgAbGroup, target: FgAbGroup, lefts: tuple) -> HomEquationSystem:
    return HomEquationSystem(source, target, lefts)


def solve_hom_equations(source: FgAbGroup, target: FgAbGroup, constraints) -> Homomorphism | None:
    """Find a homomorphism ``Ω: source -> target`` satisfying all constraints.

    Each constraint is ``(L, R, side)``: ``side == "pre"`` demands
    ``Ω ∘ L == R`` and ``side == "post"`` demands ``L ∘ Ω == R``.
    Well-definedness of ``Ω`` is built into the parametrisation of its
    entries, so the returned map always exists in ``Hom(source, target)``.
    Returns ``None`` when the congruence system is unsolvable.
    """
    lefts = tuple((L, side) for L, _, side in constraints)
    for _, side in lefts:
        if side not in ("pre", "post"):
            raise ValueError(f"constraint side must be 'pre' or 'post', got {side!r}")
    return hom_equation_system(source, target, lefts).solve([R for _, R, _ in constraints])


def section_columns(h: Homomorphism):
    """Preimages under surjective ``h`` of each target generator (a set map)."""
    cols = []
    for y in h.target.basis():
        x = lift(h, y)
        if x is None:
            raise ValueError("homomorphism is not surjective")
        cols.append(x)
    return cols


# ---------------------------------------------------------------------------
# enumeration of groups


def _partitions(n: int, max_part: int | None = None) -> Iterator[tuple[int, ...]]:
    if max_part is None:
        max_part = n
    if n == 0:
        yield ()
        return
    for k in range(min(n, max_part), 0, -1):
        for rest in _partitions(n - k, k):
            yield (k,) + rest


def abelian_groups_of_order(N: int) -> list[FgAbGroup]:
    """Every abelian group of order ``N`` in canonical form, deterministic order."""
    if N == 1:
        return [TRIVIAL]
    per_prime = []
    for p, e in sorted(factorint(N).items()):
        per_prime.append([(p, part) for part in _partitions(e)])
    out = []
    for combo in itertools.product(*per_prime):
        powers = [sorted((p**k for k in part), reverse=True) for p, part in combo]
        t = max(len(x) for x in powers)
        inv = []
        for r in range(t):
            inv.append(math.prod(x[r] for x in powers if r < len(x)))
        out.append(FgAbGroup(tuple(reversed(inv))))
    out.sort(key=lambda G: (len(G.orders), G.orders))
    return out


def abelian_groups_up_to(max_order: int, prime: int | None = None) -> list[FgAbGroup]:
    """Finite abelian groups of order ``<= max_order`` (optionally ``prime``-groups only)."""
    out = []
    for N in range(1, max_order + 1):
        if prime is not None:
            n = N
            while n % prime == 0:
                n //= prime
            if n != 1:
                continue
        out.extend(abelian_groups_of_order(N))
    return out
