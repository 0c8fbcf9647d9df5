"""Whitehead's quadratic functor Γ and the functors Γ_n^1.

Γ is computed from a cyclic decomposition ``A = ⊕ A_i`` of the base group:
``Γ(A) = ⊕ Γ(A_i) ⊕ ⊕_{i<j} A_i ⊗ A_j`` with ``Γ(Z) = Z``,
``Γ(Z_d) = Z_2d`` for even ``d`` and ``Z_d`` for odd ``d``.  The cyclic
decomposition used is the primary refinement of the base presentation
(free factors first, then prime powers sorted by prime and exponent).

Elements of Γ(A) are written in the *tag basis*: one ``g(i)`` per cyclic
factor (the class γ(a_i)) followed by ``t(i,j)``, ``i < j``, for the tensor
generators a_i ⊗ a_j.  Tensor generators of trivial order (coprime factors)
are left out.  For ``n >= 3`` the functor is ``- ⊗ Z_2`` with tags ``r(i)``
for the factors of even or infinite order.
"""

from __future__ import annotations

import math
import re
from dataclasses import dataclass
from functools import lru_cache

from .abgroup import FgAbGroup, Homomorphism, primary_decomposition
from .errors import LiteralError

_TAG_RE = re.compile(r"^\s*([gtr])\((\d+)(?:,\s*(\d+))?\)\s*$")


def tag_str(tag: tuple) -> str:
    if tag[0] == "t":
        return f"t({tag[1]},{tag[2]})"
    return f"{tag[0]}({tag[1]})"


def parse_tag(text: str) -> tuple:
    m = _TAG_RE.match(text)
    if not m:
        raise LiteralError(f"bad tag {text!r}")
    kind, i, j = m.group(1), int(m.group(2)), m.group(3)
    if kind == "t":
        if j is None or int(j) <= i:
            raise LiteralError(f"tensor tag needs i < j: {text!r}")
        return ("t", i, int(j))
    if j is not None:
        raise LiteralError(f"bad tag {text!r}")
    return (kind, i)


def _gamma_order(o: int) -> int:
    if o == 0:
        return 0
    return 2 * o if o % 2 == 0 else o


def _tensor_order(a: int, b: int) -> int:
    if a == 0:
        return b
    if b == 0:
        return a
    return math.gcd(a, b)


@dataclass(frozen=True)
class GammaGroup:
    """Γ(A) (``quadratic=True``) or ``A ⊗ Z_2`` over a fixed decomposition of ``base``."""

    base: FgAbGroup
    quadratic: bool
    decomposition: FgAbGroup
    tags: tuple
    group: FgAbGroup  # the tagged presentation; maps into Γ use these coordinates

    @property
    def tag_orders(self) -> tuple[int, ...]:
        return self.group.orders

    @property
    def carrier(self) -> FgAbGroup:
        return self.group.canonical()

    def index(self, tag: tuple) -> int:
        return self._index()[tag]

    def _index(self):
        return _tag_index(self)

    def element(self, coeffs) -> "QuadraticElement":
        return QuadraticElement(self, tuple(coeffs))

    def element_from_pairs(self, pairs) -> "QuadraticElement":
        idx = self._index()
        v = [0] * len(self.tags)
        for tag, c in pairs:
            if isinstance(tag, str):
                tag = parse_tag(tag)
            if tag not in idx:
                raise LiteralError(f"tag {tag_str(tag)} not in basis {[tag_str(t) for t in self.tags]}")
            v[idx[tag]] += int(c)
        return QuadraticElement(self, tuple(v))

    def zero(self) -> "QuadraticElement":
        return QuadraticElement(self, (0,) * len(self.tags))

    def elements(self):
        for v in self.group.elements():
            yield QuadraticElement(self, v)

    def tag_table(self) -> list[tuple[str, int]]:
        return [(tag_str(t), o) for t, o in zip(self.tags, self.tag_orders)]

    def gamma(self, x) -> "QuadraticElement":
        """The universal quadratic map γ on an element of ``base``."""
        if not self.quadratic:
            raise ValueError("γ is only defined for the quadratic functor (n = 2)")
        _, to_P, _ = primary_decomposition(self.base)
        c = to_P(x)
        idx = self._index()
        v = [0] * len(self.tags)
        m = len(c)
        for k in range(m):
            if c[k]:
                v[idx[("g", k)]] += c[k] * c[k]
                for l in range(k + 1, m):
                    pos = idx.get(("t", k, l))
                    if c[l] and pos is not None:
                        v[pos] += c[k] * c[l]
        return QuadraticElement(self, tuple(v))

    def tensor(self, x, y) -> "QuadraticElement":
        """The bilinear pairing ``[x, y] = γ(x+y) − γ(x) − γ(y)``."""
        _, to_P, _ = primary_decomposition(self.base)
        c, d = to_P(x), to_P(y)
        idx = self._index()
        v = [0] * len(self.tags)
        _pair_into(v, idx, c, d)
        return QuadraticElement(self, tuple(v))


@lru_cache(maxsize=None)
def _tag_index(G: GammaGroup) -> dict:
    return {t: i for i, t in enumerate(G.tags)}


@dataclass(frozen=True)
class QuadraticElement:
    parent: GammaGroup
    coeffs: tuple[int, ...]

    def __post_init__(self):
        object.__setattr__(self, "coeffs", self.parent.group.reduce(self.coeffs))

    def __add__(self, other):
        return QuadraticElement(self.parent, tuple(a + b for a, b in zip(self.coeffs, other.coeffs)))

    def __neg__(self):
        return QuadraticElement(self.parent, tuple(-a for a in self.coeffs))

    def __sub__(self, other):
        return self + (-other)

    def __rmul__(self, k: int):
        return QuadraticElement(self.parent, tuple(k * a for a in self.coeffs))

    def is_zero(self) -> bool:
        return not any(self.coeffs)

    def pairs(self) -> list[tuple[str, int]]:
        return [(tag_str(t), c) for t, c in zip(self.parent.tags, self.coeffs)]


def element_order(x: QuadraticElement):
    """Exact order of ``x`` in its Γ-group (``math.inf`` if infinite)."""
    return x.parent.group.element_order(x.coeffs)


def _pair_into(v: list[int], idx: dict, c, d) -> None:
    # bilinear expansion with [e_k, e_k] = 2γ(e_k) and [e_l, e_k] = e_k ⊗ e_l
    m = len(c)
    for k in range(m):
        ck = c[k]
        if not ck:
            continue
        for l in range(m):
            dl = d[l]
            if not dl:
                continue
            if k == l:
                v[idx[("g", k)]] += 2 * ck * dl
            else:
                pos = idx.get(("t", min(k, l), max(k, l)))
                if pos is not None:
                    v[pos] += ck * dl


@lru_cache(maxsize=None)
def gamma_object(A: FgAbGroup) -> GammaGroup:
    """Γ(A) with its tag basis.

    >>> str(gamma_object(FgAbGroup((2, 2))).group)
    'Z_4 ⊕ Z_4 ⊕ Z_2'
    """
    P, _, _ = primary_decomposition(A)
    o = P.orders
    tags, orders = [], []
    for i, oi in enumerate(o):
        tags.append(("g", i))
        orders.append(_gamma_order(oi))
    for i in range(len(o)):
        for j in range(i + 1, len(o)):
            t = _tensor_order(o[i], o[j])
            if t != 1:
                tags.append(("t", i, j))
                orders.append(t)
    return GammaGroup(A, True, P, tuple(tags), FgAbGroup(tuple(orders)))


@lru_cache(maxsize=None)
def tensor_two_object(A: FgAbGroup) -> GammaGroup:
    P, _, _ = primary_decomposition(A)
    tags = tuple(("r", i) for i, oi in enumerate(P.orders) if oi % 2 == 0)
    return GammaGroup(A, False, P, tags, FgAbGroup((2,) * len(tags)))


def _decomposed(f: Homomorphism) -> Homomorphism:
    _, _, from_P = primary_decomposition(f.source)
    _, to_P, _ = primary_decomposition(f.target)
    return to_P @ f @ from_P


@lru_cache(maxsize=65536)
def gamma_morphism(f: Homomorphism) -> Homomorphism:
    """Γ(f) between the tagged presentations of Γ(source) and Γ(target)."""
    src, tgt = gamma_object(f.source), gamma_object(f.target)
    F = _decomposed(f)
    idx = tgt._index()
    m = tgt.decomposition.ngens
    n = src.decomposition.ngens
    images = [[F.matrix[k][i] for k in range(m)] for i in range(n)]
    cols = []
    for tag in src.tags:
        v = [0] * len(tgt.tags)
        if tag[0] == "g":
            c = images[tag[1]]
            for k in range(m):
                if c[k]:
                    v[idx[("g", k)]] += c[k] * c[k]
                    for l in range(k + 1, m):
                        pos = idx.get(("t", k, l))
                        if c[l] and pos is not None:
                            v[pos] += c[k] * c[l]
        else:
            _pair_into(v, idx, images[tag[1]], images[tag[2]])
        cols.append(v)
    # the Homomorphism constructor certifies well-definedness
    return Homomorphism.from_columns(src.group, tgt.group, cols)


@lru_cache(maxsize=65536)
def tensor_two_morphism(f: Homomorphism) -> Homomorphism:
    src, tgt = tensor_two_object(f.source), tensor_two_object(f.target)
    F = _decomposed(f)
    idx = tgt._index()
    cols = []
    for tag in src.tags:
        v = [0] * len(tgt.tags)
        for k, row in enumerate(F.matrix):
            pos = idx.get(("r", k))
            if pos is not None:
                v[pos] += row[tag[1]]
        cols.append(v)
    return Homomorphism.from_columns(src.group, tgt.group, cols)


def gamma_n1(n: int, A: FgAbGroup) -> GammaGroup:
    """Γ_2^1 = Γ, and Γ_n^1 = − ⊗ Z_2 for ``n >= 3``."""
    if n < 2:
        raise ValueError(f"n must be >= 2, got {n}")
    return gamma_object(A) if n == 2 else tensor_two_object(A)


def gamma_n1_morphism(n: int, f: Homomorphism) -> Homomorphism:
    if n < 2:
        raise ValueError(f"n must be >= 2, got {n}")
    return gamma_morphism(f) if n == 2 else tensor_two_morphism(f)


def element_from_pairs(G: GammaGroup, pairs) -> QuadraticElement:
    return G.element_from_pairs(pairs)
