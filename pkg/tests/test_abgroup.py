import itertools
import math

import pytest
from hypothesis import given, strategies as st

import oracles
from gammaseq.abgroup import (
    INFINITE,
    TRIVIAL,
    Z,
    FgAbGroup,
    Homomorphism,
    Zmod,
    abelian_groups_of_order,
    abelian_groups_up_to,
    canonical_iso,
    cokernel,
    enumerate_automorphisms,
    enumerate_homomorphisms,
    exponent,
    format_group,
    hom_count,
    image,
    kernel,
    lift,
    matmul,
    parse_group,
    primary_decomposition,
    smith_normal_form,
    solve_hom_equations,
    subgroup,
)
from gammaseq.errors import IllDefined, InfiniteAutGroup, LiteralError, ShapeMismatch


def _det(M):
    n = len(M)
    if n == 0:
        return 1
    return sum(
        (-1) ** sum(1 for a in range(n) for b in range(a + 1, n) if p[a] > p[b])
        * math.prod(M[i][p[i]] for i in range(n))
        for p in itertools.permutations(range(n))
    )


# ---------------------------------------------------------------- literals


def test_parse_and_format_round_trip():
    assert parse_group("free^1 x 2 x 4") == FgAbGroup((0, 2, 4))
    assert parse_group("0") == TRIVIAL
    assert parse_group("2x2") == FgAbGroup((2, 2))
    assert parse_group("Z") == Z
    for G in [FgAbGroup((0, 0, 3)), FgAbGroup((2, 4)), TRIVIAL, Z]:
        assert parse_group(format_group(G)) == G


@pytest.mark.parametrize("bad", ["", "2 x", "x", "free^ x 2", "-3", "2 x 0.5", "foo"])
def test_parse_rejects_garbage(bad):
    with pytest.raises(LiteralError):
        parse_group(bad)


def test_canonical_form_is_field_equality():
    assert FgAbGroup((6, 4)).canonical() == FgAbGroup((2, 12))
    assert FgAbGroup((3, 2)).is_isomorphic(Zmod(6))
    assert not FgAbGroup((2, 2)).is_isomorphic(Zmod(4))
    assert FgAbGroup((2, 0)).canonical() == FgAbGroup((0, 2))


# ---------------------------------------------------------------- SNF


def test_snf_examples():
    _, D, _ = smith_normal_form([[2, 0], [0, 3]])
    assert D == [[1, 0], [0, 6]]
    _, D, _ = smith_normal_form([[1, 0], [0, 1]])
    assert D == [[1, 0], [0, 1]]
    _, D, _ = smith_normal_form([[0]])
    assert D == [[0]]


matrices = st.integers(1, 4).flatmap(
    lambda m: st.integers(1, 4).flatmap(
        lambda n: st.lists(st.lists(st.integers(-30, 30), min_size=n, max_size=n), min_size=m, max_size=m)
    )
)


@given(matrices)
def test_snf_remultiplies_exactly(M):
    m, n = len(M), len(M[0])
    U, D, V = smith_normal_form(M)
    assert matmul(matmul(U, M, m, n), V, n, n) == D
    assert abs(_det(U)) == 1 and abs(_det(V)) == 1
    diag = [D[i][i] for i in range(min(m, n))]
    assert all(D[i][j] == 0 for i in range(m) for j in range(n) if i != j)
    assert all(d >= 0 for d in diag)
    for a, b in zip(diag, diag[1:]):
        assert (b == 0) if a == 0 else b % a == 0


# ---------------------------------------------------------------- homomorphisms


def test_ill_defined_matrix_rejected():
    with pytest.raises(IllDefined):
        Homomorphism(Zmod(2), Zmod(3), [[1]])
    with pytest.raises(IllDefined):
        Homomorphism(Zmod(2), Z, [[1]])
    Homomorphism(Zmod(2), Zmod(4), [[2]])


def test_composition_shapes_checked():
    f = Homomorphism.identity(Zmod(2))
    g = Homomorphism.identity(Zmod(3))
    with pytest.raises(ShapeMismatch):
        g @ f


# ---------------------------------------------------------------- kernel / cokernel


def test_cokernel_examples():
    Q, p = cokernel(Homomorphism(Z, Z, [[2]]))
    assert Q == Zmod(2) and p.matrix == ((1,),)
    Q, p = cokernel(Homomorphism.zero(TRIVIAL, Zmod(4)))
    assert Q == Zmod(4) and p.is_surjective() and p.is_injective()


def test_cokernel_of_diagonal_into_order_32_group():
    T = FgAbGroup((4, 4, 2))
    h = Homomorphism(Z, T, [[1], [1], [0]])
    Q, _ = cokernel(h)
    # oracle: quotient of the 32 elements by the brute-force span of (1,1,0)
    S = oracles.span(T.orders, [(1, 1, 0)])
    assert len(oracles.elements(T.orders)) // len(S) == 8
    assert Q.order == 8
    assert oracles.group_profile(Q.orders) == oracles.quotient_order_profile(T.orders, S)
    assert Q == FgAbGroup((2, 4))


def test_kernel_examples():
    K, inc = kernel(Homomorphism.scalar(Zmod(4), 2))
    assert K == Zmod(2) and inc(inc.source.basis()[0]) == (2,)
    brute = [x for x in oracles.elements((4,)) if (2 * x[0]) % 4 == 0]
    assert len(brute) == 2
    K, _ = kernel(Homomorphism.identity(Zmod(6)))
    assert K.is_trivial()
    K, _ = kernel(Homomorphism.zero(Zmod(2), Zmod(3)))
    assert K == Zmod(2)


def _random_hom(draw, S, T):
    cols = []
    for d in S.orders:
        cands = list(oracles.elements(T.orders))
        cands = [y for y in cands if d % oracles.order_of(T.orders, y) == 0]
        cols.append(draw(st.sampled_from(cands)))
    return Homomorphism.from_columns(S, T, cols)


@st.composite
def finite_homs(draw, max_order=32):
    S = draw(st.sampled_from([G for G in abelian_groups_up_to(max_order) if G.order <= 16]))
    T = draw(st.sampled_from([G for G in abelian_groups_up_to(max_order) if S.order * G.order <= 256]))
    return _random_hom(draw, S, T)


@given(finite_homs())
def test_kernel_image_against_enumeration(h):
    S, T = h.source.orders, h.target.orders
    table = oracles.elementwise_table(S, T, h.columns())
    ker = {x for x, y in table.items() if y == oracles.zero(T)}
    img = set(table.values())
    K, inc = kernel(h)
    I, _ = image(h)
    assert K.order == len(ker) and I.order == len(img)
    assert K.order * I.order == h.source.order
    assert (h @ inc).is_zero()
    assert {inc(x) for x in K.elements()} == ker
    assert oracles.group_profile(K.orders) == sorted(oracles.order_of(S, x) for x in ker)
    Q, p = cokernel(h)
    assert Q.order * len(img) == h.target.order
    assert {x for x in oracles.elements(T) if p(x) == Q.zero()} == img


def test_exponent_examples():
    assert exponent(FgAbGroup((4, 2))) == 4
    G = FgAbGroup((3, 5))
    assert exponent(G) == 15 == max(oracles.order_of(G.orders, x) for x in oracles.elements(G.orders))
    assert exponent(Z) == INFINITE


def test_subgroup_and_lift():
    G = FgAbGroup((2, 4))
    H, inc = subgroup(G, [(1, 2)])
    assert H.order == len(oracles.span(G.orders, [(1, 2)]))
    h = Homomorphism(Zmod(8), Zmod(4), [[1]])
    x = lift(h, (3,))
    assert h(x) == (3,)
    assert lift(Homomorphism.scalar(Zmod(4), 2), (1,)) is None


# ---------------------------------------------------------------- decompositions


@pytest.mark.parametrize("G", [FgAbGroup(o) for o in [(6,), (12, 2), (0, 6), (4, 6, 9), (2, 2, 2)]])
def test_primary_and_canonical_isos_are_inverse(G):
    P, to_P, from_P = primary_decomposition(G)
    assert (from_P @ to_P).is_identity() and (to_P @ from_P).is_identity()
    C, to_C, from_C = canonical_iso(G)
    assert C.is_canonical() and C == G.canonical()
    assert (from_C @ to_C).is_identity() and (to_C @ from_C).is_identity()


def test_group_lists_are_complete():
    # one group per partition pattern: 1, 1, 1, 2, 1, 1, 1, 3 for orders 1..8
    assert [len(abelian_groups_of_order(n)) for n in range(1, 9)] == [1, 1, 1, 2, 1, 1, 1, 3]
    assert len(abelian_groups_of_order(64)) == 11
    assert all(G.is_canonical() for G in abelian_groups_up_to(64))
    assert all(G.is_p_group(2) for G in abelian_groups_up_to(64, prime=2))


# ---------------------------------------------------------------- automorphisms


def test_automorphism_examples():
    assert len(enumerate_automorphisms(Zmod(2))) == 1
    auts = enumerate_automorphisms(FgAbGroup((2, 2)))
    assert len(auts) == 6 == len(oracles.automorphisms((2, 2)))
    assert [f.matrix for f in enumerate_automorphisms(Z)] == [((-1,),), ((1,),)]
    with pytest.raises(InfiniteAutGroup):
        enumerate_automorphisms(FgAbGroup((0, 0)))


AUT_ORACLE_GROUPS = abelian_groups_up_to(16) + [FgAbGroup(o) for o in [(32,), (2, 16), (4, 8), (2, 2, 8), (2, 4, 4)]]


@pytest.mark.parametrize("G", AUT_ORACLE_GROUPS, ids=str)
def test_automorphism_count_matches_brute_force(G):
    auts = enumerate_automorphisms(G)
    assert len(auts) == len(oracles.automorphisms(G.orders))
    keys = {f.matrix for f in auts}
    assert len(keys) == len(auts)
    assert [f.matrix for f in auts] == sorted(keys)


@pytest.mark.parametrize("G", [FgAbGroup(o) for o in [(2, 2), (2, 4), (3, 3), (2, 6), (0, 2), (0, 4)]])
def test_automorphisms_closed_under_composition_and_inverse(G):
    auts = enumerate_automorphisms(G)
    keys = {f.matrix for f in auts}
    for f in auts:
        assert f.inverse().matrix in keys
        for g in auts:
            assert (f @ g).matrix in keys


def test_free_rank_one_automorphisms():
    G = FgAbGroup((0, 2))
    auts = enumerate_automorphisms(G)
    # Z ⊕ Z_2: free part ±1, torsion column fixed, free column may hit the torsion
    assert len(auts) == 4
    assert all(f.is_automorphism() for f in auts)


# ---------------------------------------------------------------- congruence solving


def test_solver_examples():
    Z2, Z4 = Zmod(2), Zmod(4)
    om = solve_hom_equations(Z2, Z2, [(Homomorphism.identity(Z2), Homomorphism.identity(Z2), "pre")])
    assert om.is_identity()
    incl = Homomorphism(Z2, Z4, [[2]])
    proj = Homomorphism(Z4, Z2, [[1]])
    om = solve_hom_equations(Z4, Z4, [(incl, incl, "pre"), (proj, proj, "post")])
    brute = [m for m in enumerate_homomorphisms(Z4, Z4) if m @ incl == incl and proj @ m == proj]
    assert om in brute and len(brute) == 2
    # only the zero map Z_2 -> Z_3 exists, so Ω(1) = 1 is unsatisfiable
    Z3 = Zmod(3)
    L = Homomorphism(Z, Z2, [[1]])
    R = Homomorphism(Z, Z3, [[1]])
    assert solve_hom_equations(Z2, Z3, [(L, R, "pre")]) is None
    assert len(list(enumerate_homomorphisms(Z2, Z3))) == 1


def test_solver_rejects_bad_shapes():
    with pytest.raises(ShapeMismatch):
        solve_hom_equations(Zmod(2), Zmod(2), [(Homomorphism.identity(Zmod(4)), Homomorphism.identity(Zmod(4)), "pre")])


@st.composite
def solver_problems(draw):
    groups = [G for G in abelian_groups_up_to(8)]
    S = draw(st.sampled_from(groups))
    T = draw(st.sampled_from(groups))
    L1 = draw(st.sampled_from(groups))
    Y = draw(st.sampled_from(groups))
    L = _random_hom(draw, L1, S)
    Lp = _random_hom(draw, T, Y)
    if draw(st.booleans()):
        # a solvable system: take R from a random Ω
        om = _random_hom(draw, S, T)
        return S, T, L, om @ L, Lp, Lp @ om
    return S, T, L, _random_hom(draw, L1, T), Lp, _random_hom(draw, S, Y)


@given(solver_problems())
def test_solver_agrees_with_brute_force(problem):
    S, T, L, R, Lp, Rp = problem
    assert hom_count(S, T) <= 10**5
    cons = [(L, R, "pre"), (Lp, Rp, "post")]
    found = solve_hom_equations(S, T, cons)
    brute = [
        om
        for om in (Homomorphism.from_columns(S, T, cols) for cols in oracles.homs(S.orders, T.orders))
        if om @ L == R and Lp @ om == Rp
    ]
    if found is None:
        assert brute == []
    else:
        assert found @ L == R and Lp @ found == Rp
        assert found in brute
