"""Brute-force reference computations, independent of the engine's linear algebra.

Groups are given by tuples of cyclic orders (all finite here); elements are
coefficient tuples; maps are tuples of generator images.
"""

import itertools
import math


def elements(orders):
    return list(itertools.product(*(range(o) for o in orders)))


def add(orders, x, y):
    return tuple((a + b) % o for a, b, o in zip(x, y, orders))


def zero(orders):
    return (0,) * len(orders)


def order_of(orders, x):
    k, y = 1, x
    while y != zero(orders):
        y = add(orders, y, x)
        k += 1
    return k


def span(orders, gens):
    """Subgroup generated by ``gens``, by closure under addition."""
    seen = {zero(orders)}
    frontier = [zero(orders)]
    while frontier:
        nxt = []
        for x in frontier:
            for g in gens:
                y = add(orders, x, g)
                if y not in seen:
                    seen.add(y)
                    nxt.append(y)
        frontier = nxt
    return seen


def apply(S, T, images, x):
    out = zero(T)
    for c, img in zip(x, images):
        for _ in range(c):
            out = add(T, out, img)
    return out


def homs(S, T):
    """All homomorphisms as tuples of generator images."""
    choices = [[y for y in elements(T) if d % order_of(T, y) == 0] for d in S]
    return list(itertools.product(*choices))


def automorphisms(G):
    n = math.prod(G)
    out = []
    for f in homs(G, G):
        if len({apply(G, G, f, x) for x in elements(G)}) == n:
            out.append(f)
    return out


def compose(A, B, C, g, f):
    """``g ∘ f`` for ``f: A -> B``, ``g: B -> C``."""
    return tuple(apply(B, C, g, fx) for fx in f)


def map_order(G, f):
    ident = tuple(tuple(int(i == j) for j in range(len(G))) for i in range(len(G)))
    ident = tuple(tuple(x % o for x, o in zip(col, G)) for col in ident)
    k, g = 1, f
    while g != ident:
        g = compose(G, G, G, f, g)
        k += 1
    return k


def elementwise_table(S, T, images):
    return {x: apply(S, T, images, x) for x in elements(S)}


def quotient_order_profile(orders, subgroup):
    """Element-order multiset of ``G / subgroup`` computed on cosets."""
    reps = {min(add(orders, x, s) for s in subgroup) for x in elements(orders)}
    profile = []
    for c in reps:
        k, y = 1, c
        while y not in subgroup:
            y = add(orders, y, c)
            k += 1
        profile.append(k)
    return sorted(profile)


def group_profile(orders):
    return sorted(order_of(orders, x) for x in elements(orders))


# --- B^4 over an elementary abelian bottom, solved with sympy's Smith form ---

def _gamma_vec(r, a):
    """γ(Σ a_k e_k) in Γ((Z_2)^r), coordinates g(0..r-1) then t(k,l), k < l."""
    pairs = list(itertools.combinations(range(r), 2))
    return [a[k] * a[k] for k in range(r)] + [a[k] * a[l] for k, l in pairs]


def gamma_matrix_elementary(r, F):
    """Γ(F) for F in GL_r(F_2) (rows = target), built from the quadratic law only."""
    pairs = list(itertools.combinations(range(r), 2))
    gorders = [4] * r + [2] * len(pairs)
    col = lambda j: [F[k][j] for k in range(r)]
    cols = [_gamma_vec(r, col(j)) for j in range(r)]
    for k, l in pairs:
        x, y = col(k), col(l)
        s = [p + q for p, q in zip(x, y)]
        cols.append([u - v - w for u, v, w in zip(_gamma_vec(r, s), _gamma_vec(r, x), _gamma_vec(r, y))])
    return [[cols[c][i] % gorders[i] for c in range(len(cols))] for i in range(len(gorders))], gorders


def integer_system_solvable(rows, rhs):
    from sympy import ZZ, Matrix
    from sympy.matrices.normalforms import smith_normal_decomp

    A = Matrix(rows)
    D, U, _ = smith_normal_decomp(A, domain=ZZ)
    c = U * Matrix(rhs)
    for k in range(A.rows):
        d = D[k, k] if k < min(D.shape) else 0
        if (d == 0 and c[k] != 0) or (d != 0 and c[k] % d):
            return False
    return True


def _omega_exists(pi, mid, i, h, iGf, fh):
    P = len(pi)
    eqs, rhs, mods = [], [], []
    for c in range(P):
        for r in range(P):
            if pi[c] % pi[r] == 0:
                continue
            e = [0] * (P * P)
            e[r * P + c] = pi[c]
            eqs.append(e), rhs.append(0), mods.append(pi[r])
    for j in range(len(iGf[0])):
        for r in range(P):
            e = [0] * (P * P)
            for c in range(P):
                e[r * P + c] = i[c][j]
            eqs.append(e), rhs.append(iGf[r][j]), mods.append(pi[r])
    for c in range(P):
        for s in range(len(mid)):
            e = [0] * (P * P)
            for r in range(P):
                e[r * P + c] = h[s][r]
            eqs.append(e), rhs.append(fh[s][c]), mods.append(mid[s])
    m = len(eqs)
    rows = [e + [-mods[k] if q == k else 0 for q in range(m)] for k, e in enumerate(eqs)]
    return integer_system_solvable(rows, rhs)


def b_group_elementary_bottom(r, top_rank, mid, pi, b, i, h):
    """All (f_top, f_bot, f_mid) in B^4 for H_bot = (Z_2)^r, H_top = Z^top_rank (<= 1)."""
    out = []
    Fs = [[[f[j][k] for j in range(r)] for k in range(r)] for f in _gl2(r)]
    Ms = automorphisms(tuple(mid))
    for eps in ((1, -1) if top_rank else (1,)):
        for F in Fs:
            Gf, gorders = gamma_matrix_elementary(r, F)
            if top_rank and any(
                (sum(Gf[x][k] * b[k][0] for k in range(len(gorders))) - eps * b[x][0]) % gorders[x]
                for x in range(len(gorders))
            ):
                continue
            iGf = [[sum(i[x][k] * Gf[k][j] for k in range(len(gorders))) for j in range(len(gorders))] for x in range(len(pi))]
            for g in Ms:
                gm = [[g[c][s] for c in range(len(mid))] for s in range(len(mid))]
                fh = [[sum(gm[s][t] * h[t][c] for t in range(len(mid))) for c in range(len(pi))] for s in range(len(mid))]
                if _omega_exists(pi, mid, i, h, iGf, fh):
                    out.append((eps, F, gm))
    return out


def _gl2(r):
    return [f for f in homs((2,) * r, (2,) * r) if len(span((2,) * r, f)) == 2**r]
