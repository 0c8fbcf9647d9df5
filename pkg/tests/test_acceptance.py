"""Acceptance criteria, one test each.

Every test prints a single PASS/FAIL line (also collected in the terminal
summary) with the measured runtime against its pinned limit.  All
tolerances are exact: the quantities compared are integers or matrices.
"""

import math
import re
import subprocess
import sys
from contextlib import contextmanager
from pathlib import Path
from time import perf_counter

import builders
import oracles
from conftest import record_acceptance
from gammaseq.abgroup import Z, FgAbGroup, Homomorphism, Zmod, free
from gammaseq.analysis import infinite_witness, involution_from_table, normal_form_order4
from gammaseq.gamma import element_order, gamma_morphism, gamma_object
from gammaseq.gseq import compute_b_group, is_gamma_morphism, moore_sequence
from gammaseq.search import default_even_order_spec, default_odd_order_spec, run_even_order_sweep, run_odd_order_campaign

TOLERANCE = "exact"


@contextmanager
def criterion(capsys, number: int, title: str, limit_s: float):
    t0 = perf_counter()
    ok = False
    try:
        yield
        ok = True
    finally:
        elapsed = perf_counter() - t0
        status = "PASS" if ok and elapsed < limit_s else "FAIL"
        line = f"[{status}] criterion {number}: {title}  (tolerance {TOLERANCE}; {elapsed:.2f}s of {limit_s:g}s)"
        with capsys.disabled():
            print("\n" + line)
        record_acceptance(line)
    assert elapsed < limit_s, f"criterion {number} took {elapsed:.1f}s, limit {limit_s}s"


# ------------------------------------------------------------------ 1


def test_criterion_1_gamma_table(capsys):
    with criterion(capsys, 1, "Γ of Z, Z_d (2<=d<=12) and |Γ(Z_2^r)|, r<=4", 1.0):
        assert gamma_object(Z).group == Z
        for d in range(2, 13):
            expected = Zmod(2 * d) if d % 2 == 0 else Zmod(d)
            G = gamma_object(Zmod(d))
            assert G.carrier == expected
            # oracle: Γ(Z_d) is cyclic on γ(1), whose order is gcd(d^2, 2d)
            assert G.carrier.order == math.gcd(d * d, 2 * d)
            assert element_order(G.gamma((1,))) == G.carrier.order
        for r in range(5):
            assert gamma_object(FgAbGroup((2,) * r)).carrier.order == 4**r * 2 ** (r * (r - 1) // 2)


# ------------------------------------------------------------------ 2


def _brute_aut_count(H: FgAbGroup) -> int:
    if H == Z:
        # x -> kx is onto Z only for k = ±1
        return sum(1 for k in range(-5, 6) if abs(k) == 1)
    return len(oracles.automorphisms(H.orders))


def test_criterion_2_moore_b_groups(capsys):
    groups = [Zmod(2), Zmod(3), Zmod(4), Zmod(6), FgAbGroup((2, 2)), Z]
    expected = [1, 2, 2, 2, 6, 2]
    with criterion(capsys, 2, "Moore B-groups equal |Aut(H)| = 1,2,2,2,6,2 for n=2,3", 5.0):
        for H, e in zip(groups, expected):
            assert _brute_aut_count(H) == e
            for n in (2, 3):
                assert compute_b_group(moore_sequence(H, n)).order == e


# ------------------------------------------------------------------ 3


def test_criterion_3_onto_gamma_example(capsys):
    with criterion(capsys, 3, "Z ->> Z_4 -> H = H: B ≅ Aut(H), trivial for H = Z_2", 1.0):
        s = builders.onto_gamma_z2(Zmod(2))
        assert compute_b_group(s).order == 1
        for H in (Zmod(2), Zmod(3), FgAbGroup((2, 2))):
            s = builders.onto_gamma_z2(H)
            brute = oracles.automorphisms(H.orders)
            assert compute_b_group(s).order == len(brute)
            for cols in brute:
                f = Homomorphism.from_columns(H, H, cols)
                assert is_gamma_morphism(s, s, Homomorphism.scalar(Z, -1), f, Homomorphism.identity(Zmod(2))) is None


# ------------------------------------------------------------------ 4


def test_criterion_4_even_order_sweep(capsys):
    with criterion(capsys, 4, "n=3 sweep r<=2, |H_mid|<=4, |pi|<=64: B trivial or even, witnesses agree", 600.0):
        rep = run_even_order_sweep(default_even_order_spec())
        assert rep.summary["sequences"] > 0 and rep.summary["skipped"] == 0
        assert rep.violations == 0
        for r in rep.records:
            bg = r["b_group"]
            if not bg["finite"]:
                continue
            orders = [int(k) for k in bg["element_orders"]]
            trivial_cert = r.get("witness", {}).get("trivial", False)
            if bg["order"] == 1:
                assert trivial_cert
            else:
                assert any(k % 2 == 0 for k in orders)
                assert "witness" in r and not trivial_cert and r["witness"]["order"] == 2


# ------------------------------------------------------------------ 5


def test_criterion_5_gamma_injective_on_aut(capsys):
    with criterion(capsys, 5, "Γ injective on Aut(Z_2^r), r<=3 (|Aut| = 1, 6, 168)", 30.0):
        for r, count in [(1, 1), (2, 6), (3, 168)]:
            V = FgAbGroup((2,) * r)
            auts = [Homomorphism.from_columns(V, V, cols) for cols in oracles.automorphisms(V.orders)]
            assert len(auts) == count
            images = {gamma_morphism(f).matrix for f in auts}
            assert len(images) == count


# ------------------------------------------------------------------ 6


def _fixes_by_quadratic_map(P, g, chi, nf) -> bool:
    """Γ(g)χ recomputed from the normal form through γ and ⊗ on g(e_j)."""
    e = [g(v) for v in nf.new_basis]
    out = P.gamma(e[0])
    for j, a in enumerate(nf.alphas):
        if a:
            out = out + P.tensor(e[j], e[j])
    for j, b in enumerate(nf.betas):
        if b:
            out = out + P.tensor(e[j], e[j + 1])
    return out == chi


def test_criterion_6_normal_form_and_table(capsys):
    with criterion(capsys, 6, "order-4 χ in Γ(Z_2^r), r<=3: normal forms and table involutions", 300.0):
        checked_odd = 0
        for r in (1, 2, 3):
            V = FgAbGroup((2,) * r)
            P = gamma_object(V)
            auts = [Homomorphism.from_columns(V, V, cols) for cols in oracles.automorphisms(V.orders)]
            odd = [f for f in auts if oracles.map_order(V.orders, f.columns()) % 2 == 1 and not f.is_identity()]
            gam = [gamma_morphism(f) for f in odd]
            for chi in P.elements():
                if oracles.order_of(P.group.orders, chi.coeffs) != 4:
                    continue
                nf = normal_form_order4(chi)
                assert nf.expand() == chi
                if not any(G(chi.coeffs) == chi.coeffs for G in gam):
                    continue
                checked_odd += 1
                g = involution_from_table(nf)
                assert not g.is_identity() and (g @ g).is_identity()
                assert gamma_morphism(g)(chi.coeffs) == chi.coeffs
                assert _fixes_by_quadratic_map(P, g, chi, nf)
        assert checked_odd == 70


# ------------------------------------------------------------------ 7


def _nilpotent_nonzero(M) -> bool:
    n = len(M)
    N = [[M[r][c] - int(r == c) for c in range(n)] for r in range(n)]
    N2 = [[sum(N[r][k] * N[k][c] for k in range(n)) for c in range(n)] for r in range(n)]
    return any(any(x) for x in N) and not any(any(x) for x in N2)


def test_criterion_7_infinite_witnesses(capsys):
    with criterion(capsys, 7, "unipotent witnesses for H_top = Z^2 (n=2) and H_bot ⊇ Z^2 (n=3)", 1.0):
        s = builders.rank_two_top(2, Zmod(2), [(1,), (2,)])
        w = infinite_witness(s)
        k = 4  # b(Z^2) = Γ(Z_2) = Z_4 has exponent 4
        assert w.morphism.f_top.matrix == ((1, k), (0, 1))
        assert w.morphism.f_mid.is_identity() and w.morphism.f_bot.is_identity()
        assert _nilpotent_nonzero(w.morphism.f_top.matrix)
        assert is_gamma_morphism(s, s, *w.morphism.triple) is not None

        s = builders.gamma_inclusion(3, free(2))
        w = infinite_witness(s)
        assert w.morphism.f_bot.matrix == ((1, 2), (0, 1))
        assert w.morphism.f_top.is_identity() and w.morphism.f_mid.is_identity()
        assert _nilpotent_nonzero(w.morphism.f_bot.matrix)
        assert is_gamma_morphism(s, s, *w.morphism.triple) is not None


# ------------------------------------------------------------------ 8


def test_criterion_8_odd_order_campaign(capsys, tmp_path):
    with criterion(capsys, 8, "default n=2 campaign: deterministic, no nontrivial odd-order B^4", 3600.0):
        a, b = tmp_path / "a.jsonl", tmp_path / "b.jsonl"
        rep = run_odd_order_campaign(default_odd_order_spec(), out=str(a))
        run_odd_order_campaign(default_odd_order_spec(), out=str(b))
        assert a.read_bytes() == b.read_bytes()
        assert rep.summary["sequences"] > 0
        for r in rep.records:
            if "odd_order_hit" in r:
                # a hit must satisfy every necessary condition, else the engine is wrong
                assert r["odd_order_hit"]["all_pass"]
        assert rep.odd_order_hits == []
        assert rep.violations == 0


# ------------------------------------------------------------------ 9

PROPERTY_TESTS = {
    "tests/test_gamma.py": [
        "test_quadratic_map_is_quadratic",
        "test_quadratic_map_on_free_part",
        "test_functoriality",
        "test_gamma_morphism_is_natural_for_gamma",
    ],
    "tests/test_abgroup.py": [
        "test_snf_remultiplies_exactly",
        "test_solver_agrees_with_brute_force",
        "test_kernel_image_against_enumeration",
        "test_automorphisms_closed_under_composition_and_inverse",
    ],
    "tests/test_gseq.py": [
        "test_b_groups_are_closed",
        "test_family_method_matches_triple_filter",
    ],
}


def test_criterion_9_property_suites(capsys):
    root = Path(__file__).resolve().parent.parent
    with criterion(capsys, 9, "property suites: Γ laws, SNF, solver vs brute force, B closure", 600.0):
        selectors = [f"{path}::{name}" for path, names in PROPERTY_TESTS.items() for name in names]
        res = subprocess.run(
            [sys.executable, "-m", "pytest", "-q", "-p", "no:cacheprovider", *selectors],
            cwd=root, capture_output=True, text=True,
        )
        tail = res.stdout.strip().splitlines()[-1] if res.stdout.strip() else res.stderr
        assert res.returncode == 0, tail
        m = re.search(r"(\d+) passed", tail)
        assert m and int(m.group(1)) >= len(selectors)
