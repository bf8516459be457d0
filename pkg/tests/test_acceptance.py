"""Acceptance gate.

One test per criterion.  Each prints a single PASS/FAIL line with the
tolerance used and the measured runtime against its budget.
"""

import itertools
import json
import math
import random
import time
from importlib import resources

import pytest
from sympy import Matrix as SymMatrix, ZZ
from sympy.matrices.normalforms import invariant_factors

from floeralg.arnold import GradedGroupData, arnold_bound, homology_from_json, verify_bound_chain
from floeralg.equipoly import (
    AbelianRep, dim_poly, check_dimension_formula, evaluate, phi_embed, product_rep,
    psi_split, random_point, random_polynomial, table_instances,
)
from floeralg.flowcat import (
    FlowCategoryData, GeneratorSpec, Incidence, build_complex, check_chain_map,
    check_d_squared, check_homotopy, check_unitriangular, direct_sum,
    flow_category_from_json, homology, invert_unitriangular, perturb, regrade,
    synthetic_homotopy,
)
from floeralg.linalg import (
    IntMatrix, check_quotient_rank_bound, check_submodule_torsion_bound,
    diagonal_matrix, snf_int,
)
from floeralg.novikov import ONE, ZERO, NovikovSeries, divide, ideal_generator, parse_series
from floeralg.strata import (
    chain_poset, check_boundary_factorization, check_delta,
    check_factorization_associativity, check_outer_product, cone_model,
    enumerate_word_poset, subset_poset,
)


@pytest.fixture
def report(capsys):
    """Print one gate line, visible even when output is captured."""
    def emit(number, name, ok, tolerance, elapsed, budget=None):
        status = "PASS" if ok else "FAIL"
        limit = f" / budget {budget:.0f} s" if budget else ""
        with capsys.disabled():
            print(f"\n[{status}] criterion {number}: {name} | tolerance: {tolerance} | "
                  f"runtime {elapsed:.2f} s{limit}")
    return emit


def fixture(name):
    return json.loads((resources.files("floeralg") / "fixtures" / f"{name}.json").read_text())


# -- 1. principal ideals over the Novikov ring ------------------------------------------------


def _random_laurent(rng):
    lo = rng.randint(-2, 2)
    coeffs = {}
    for e in range(lo, lo + 5):
        if rng.random() < 0.6:
            c = rng.randint(-9, 9)
            if c:
                coeffs[e] = c
    if not coeffs:
        coeffs[lo] = rng.choice([c for c in range(-9, 10) if c])
    return NovikovSeries.from_dict(coeffs)


def test_criterion_1_pid_suite(report):
    t0 = time.perf_counter()
    S = parse_series
    fixtures = [(["2", "2 + T"], "1"), (["4 + 2*T", "2 + T"], "2 + T"), (["6", "10"], "2")]
    ok = all(ideal_generator([S(g) for g in gens], 32).generator == S(exp) for gens, exp in fixtures)
    rng = random.Random(20260101)
    failures = 0
    for _ in range(500):
        pair = [_random_laurent(rng), _random_laurent(rng)]
        ig = ideal_generator(pair, 32)
        g = ig.generator
        combo = sum((w * x for w, x in zip(ig.witnesses, pair)), ZERO)
        good = combo.agrees_with(g, 32)
        try:
            for x in pair:
                divide(x, g, 32)
        except ArithmeticError:
            good = False
        fine = ideal_generator(pair, 64).generator
        good = good and fine.truncate(32) == g.truncate(32)
        failures += not good
    ok = ok and failures == 0
    elapsed = time.perf_counter() - t0
    report(1, f"Novikov PID suite (3 fixtures + 500 pairs, {failures} failures)", ok and elapsed < 5,
           "exact fixtures; Bezout/divisibility mod T^32; K=64 truncation-stable", elapsed, 5)
    assert ok
    assert elapsed < 5


# -- 2. Smith normal form and the module inequalities -----------------------------------------


def _rand_int_matrix(rng, max_dim=6, cmax=9):
    n, c = rng.randint(1, max_dim), rng.randint(1, max_dim)
    density = rng.random()
    return [[rng.randint(-cmax, cmax) if rng.random() < density else 0 for _ in range(c)] for _ in range(n)]


def _oracle_factors(rows):
    return [int(x) for x in invariant_factors(SymMatrix(rows), domain=ZZ)]


def test_criterion_2_snf_suites(report):
    t0 = time.perf_counter()
    rng = random.Random(7)
    snf_bad = 0
    for _ in range(1000):
        rows = _rand_int_matrix(rng)
        m = IntMatrix(rows)
        d, L, R = snf_int(m)
        nz = [x for x in d if x]
        good = (L @ m @ R == diagonal_matrix(d, m.shape, m.ring)
                and all(b % a == 0 for a, b in zip(nz, nz[1:]))
                and list(d) == _oracle_factors(rows))
        snf_bad += not good

    # quotient bound: Z = Z^n, S spanned by columns; structure of Z/S read independently via sympy
    rank_bad = 0
    for _ in range(1000):
        n = rng.randint(1, 5)
        cols = rng.randint(0, 5)
        S_rows = [[rng.randint(-6, 6) for _ in range(cols)] for _ in range(n)]
        S = IntMatrix(S_rows, cols)
        holds = check_quotient_rank_bound(n, S)
        if cols:
            f = [x for x in _oracle_factors(S_rows) if x]
            k = sum(1 for x in f if x != 1)
            free = n - len(f)
            holds = holds and n >= free + k and len(f) >= k
        rank_bad += not holds

    # submodule bound on 1000 instances
    sub_bad = 0
    for _ in range(1000):
        n = rng.randint(1, 4)
        rel = [[rng.randint(-6, 6) for _ in range(n)] for _ in range(rng.randint(0, 3))]
        gens = [[rng.randint(-6, 6) for _ in range(n)] for _ in range(rng.randint(1, 3))]
        sub_bad += not check_submodule_torsion_bound(IntMatrix(rel, n), IntMatrix(gens, n))

    ok = snf_bad == rank_bad == sub_bad == 0
    elapsed = time.perf_counter() - t0
    report(2, f"SNF suites (1000 SNF, {snf_bad} bad; quotient bound {rank_bad} bad; "
              f"submodule bound {sub_bad} bad)", ok and elapsed < 30,
           "exact; invariant factors equal to the sympy oracle", elapsed, 30)
    assert ok
    assert elapsed < 30


# -- 3. fixture homology ------------------------------------------------------------------------


EXPECTED_HOMOLOGY = {
    "rp2": [(1, []), (0, [2]), (0, [])],
    "rp3": [(1, []), (0, [2]), (0, []), (1, [])],
    "s2": [(1, []), (0, []), (1, [])],
    "t2": [(1, []), (2, []), (1, [])],
    "cp2": [(1, []), (0, []), (1, []), (0, []), (1, [])],
}


def _normalized(H):
    return {i: (s.rank, s.torsion_leading()) for i, s in H.items() if s.rank or s.torsion_leading()}


def test_criterion_3_fixture_homology(report):
    t0 = time.perf_counter()
    ok, notes = True, []
    for name, expected in EXPECTED_HOMOLOGY.items():
        fc = flow_category_from_json(fixture(name))
        assert fc.two_n == 0
        cx = build_complex(fc)
        d2 = bool(check_d_squared(cx))
        got = _normalized(homology(cx))
        want = {i: v for i, v in enumerate(expected) if v[0] or v[1]}
        if not d2 or got != want:
            ok = False
            notes.append(name)
    elapsed = time.perf_counter() - t0
    report(3, "fixture homology RP2, RP3, S2, T2, CP2" + (f" (mismatch: {notes})" if notes else ""),
           ok, "exact", elapsed)
    assert ok, notes


# -- 4. the Arnold-type bound -----------------------------------------------------------------------


def test_criterion_4_arnold_bound(report):
    t0 = time.perf_counter()
    rp3 = GradedGroupData.from_lists([1, 0, 0, 1], {1: [2]})
    b_rp3 = arnold_bound(rp3, 1)
    odd = GradedGroupData.from_lists([1, 0, 0, 0, 1], {1: [2], 3: [3]})
    betti = sum(odd.betti(j) for j in odd.degrees())
    extra = arnold_bound(odd, 1) - betti
    h, N = homology_from_json(fixture("odd_torsion_homology"))
    file_extra = arnold_bound(h, N) - sum(h.betti(j) for j in h.degrees())
    ok = b_rp3 == 4 and extra == 2 and file_extra == 2
    elapsed = time.perf_counter() - t0
    report(4, f"Arnold bound (RP3 -> {b_rp3}; Z/2 + Z/3 in odd degrees adds {extra})", ok,
           "exact integers", elapsed)
    assert ok


# -- 5. chain-level identities on synthetic data --------------------------------------------------


def _identity_mod(M, K):
    return all(M[i, j].agrees_with(ONE if i == j else ZERO, K)
               for i in range(M.nrows) for j in range(M.ncols))


def test_criterion_5_chain_level_identities(report):
    t0 = time.perf_counter()
    K = 32
    bad, perturbations, missed = [], 0, 0
    for seed in range(100):
        rng = random.Random(seed)
        sh = synthetic_homotopy(rng, K)
        good = (check_d_squared(sh.morse) and check_d_squared(sh.floer)
                and check_chain_map(sh.pss, sh.morse, sh.floer)
                and check_chain_map(sh.ssp, sh.floer, sh.morse)
                and check_unitriangular(sh.comparison)
                and check_homotopy(sh.pearl, sh.ssp, sh.pss, sh.h, sh.morse, sh.floer))
        inv = invert_unitriangular(sh.comparison, K)
        for c, B in sh.comparison.blocks.items():
            good = good and _identity_mod(B @ inv.blocks[c], K) and _identity_mod(inv.blocks[c] @ B, K)
        # every single coefficient of pearl and of h, perturbed by a random monomial
        for target in ("pearl", "h"):
            m = getattr(sh, target)
            for cls, B in m.blocks.items():
                for r in range(B.nrows):
                    for c in range(B.ncols):
                        delta = NovikovSeries.monomial(rng.choice([1, -1, 2, -3]), rng.randint(0, 8))
                        args = {"pearl": sh.pearl, "h": sh.h}
                        args[target] = perturb(m, cls, r, c, delta)
                        perturbations += 1
                        if check_homotopy(args["pearl"], sh.ssp, sh.pss, args["h"], sh.morse, sh.floer):
                            missed += 1
        if not good:
            bad.append(seed)
    ok = not bad and missed == 0
    elapsed = time.perf_counter() - t0
    report(5, f"chain-level identities (100 fixtures, {len(bad)} bad; "
              f"{perturbations} perturbations, {missed} undetected)", ok and elapsed < 20,
           "exact Laurent data; inverse checked mod T^32", elapsed, 20)
    assert ok, (bad, missed)
    assert elapsed < 20


# -- 6. the inequality chain with slack --------------------------------------------------------------


def _pad(fc, pairs):
    for k in range(pairs):
        pad = FlowCategoryData(2, 100, [GeneratorSpec("u", 1, 0), GeneratorSpec("v", 0, 1)],
                               [Incidence("u", "v", 0, 1)])
        fc = direct_sum(fc, pad, prefix=f"pad{k}_")
    return fc


def test_criterion_6_verify_bound_chain(report):
    t0 = time.perf_counter()
    ref = GradedGroupData.from_lists([1, 0, 0, 1], {1: [2]})
    base = regrade(flow_category_from_json(fixture("rp3")), 2)
    rep = verify_bound_chain(build_complex(base), ref, 1)
    ok = rep.ok and rep.slack == 0 and all(c.holds for c in rep.checks)
    slacks = [rep.slack]
    for pairs in (1, 2, 3):
        r = verify_bound_chain(build_complex(_pad(base, pairs)), ref, 1)
        slacks.append(r.slack)
        ok = ok and r.ok and r.slack == 2 * pairs and r.bound == rep.bound
    elapsed = time.perf_counter() - t0
    report(6, f"bound chain on RP3 ({len(rep.checks)} inequalities; slack with 0..3 acyclic pairs: {slacks})",
           ok, "exact; slack equals padding rank", elapsed)
    assert ok


# -- 7. strata --------------------------------------------------------------------------------------------


def test_criterion_7_strata_suite(report):
    t0 = time.perf_counter()
    notes = []
    for n in range(2, 7):
        names = [f"c{i}" for i in range(n)]
        W = enumerate_word_poset(chain_poset(n, names), "c0", names[-1])
        if len(W.elements) != 2 ** (n - 2):
            notes.append(f"count n={n}")
        for k in range(1, n - 1):
            if not check_boundary_factorization(W, f"c{k}"):
                notes.append(f"factorization n={n} r=c{k}")
        for r, s in itertools.combinations(range(1, n - 1), 2):
            if not check_factorization_associativity(W.ambient, "c0", f"c{r}", f"c{s}", names[-1]):
                notes.append(f"associativity n={n}")
        if n >= 3:
            for gaps in itertools.product([1, 2], repeat=n - 1):
                acts = {f"c{i}": sum(gaps[:i]) for i in range(n)}
                if not check_delta(W, acts):
                    notes.append(f"delta n={n} gaps={gaps}")
    samples, corners = 0, 0
    models = [
        cone_model(enumerate_word_poset(chain_poset(4, ["a", "b", "c", "d"]), "a", "d")),
        cone_model(enumerate_word_poset(chain_poset(5, list("abcde")), "a", "e")),
        cone_model(subset_poset("xy")),
    ]
    for k, X in enumerate(models):
        rep = check_outer_product(X, X, samples=1000, rng=random.Random(k))
        samples += rep.samples
        corners += rep.corner_samples
        if not rep.ok:
            notes.append(f"outer collar model {k}: {rep.failures[:2]}")
    ok = not notes
    elapsed = time.perf_counter() - t0
    report(7, f"strata suite (chains 2..6; {samples} collared samples, {corners} corner points)", ok,
           "exact rational coordinates", elapsed)
    assert ok, notes[:5]


# -- 8. equivariant polynomials ----------------------------------------------------------------------------


def _abelian_groups_up_to(order):
    groups = [(1,), (2,), (3,), (4,), (2, 2), (5,), (6,)]
    return [g for g in groups if math.prod(g) <= order]


def _symmetrization(V, W, d):
    """Average over the group of tr(g | Hom(Sym^{<=d} V, W)), in floating point."""
    import cmath
    from floeralg.equipoly import monomials
    mons = monomials(V.dim, d)
    total = 0j
    for g in V.elements():
        def chi(w):
            return cmath.exp(2j * cmath.pi * sum(a * b / m for a, b, m in zip(w, g, V.group)))
        sym = sum(chi(tuple(sum(k * w[i] for k, w in zip(a, V.weights)) for i in range(len(V.group)))).conjugate()
                  for a in mons)
        total += sum(chi(w) for w in W.weights) * sym
    return round((total / len(V.elements())).real)


def test_criterion_8_equipoly_suite(report):
    t0 = time.perf_counter()
    dim_cases, dim_bad = 0, 0
    for group in _abelian_groups_up_to(6):
        elems = list(itertools.product(*[range(m) for m in group]))
        reps = [AbelianRep(group, list(ws)) for n in (1, 2) for ws in itertools.combinations_with_replacement(elems, n)]
        for V in reps:
            for W in reps:
                for d in range(4):
                    dim_cases += 1
                    dim_bad += dim_poly(V, W, d) != _symmetrization(V, W, d)

    rng = random.Random(8)
    split_bad = 0
    for _ in range(200):
        g1, g2 = rng.choice([(1,), (2,), (3,)]), rng.choice([(2,), (3,), (4,)])

        def rand_rep(g):
            return AbelianRep(g, [tuple(rng.randrange(m) for m in g) for _ in range(rng.randint(1, 2))])
        V1, W1, V2, W2 = rand_rep(g1), rand_rep(g1), rand_rep(g2), rand_rep(g2)
        P1 = random_polynomial(V1, W1, rng.randint(0, 3), rng)
        P2 = random_polynomial(V2, W2, rng.randint(0, 3), rng)
        v1, v2 = random_point(V1.dim, rng), random_point(V2.dim, rng)
        P = phi_embed(P1, P2)
        (a, Q1), (b, Q2) = psi_split(v1 + v2, P, (V1, V2), (W1, W2))
        inverse = (a, b) == (v1, v2) and Q1.coeffs == P1.coeffs and Q2.coeffs == P2.coeffs
        # ev after psi on a general polynomial on the product
        R = random_polynomial(product_rep(V1, V2), product_rep(W1, W2), rng.randint(0, 3), rng)
        v = random_point(V1.dim + V2.dim, rng)
        (u1, R1), (u2, R2) = psi_split(v, R, (V1, V2), (W1, W2))
        ev = evaluate(u1, R1) + evaluate(u2, R2) == evaluate(v, R)
        split_bad += not (inverse and ev)

    table_bad = []
    for k, (V, W, d, H) in enumerate(table_instances()):
        rep = check_dimension_formula(V, W, d, H, trials=50, rng=random.Random(k))
        if not rep.surjective:
            table_bad.append(k)
    ok = dim_bad == 0 and split_bad == 0 and not table_bad
    elapsed = time.perf_counter() - t0
    report(8, f"equipoly suite ({dim_cases} dimension cases, {dim_bad} bad; 200 split instances, "
              f"{split_bad} bad; table rows not surjective: {table_bad})", ok and elapsed < 60,
           "exact over Q(i); oracle rounded from floating point", elapsed, 60)
    assert ok
    assert elapsed < 60
