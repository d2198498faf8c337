"""The acceptance suite: ten named criteria, each with a hard-coded check and
a runtime budget.  Used both by ``tests/test_acceptance.py`` and by the CLI
subcommand ``suite acceptance``; every criterion is deterministic under the
default seed."""

from __future__ import annotations

import itertools
import random
import time
from dataclasses import dataclass
from fractions import Fraction
from typing import Callable

from . import _linalg
from .frobenius import (
    AlgebraMap,
    GradedFrobeniusAlgebra,
    av_frobenius_possible,
    av_gamma_check,
    build_k3_model,
    bv_small_diagonal_identity,
    check_frobenius_axioms,
    classify_map,
    cy_scaling_solvable,
    default_k3_model,
    diagonal_pushforward_point,
    identity_map,
)
from .k3families import (
    catalog,
    fermat_constraints_check,
    fermat_solution,
    fermat_twist_family,
    isometric_twist_family,
    obstruction_sequence,
    pairwise_isogeny_obstruction,
    scale_isometry_possible,
    Lattice,
)
from .numbers import (
    DomainError,
    Place,
    REAL_PLACE,
    hilbert_symbol,
    hilbert_symbol_oracle,
    is_sum_of_two_rational_squares,
    relevant_places,
)
from .orbifold import (
    DEFAULT_SEED,
    all_permutations,
    associativity_trials,
    epsilon_sign,
    goettsche_oracle,
    graph_defect,
    joint_orbits,
    sn_invariant_dimension,
)
from .quadforms import (
    QuadraticForm,
    diagonal_form,
    direct_sum,
    hasse_epsilon_twist,
    hyperbolic_plane,
    invariants,
    is_equivalent,
    twist,
    twist_is_equivalent_predicted,
)


@dataclass(frozen=True)
class CriterionResult:
    cid: int
    name: str
    passed: bool
    elapsed_s: float
    budget_s: float
    details: dict

    @property
    def within_budget(self) -> bool:
        return self.elapsed_s < self.budget_s

    def line(self) -> str:
        status = "PASS" if (self.passed and self.within_budget) else "FAIL"
        return (
            f"[{status}] criterion {self.cid}: {self.name} "
            f"({self.elapsed_s:.2f}s / budget {self.budget_s:.0f}s)"
        )

    def to_jsonable(self) -> dict:
        return {
            "id": self.cid,
            "name": self.name,
            "passed": self.passed and self.within_budget,
            "checks_passed": self.passed,
            "elapsed_s": round(self.elapsed_s, 3),
            "budget_s": self.budget_s,
            "details": self.details,
        }


# ---------------------------------------------------------------------------
# 1. Hilbert-symbol conformance

def _criterion_hilbert() -> tuple[bool, dict]:
    values = [Fraction(v) for v in (1, -1, 2, -2, 3, -3, 5, -5)]
    places = [Place(2), Place(3), Place(5), REAL_PLACE]
    mismatches = 0
    for a, b in itertools.product(values, repeat=2):
        for v in places:
            if hilbert_symbol(a, b, v) != hilbert_symbol_oracle(a, b, v):
                mismatches += 1
    rng = random.Random(DEFAULT_SEED)
    reciprocity_failures = 0
    for _ in range(200):
        a = Fraction(rng.randint(-50, 50) or 1, rng.randint(1, 30))
        b = Fraction(rng.randint(-50, 50) or 1, rng.randint(1, 30))
        prod = 1
        for v in relevant_places(a, b):
            prod *= hilbert_symbol(a, b, v)
        if prod != 1:
            reciprocity_failures += 1
    ok = mismatches == 0 and reciprocity_failures == 0
    return ok, {
        "oracle_mismatches": mismatches,
        "pairs_checked": len(values) ** 2 * len(places),
        "reciprocity_failures": reciprocity_failures,
    }


# ---------------------------------------------------------------------------
# 2. twist lemma suite

def _twist_suite_forms() -> dict[str, QuadraticForm]:
    u = hyperbolic_plane()
    return {
        "U": u,
        "U+U": direct_sum(u, u),
        "<8,8>": diagonal_form([Fraction(8), Fraction(8)]),
        "E8(-1)Q": catalog("E8_minus").rational_form(),
    }


def _criterion_twist_lemma() -> tuple[bool, dict]:
    rng = random.Random(DEFAULT_SEED)
    verdict_mismatches = 0
    epsilon_mismatches = 0
    checked = 0
    for name, q in _twist_suite_forms().items():
        base_inv = invariants(q)
        for _ in range(50):
            m = Fraction(rng.randint(1, 40), rng.randint(1, 40))
            twisted = twist(q, m)
            direct = is_equivalent(q, twisted)
            predicted = twist_is_equivalent_predicted(q, m)
            if direct != predicted:
                verdict_mismatches += 1
            tw_inv = invariants(twisted)
            places = {v for v, _ in base_inv.hasse} | {v for v, _ in tw_inv.hasse}
            places.update(relevant_places(m))
            for v in places:
                if hasse_epsilon_twist(q, m, v) != tw_inv.hasse_at(v):
                    epsilon_mismatches += 1
            checked += 1
    ok = verdict_mismatches == 0 and epsilon_mismatches == 0
    return ok, {
        "cases": checked,
        "verdict_mismatches": verdict_mismatches,
        "epsilon_mismatches": epsilon_mismatches,
    }


# ---------------------------------------------------------------------------
# 3 and 4: the two families

def _criterion_family_a() -> tuple[bool, dict]:
    cert = fermat_twist_family(10)
    pairs = len(cert.per_pair)
    obstructed = sum(1 for v in cert.per_pair.values() if v.hodge_obstructed)
    # re-derive every verdict both ways, independently of the certificate
    base = diagonal_form([Fraction(8), Fraction(8)])
    agreement = 0
    for (j, k), verdict in cert.per_pair.items():
        mj, mk = cert.twists[j], cert.twists[k]
        by_inv = is_equivalent(twist(base, mj), twist(base, mk))
        by_sum = is_sum_of_two_rational_squares(Fraction(mj * mk))
        if by_inv == by_sum == verdict.q_iso:
            agreement += 1
    ok = pairs == 45 and obstructed == 45 and agreement == 45
    return ok, {
        "twists": list(cert.twists),
        "pairs": pairs,
        "obstructed": obstructed,
        "double_derivation_agreement": agreement,
    }


def _criterion_family_b() -> tuple[bool, dict]:
    u = catalog("U")
    uu = Lattice(
        tuple(
            tuple(
                (u.gram[i % 2][j % 2] if (i // 2 == j // 2) else 0) for j in range(4)
            )
            for i in range(4)
        ),
        "U+U",
    )
    cert = isometric_twist_family(uu, 10)
    isometric = all(m["q_iso_to_base"] for m in cert.per_member.values())
    pairs = len(cert.per_pair)
    obstructed = sum(1 for v in cert.per_pair.values() if v.hodge_obstructed)
    try:
        isometric_twist_family(catalog("K3_Lambda"), 2)
        rejected = False
    except DomainError as exc:
        rejected = "signature" in str(exc)
    ok = isometric and pairs == 45 and obstructed == 45 and rejected
    return ok, {
        "twists": list(cert.twists),
        "all_isometric": isometric,
        "pairs": pairs,
        "obstructed": obstructed,
        "signature_precondition_rejected": rejected,
    }


# ---------------------------------------------------------------------------
# 5. quartic-surface reproduction

def _criterion_fermat_quartic() -> tuple[bool, dict]:
    value_failures = 0
    for m in range(1, 21):
        rep = fermat_constraints_check(fermat_solution(m))
        expected = Fraction(2, m * m) * (2 * m**4 + 1)
        if not (rep.valid and rep.obstruction_value == expected):
            value_failures += 1
    seq = obstruction_sequence(4)
    seq_ok = (
        seq.terms == (1, 3, 489, 55920917883387)
        and seq.ok
        and len(seq.per_pair) == 6
    )
    ratio_failures = 0
    small_terms = [t for t in seq.terms if t <= 489]
    for mj, mk in itertools.combinations(small_terms, 2):
        vj = fermat_constraints_check(fermat_solution(mj)).obstruction_value
        vk = fermat_constraints_check(fermat_solution(mk)).obstruction_value
        if not pairwise_isogeny_obstruction(vj, vk, Fraction(1)):
            ratio_failures += 1
    ok = value_failures == 0 and seq_ok and ratio_failures == 0
    return ok, {
        "value_failures": value_failures,
        "sequence": [str(t) for t in seq.terms],
        "sequence_ok": seq_ok,
        "ratio_failures": ratio_failures,
        "pairs_in_sequence_report": len(seq.per_pair),
    }


# ---------------------------------------------------------------------------
# 6. integral scale rigidity

def _criterion_scale() -> tuple[bool, dict]:
    lam = catalog("K3_Lambda")
    verdicts = {c: scale_isometry_possible(lam, c) for c in range(-10, 11) if c != 0}
    ok = all(v == (c == 1) for c, v in verdicts.items())
    return ok, {"range": "[-10,10] minus 0", "only_c_1": ok}


# ---------------------------------------------------------------------------
# 7. Frobenius axioms, mutations, small-diagonal identity

def _mutated_models() -> list[tuple[str, GradedFrobeniusAlgebra]]:
    out = []

    def fresh() -> GradedFrobeniusAlgebra:
        return default_k3_model()

    m1 = fresh()  # unit axiom broken
    m1.mult[(0, 5)] = {5: Fraction(2)}
    out.append(("unit", m1))

    m2 = fresh()  # grading broken: a degree-2 product lands in degree 0
    m2.mult[(3, 4)] = {0: Fraction(1)}
    m2.mult[(4, 3)] = {0: Fraction(1)}
    out.append(("grading", m2))

    m3 = fresh()  # one structure constant altered asymmetrically
    pt = m3.dim - 1
    old = dict(m3.mult.get((1, 2), {}))
    old[pt] = old.get(pt, Fraction(0)) + 1
    m3.mult[(1, 2)] = old
    out.append(("asymmetric-constant", m3))

    m4 = fresh()  # counit zeroed: pairing degenerates
    m4.counit = tuple(Fraction(0) for _ in m4.counit)
    out.append(("zero-counit", m4))

    m5 = fresh()  # one degree-2 vector made orthogonal to everything
    for j in range(m5.dim):
        m5.mult.pop((1, j), None)
        m5.mult.pop((j, 1), None)
    m5.mult[(0, 1)] = {1: Fraction(1)}
    m5.mult[(1, 0)] = {1: Fraction(1)}
    out.append(("isotropic-row", m5))
    return out


def _criterion_frobenius_axioms() -> tuple[bool, dict]:
    model = default_k3_model()
    base = check_frobenius_axioms(model)
    bv = bv_small_diagonal_identity(model)
    euler = diagonal_pushforward_point(model)
    o = model.point_class()
    euler_ok = euler == {k: 24 * v for k, v in o.items()}
    mutation_results = {}
    mutations_fail = True
    for name, mutant in _mutated_models():
        rep = check_frobenius_axioms(mutant)
        mutation_results[name] = rep.failed_axiom
        if rep.ok:
            mutations_fail = False
    ok = base.ok and bv and euler_ok and mutations_fail
    return ok, {
        "axioms_ok": base.ok,
        "bv_identity": bv,
        "euler_is_24_point": euler_ok,
        "mutations_failed_at": mutation_results,
    }


# ---------------------------------------------------------------------------
# 8. classification-criteria equivalence suite

def _quaternion_block(m: int) -> list[list[int]]:
    reps = {2: (1, 1, 0, 0), 3: (1, 1, 1, 0), 5: (2, 1, 0, 0)}
    a, b, c, d = reps[m]
    return [
        [a, -b, -c, -d],
        [b, a, -d, c],
        [c, d, a, -b],
        [d, -c, b, a],
    ]


def _suite_k3_form() -> QuadraticForm:
    u = hyperbolic_plane()
    return direct_sum(u, u, u, diagonal_form([Fraction(-1)] * 16))


def _twisted_isometry_map(model: GradedFrobeniusAlgebra, m: int) -> AlgebraMap:
    """An explicit isometry of U^3 + <-1>^16 onto its twist by m, promoted to
    an algebra map scaling the point class by m."""
    dim = model.dim
    r = _linalg.zeros(dim, dim)
    r[0][0] = Fraction(1)
    r[dim - 1][dim - 1] = Fraction(m)
    for block in range(3):  # diag(m, 1) on each hyperbolic plane
        base = 1 + 2 * block
        r[base][base] = Fraction(m)
        r[base + 1][base + 1] = Fraction(1)
    q = _quaternion_block(m)
    for block in range(4):  # quaternion norm-m blocks on <-1>^16
        base = 7 + 4 * block
        for i in range(4):
            for j in range(4):
                r[base + i][base + j] = Fraction(q[i][j])
    return AlgebraMap(model, model, r)


def _criterion_rigid_iso_suite() -> tuple[bool, dict]:
    rng = random.Random(DEFAULT_SEED)
    big = build_k3_model(_suite_k3_form(), QuadraticForm(()), label="suite-22")
    toy_u = build_k3_model(hyperbolic_plane(), QuadraticForm(()), label="toy-U")
    toy_uu = build_k3_model(
        direct_sum(hyperbolic_plane(), hyperbolic_plane()), QuadraticForm(()), label="toy-UU"
    )
    maps: list[tuple[str, AlgebraMap]] = []

    for m in (2, 3, 5):
        maps.append((f"twisted-m{m}", _twisted_isometry_map(big, m)))
        r = _linalg.identity(toy_u.dim)
        r[1][1] = Fraction(m)
        r[3][3] = Fraction(m)
        maps.append((f"toy-twisted-m{m}", AlgebraMap(toy_u, toy_u, r)))
    maps.append(("identity-22", identity_map(big)))

    swap = _linalg.zeros(big.dim, big.dim)  # swap the first two hyperbolic planes
    swap[0][0] = Fraction(1)
    swap[big.dim - 1][big.dim - 1] = Fraction(1)
    for i in range(2):
        swap[1 + i][3 + i] = Fraction(1)
        swap[3 + i][1 + i] = Fraction(1)
    for i in range(5, big.dim - 1):
        swap[i][i] = Fraction(1)
    maps.append(("swap-U-blocks", AlgebraMap(big, big, swap)))

    stretch = _linalg.identity(big.dim)  # diag(t, 1/t) on one hyperbolic plane
    stretch[1][1] = Fraction(3)
    stretch[2][2] = Fraction(1, 3)
    maps.append(("stretch-U", AlgebraMap(big, big, stretch)))

    scaled = [[Fraction(2) * x for x in row] for row in _linalg.identity(big.dim)]
    maps.append(("scaled-2", AlgebraMap(big, big, scaled)))

    trunc = _linalg.identity(big.dim)
    trunc[5][5] = Fraction(0)
    maps.append(("non-invertible", AlgebraMap(big, big, trunc)))

    while len(maps) < 100:
        # weight-0 correspondences: random blocks within each degree stratum
        model = toy_u if rng.random() < 0.5 else toy_uu
        r = _linalg.zeros(model.dim, model.dim)
        for i in range(model.dim):
            for j in range(model.dim):
                if model.degrees[i] == model.degrees[j]:
                    r[i][j] = Fraction(rng.randint(-2, 2))
        maps.append((f"random-{len(maps)}", AlgebraMap(model, model, r)))

    disagreements = 0
    twisted_ok = True
    for name, gamma in maps:
        cls = classify_map(gamma)
        if not cls.criteria_agree:
            disagreements += 1
        if name.startswith(("twisted-m", "toy-twisted-m")):
            m = int(name.rsplit("m", 1)[1])
            if not (
                cls.algebra_hom
                and cls.invertible
                and cls.degree_c == m
                and not cls.frobenius_iso
            ):
                twisted_ok = False
    ok = disagreements == 0 and twisted_ok
    return ok, {
        "maps": len(maps),
        "criteria_disagreements": disagreements,
        "twisted_maps_classified_correctly": twisted_ok,
    }


# ---------------------------------------------------------------------------
# 9. abelian and Calabi-Yau kernels

def _criterion_abelian_cy() -> tuple[bool, dict]:
    rng = random.Random(DEFAULT_SEED)
    mismatches = 0
    for trial in range(50):
        g = 1 if trial % 10 < 7 else 2
        n = 2 * g
        while True:
            f1 = [[rng.randint(-3, 3) for _ in range(n)] for _ in range(n)]
            d = _linalg.det(_linalg.as_fraction_matrix(f1))
            if d != 0:
                break
        lam = Fraction(rng.randint(1, 4), rng.randint(1, 3))
        rep = av_gamma_check(g, lam, f1)
        deg = abs(int(d))
        if not rep.adjoint_law_ok:
            mismatches += 1
        if rep.frobenius_iso != (lam ** (2 * g) == d):
            mismatches += 1
        possible = av_frobenius_possible(deg, g)
        root = round(deg ** (1.0 / (2 * g)))
        has_integer_root = any(c > 0 and c ** (2 * g) == deg for c in (root - 1, root, root + 1))
        if possible != has_integer_root:
            mismatches += 1
        if rep.frobenius_iso and not possible:
            mismatches += 1
        if possible and d > 0:
            lam_star = next(c for c in (root - 1, root, root + 1) if c > 0 and c ** (2 * g) == deg)
            if not av_gamma_check(g, Fraction(lam_star), f1).frobenius_iso:
                mismatches += 1
    bc = (
        cy_scaling_solvable(3, Fraction(3), "rationals", False),
        cy_scaling_solvable(3, Fraction(3), "rationals", True),
        cy_scaling_solvable(3, Fraction(3), "reals", True),
    )
    bc_ok = bc == (True, False, True)
    ok = mismatches == 0 and bc_ok
    return ok, {
        "instances": 50,
        "mismatches": mismatches,
        "borisov-caldararu": {
            "rational_algebra_iso": bc[0],
            "rational_frobenius": bc[1],
            "real_frobenius": bc[2],
        },
    }


# ---------------------------------------------------------------------------
# 10. orbifold suite

def _criterion_orbifold() -> tuple[bool, dict]:
    integrality_ok = True
    defect_ok = True
    for n in range(1, 5):
        for g in all_permutations(n):
            for h in all_permutations(n):
                try:
                    epsilon_sign(g, h)
                except AssertionError:
                    integrality_ok = False
                for t in joint_orbits(g, h):
                    if graph_defect(g, h, t) < 0:
                        defect_ok = False
    model = default_k3_model()
    assoc2 = associativity_trials(model, 2, 200)
    assoc3 = associativity_trials(model, 3, 200)
    graded2 = sn_invariant_dimension(2, model, graded=True)
    graded3 = sn_invariant_dimension(3, model, graded=True)
    oracle2, oracle3 = goettsche_oracle(2), goettsche_oracle(3)
    match2 = graded2 == oracle2
    match3 = graded3 == oracle3
    total2 = sum(graded2.values())
    ok = (
        integrality_ok
        and defect_ok
        and assoc2.ok
        and assoc3.ok
        and match2
        and match3
        and total2 == 324
    )
    return ok, {
        "integrality_exhaustive_n<=4": integrality_ok,
        "defect_nonnegative_n<=4": defect_ok,
        "associativity_n2": f"{assoc2.trials - assoc2.failures}/{assoc2.trials}",
        "associativity_n3": f"{assoc3.trials - assoc3.failures}/{assoc3.trials}",
        "graded_match_n2": match2,
        "graded_match_n3": match3,
        "total_n2": total2,
    }


# ---------------------------------------------------------------------------
# registry

CRITERIA: list[tuple[int, str, float, Callable[[], tuple[bool, dict]]]] = [
    (1, "hilbert-symbol conformance and reciprocity", 5.0, _criterion_hilbert),
    (2, "twist-equivalence lemma suite", 10.0, _criterion_twist_lemma),
    (3, "non-isometric twist family (primes 3 mod 4)", 2.0, _criterion_family_a),
    (4, "isometric twist family (primes 1 mod 4)", 2.0, _criterion_family_b),
    (5, "quartic-surface constraint system and sequence", 30.0, _criterion_fermat_quartic),
    (6, "integral scale rigidity", 1.0, _criterion_scale),
    (7, "frobenius axiom and small-diagonal suite", 20.0, _criterion_frobenius_axioms),
    (8, "classification-criteria equivalence suite", 30.0, _criterion_rigid_iso_suite),
    (9, "abelian and calabi-yau kernels", 10.0, _criterion_abelian_cy),
    (10, "orbifold product suite", 180.0, _criterion_orbifold),
]


def run_criterion(cid: int) -> CriterionResult:
    for c, name, budget, fn in CRITERIA:
        if c == cid:
            start = time.perf_counter()
            passed, details = fn()
            elapsed = time.perf_counter() - start
            return CriterionResult(c, name, passed, elapsed, budget, details)
    raise DomainError(f"no criterion {cid}")


def run_all() -> list[CriterionResult]:
    return [run_criterion(cid) for cid, *_ in CRITERIA]
