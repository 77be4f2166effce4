import itertools
from fractions import Fraction

import pytest

from rhocob.abelian import from_cyclic_orders
from rhocob.errors import EvenFraming, MissingData
from rhocob.exact import Residue
from rhocob.linking import cyclic_generator, negate, quadratic_refinement
from rhocob.metab import enumerate_metabolizers
from rhocob.obstruct import (
    INCONCLUSIVE,
    INFINITE_ORDER,
    NONZERO,
    OBSTRUCTED_SQUARE,
    KnotRecord,
    ManifoldDescriptor,
    branched_cover,
    check_independence,
    check_knot_family,
    check_knot_sum,
    check_square_obstruction,
    check_surgery_infinite_order,
    check_theorem_main,
    connected_sum,
    multiple,
    reverse,
    square_order_test,
    validate_d_axioms,
)

F = Fraction


def Y(name, *orders):
    return ManifoldDescriptor.abstract(name, list(orders))


def lens_like(n):
    """Surgery descriptor with the d-table ((c)²/n - 1)/4, c the smallest |c| ≡ 2x + n (mod 2n)."""
    base = ManifoldDescriptor.surgery(n)
    gen = cyclic_generator(base.h1)
    table = {}
    for x in range(n):
        c = (2 * x + n) % (2 * n)
        if c > n:
            c -= 2 * n
        table[base.h1.scale(x, gen)] = (F(c * c, n) - 1) / 4
    return ManifoldDescriptor(base.name, base.h1, base.linking, base.rho0, table, base.provenance)


def test_square_order_test():
    assert square_order_test(from_cyclic_orders([9]))
    assert not square_order_test(from_cyclic_orders([45]))
    assert square_order_test(from_cyclic_orders([]))
    assert check_square_obstruction(Y("Y", 45)).conclusion == OBSTRUCTED_SQUARE
    assert check_square_obstruction(Y("Y", 9)).conclusion == INCONCLUSIVE


def test_surgery_examples():
    v = check_surgery_infinite_order(5)
    assert v.conclusion == INFINITE_ORDER and "rho(t0) = 1 mod 2" in v.reasons
    assert check_surgery_infinite_order(9).conclusion == INCONCLUSIVE
    assert check_surgery_infinite_order(-7).conclusion == INFINITE_ORDER
    assert check_surgery_infinite_order(1).conclusion == INCONCLUSIVE
    with pytest.raises(EvenFraming):
        check_surgery_infinite_order(4)


@pytest.mark.parametrize("n", [k for k in range(-99, 100) if k % 2 and abs(k) >= 3])
def test_surgery_verdict_exhaustive(n):
    v = check_surgery_infinite_order(n)
    assert (v.conclusion == INFINITE_ORDER) == (abs(n) % 8 != 1)
    assert v.conclusion in (INFINITE_ORDER, INCONCLUSIVE)


def test_theorem_main_examples():
    assert check_theorem_main(Y("Y", 3), Y("N", 49), 2, 3, 1).conclusion == NONZERO
    assert check_theorem_main(Y("Y", 27), ManifoldDescriptor.sphere(), -4, 3, 3).conclusion == NONZERO
    v = check_theorem_main(Y("Y", 3), Y("N", 15), 2, 3, 1)
    assert v.conclusion == INCONCLUSIVE and "H1(N)" in v.failed_clause


@pytest.mark.parametrize(
    "args, clause",
    [
        ((Y("Y", 3), Y("N", 49), 0, 3, 1), "m != 0"),
        ((Y("Y", 6), Y("N", 49), 2, 3, 1), "|H1(Y)| odd"),
        ((Y("Y", 3), Y("N", 14), 2, 3, 1), "|H1(N)| odd"),
        ((Y("Y", 9), Y("N", 1), 2, 9, 1), "p = 9 prime"),
        ((Y("Y", 5), Y("N", 1), 2, 5, 1), "p = 5 is 3 mod 4"),
        ((Y("Y", 9), Y("N", 1), 2, 3, 2), "n = 2 odd and positive"),
        ((Y("Y", 3, 3), Y("N", 1), 2, 3, 1), "3-primary part of H1(Y) is Z/3^1"),
        ((Y("Y", 27), Y("N", 1), 2, 3, 1), "3-primary part of H1(Y) is Z/3^1"),
        ((Y("Y", 3), Y("N", 3), 2, 3, 1), "3-primary part of H1(N) is trivial"),
    ],
)
def test_theorem_main_never_fires_on_a_failed_clause(args, clause):
    v = check_theorem_main(*args)
    assert v.conclusion == INCONCLUSIVE
    assert v.failed_clause == clause


def test_independence_examples():
    cert = check_independence([Y("A", 3), Y("B", 7), Y("C", 11)])
    assert cert.independent
    assert [(p, n) for _, p, n in cert.assignment] == [(3, 1), (7, 1), (11, 1)]
    cert = check_independence([Y("A", 3), Y("B", 21)])
    assert not cert.independent and cert.verdict.failed_clause == "disjointness"
    assert "3-primary part of H1(B) is nonzero" in cert.verdict.reasons[0]
    cert = check_independence([Y("A", 9)])
    assert cert.verdict.failed_clause == "exponent_parity"
    assert check_independence([Y("A", 6)]).verdict.failed_clause == "even_order"
    assert check_independence([Y("A", 5)]).verdict.failed_clause == "prime_3_mod_4"


def test_independence_picks_smallest_admissible_prime():
    cert = check_independence([Y("A", 3 * 7), Y("B", 3 * 11), Y("C", 19 * 5)])
    assert cert.independent
    assert cert.assignment == [("A", 7, 1), ("B", 11, 1), ("C", 19, 1)]
    cert = check_independence([Y("A", 7 * 25), Y("B", 27)])
    assert cert.assignment == [("A", 7, 1), ("B", 3, 3)]
    cert = check_independence([Y("A", 9 * 7), Y("B", 27)])
    assert not cert.independent and cert.verdict.failed_clause == "disjointness"


FAMILIES = [
    [Y("A", 3), Y("B", 7), Y("C", 11)],
    [Y("A", 21), Y("B", 33), Y("C", 19 * 5)],
    [Y("A", 63), Y("B", 27), Y("C", 11 * 13)],
    [Y("A", 3), Y("B", 21)],
    [Y("A", 9), Y("B", 7)],
]


@pytest.mark.parametrize("family", FAMILIES, ids=lambda f: "-".join(str(Y.h1.order) for Y in f))
def test_independence_is_permutation_invariant(family):
    reference = check_independence(family)
    for perm in itertools.permutations(range(len(family))):
        cert = check_independence([family[i] for i in perm])
        assert cert.independent == reference.independent
        if reference.independent:
            assert sorted(cert.assignment) == sorted(reference.assignment)


def test_knot_family():
    cert = check_knot_family([KnotRecord(f"K{d}", d, cyclic=True) for d in (3, 7, 11)])
    assert cert.independent
    cert = check_knot_family([KnotRecord("K5", 5)])
    assert not cert.independent and cert.verdict.failed_clause == "prime_3_mod_4"
    with pytest.raises(MissingData):
        check_knot_family([KnotRecord("K")])
    with pytest.raises(MissingData):
        check_knot_family([KnotRecord("K27", 27)])


def test_branched_cover_sources():
    assert branched_cover(KnotRecord("K", 15)).h1 == from_cyclic_orders([15])
    assert branched_cover(KnotRecord("K", 27, cyclic=True)).h1 == from_cyclic_orders([27])
    cover = branched_cover(KnotRecord("K", 3, goeritz=((2, 1), (1, 2))))
    assert cover.h1 == from_cyclic_orders([3]) and cover.linking is not None
    with pytest.raises(MissingData):
        branched_cover(KnotRecord("K", 5, goeritz=((3,),)))


def test_knot_sum_path():
    v = check_knot_sum(KnotRecord("K", 3), KnotRecord("J", 49, cyclic=True), 2)
    assert v.conclusion == NONZERO
    v = check_knot_sum(KnotRecord("K", 3), KnotRecord("J", 15), 2)
    assert v.conclusion == INCONCLUSIVE


def test_reverse_and_connected_sum():
    S = ManifoldDescriptor.surgery(3)
    assert reverse(reverse(S)) == S
    assert reverse(S).linking == negate(S.linking)
    assert reverse(S).rho0 == -S.rho0
    both = connected_sum([S, reverse(S)])
    assert both.h1 == from_cyclic_orders([3, 3])
    assert len(enumerate_metabolizers(both.linking)) == 2
    assert both.rho0 == Residue(0, 2)
    with_sphere = connected_sum([S, ManifoldDescriptor.sphere()])
    assert (with_sphere.h1, with_sphere.linking, with_sphere.rho0) == (S.h1, S.linking, S.rho0)
    assert multiple(S, -2).linking == connected_sum([reverse(S), reverse(S)]).linking
    assert multiple(S, 0).h1.is_trivial()


def test_d_axioms_examples():
    assert validate_d_axioms(ManifoldDescriptor.sphere()).valid
    L = lens_like(5)
    assert validate_d_axioms(L).valid
    broken = dict(L.d_table)
    broken[(1,)] += 2
    report = validate_d_axioms(ManifoldDescriptor(L.name, L.h1, L.linking, L.rho0, broken, L.provenance))
    assert any(v.startswith("symmetry") for v in report.violations)
    shifted = {x: v + (F(1) if x == (1,) or x == (4,) else 0) for x, v in L.d_table.items()}
    report = validate_d_axioms(ManifoldDescriptor(L.name, L.h1, L.linking, L.rho0, shifted, L.provenance))
    assert any(v.startswith("mod 2") for v in report.violations)
    assert not any(v.startswith("symmetry") for v in report.violations)


def test_d_axioms_additivity():
    L3, L7 = lens_like(3), lens_like(7)
    total = connected_sum([L3, L7, reverse(L3)])
    assert validate_d_axioms(total).valid
    tampered = dict(total.d_table)
    key = next(iter(sorted(tampered)))
    tampered[key] += 2
    bad = ManifoldDescriptor(total.name, total.h1, total.linking, total.rho0, tampered, total.provenance)
    assert any(v.startswith("additivity") for v in validate_d_axioms(bad).violations)


@pytest.mark.parametrize("n", [3, 5, 7, 9, 11, 13, 15])
def test_d_table_mod_two_matches_refinement(n):
    L = lens_like(n)
    q = quadratic_refinement(L.linking)
    zero = L.h1.zero()
    for x, d in L.d_table.items():
        assert Residue(d - L.d_table[zero], 2) == q(x)
    assert validate_d_axioms(L).valid
