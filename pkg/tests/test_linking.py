from fractions import Fraction
from math import gcd

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from oracles import presentation_pairing, presentation_self_pairings

from rhocob.abelian import FiniteAbelianGroup, Subgroup, from_cyclic_orders
from rhocob.errors import EvenOrderUnsupported, NotAUnit, NotASubgroup, SingularMatrix, ZeroFraming
from rhocob.exact import Residue
from rhocob.linking import (
    LinkingForm,
    diagonal_form,
    direct_sum,
    is_nondegenerate,
    ladder_values,
    linking_from_presentation,
    negate,
    polarize,
    quadratic_refinement,
    refinement_vanishes_on,
    rho_surgery,
    standard_cyclic_form,
    surgery_rho_value,
)

F = Fraction


def R1(q):
    return Residue(F(q), 1)


def R2(q):
    return Residue(F(q), 2)


def test_standard_cyclic_form_values():
    lam = standard_cyclic_form(3, 1, 1)
    assert lam.pair((1,), (1,)) == R1(F(1, 3))
    assert lam.pair((1,), (2,)) == R1(F(2, 3))
    assert lam.pair((2,), (2,)) == R1(F(1, 3))
    assert standard_cyclic_form(3, 1, 2).pair((1,), (1,)) == R1(F(2, 3))
    assert standard_cyclic_form(3, 3, 1).pair((9,), (9,)) == R1(0)
    with pytest.raises(NotAUnit):
        standard_cyclic_form(3, 2, 6)


def test_direct_sum_blocks():
    assert direct_sum([]) == LinkingForm.trivial()
    l11 = diagonal_form([(3, 1, 1), (3, 1, 1)])
    assert l11.pair((1, 0), (0, 1)) == R1(0)
    l12 = diagonal_form([(3, 1, 1), (3, 1, 2)])
    assert l12.pair((1, 1), (1, 1)) == R1(0)


def test_direct_sum_reorders_mixed_primes_canonically():
    lam = direct_sum([standard_cyclic_form(5, 1, 2), standard_cyclic_form(3, 1, 1)])
    assert lam.group == from_cyclic_orders([15])
    assert lam.pair((1, 0), (1, 0)) == R1(F(1, 3))
    assert lam.pair((0, 1), (0, 1)) == R1(F(2, 5))


def test_negate():
    assert negate(standard_cyclic_form(3, 1, 1)) == standard_cyclic_form(3, 1, 2)
    assert negate(LinkingForm.trivial()) == LinkingForm.trivial()
    l12 = diagonal_form([(3, 1, 1), (3, 1, 2)])
    assert negate(negate(l12)) == l12


def test_nondegeneracy():
    assert is_nondegenerate(standard_cyclic_form(7, 3, 5))
    degenerate = LinkingForm(from_cyclic_orders([27]), ((R1(F(3, 27)),),))
    assert not is_nondegenerate(degenerate)
    assert is_nondegenerate(LinkingForm.trivial())


def test_refinement_examples():
    q = quadratic_refinement(standard_cyclic_form(3, 1, 1))
    assert (q((0,)), q((1,)), q((2,))) == (R2(0), R2(F(2, 3)), R2(F(2, 3)))
    q27 = quadratic_refinement(standard_cyclic_form(3, 3, 1))
    assert q27((9,)) == R2(0) and q27((3,)) == R2(F(2, 3))
    assert quadratic_refinement(standard_cyclic_form(3, 1, 2))((1,)) == R2(F(4, 3))
    with pytest.raises(EvenOrderUnsupported):
        quadratic_refinement(LinkingForm(from_cyclic_orders([2]), ((R1(F(1, 2)),),)))


def test_polarize_examples():
    lam = standard_cyclic_form(3, 1, 1)
    assert polarize(quadratic_refinement(lam)).pair((1,), (1,)) == R1(F(1, 3))
    assert polarize(quadratic_refinement(LinkingForm.trivial())) == LinkingForm.trivial()
    l12 = diagonal_form([(3, 1, 1), (3, 1, 2)])
    assert polarize(quadratic_refinement(l12)) == l12


def test_rho_surgery_examples():
    rho5 = rho_surgery(5)
    assert rho5.rho0 == R2(1)
    assert rho5((1,)) == R2(F(1, 5))
    rho1 = rho_surgery(1)
    assert rho1.group.is_trivial() and rho1.rho0 == R2(0)
    assert rho_surgery(-3).rho0 == R2(F(3, 2))
    assert rho_surgery(-3).rho0 == -rho_surgery(3).rho0
    with pytest.raises(ZeroFraming):
        rho_surgery(0)


def test_rho_surgery_even_framing_uses_closed_form():
    rho = rho_surgery(4)
    assert rho.refinement is None
    for x in range(4):
        assert rho(x) == surgery_rho_value(4, x)
        assert rho(x) == rho(-x - 4)
    rho12 = rho_surgery(-12)
    assert rho12.group == from_cyclic_orders([12])
    assert all(rho12(x) == surgery_rho_value(-12, x) for x in range(12))


def test_presentation_examples():
    G, lam = linking_from_presentation([[2, 1], [1, 2]])
    assert G == from_cyclic_orders([3])
    assert lam.pair((1,), (1,)) == R1(F(1, 3))
    for n in (3, 5, 7, 9, -5):
        G, lam = linking_from_presentation([[n]])
        assert G == from_cyclic_orders([abs(n)])
        for x in range(abs(n)):
            for y in range(abs(n)):
                assert lam.pair(G.element((x,)), G.element((y,))) == R1(F(-x * y, n))
    G, lam = linking_from_presentation([[1, 0], [0, 1]])
    assert G.is_trivial()
    with pytest.raises(SingularMatrix):
        linking_from_presentation([[1, 1], [1, 1]])


def test_presentation_against_direct_inverse():
    # coker [[2,1],[1,2]] is generated by e1; every lift gives the same value.
    for x in ([1, 0], [0, 1], [2, 2], [1, -1]):
        for y in ([1, 0], [0, 1]):
            assert presentation_pairing([[2, 1], [1, 2]], x, y) in (F(1, 3), F(2, 3), F(0))
    assert presentation_pairing([[2, 1], [1, 2]], [1, 0], [1, 0]) == F(1, 3)


symmetric_matrices = st.integers(1, 3).flatmap(
    lambda k: st.lists(st.integers(-6, 6), min_size=k * k, max_size=k * k).map(
        lambda xs: [[xs[min(i, j) * k + max(i, j)] for j in range(k)] for i in range(k)]
    )
)


@given(symmetric_matrices)
@settings(max_examples=80, deadline=None)
def test_presentation_form_matches_direct_inverse(A):
    import sympy

    det = sympy.Matrix(A).det()
    if det == 0:
        with pytest.raises(SingularMatrix):
            linking_from_presentation(A)
        return
    G, lam = linking_from_presentation(A)
    assert G.order == abs(det)
    assert is_nondegenerate(lam)
    ours = sorted(lam.self_pair(x).value for x in G.elements())
    assert ours == presentation_self_pairings(A)


def _small_odd_forms():
    for terms in (
        [(3, 1, 1)],
        [(3, 1, 2)],
        [(3, 2, 1), (3, 1, 2)],
        [(3, 3, 5), (3, 1, 1), (3, 2, 4)],
        [(3, 1, 1), (3, 1, 1), (3, 1, 2), (3, 1, 1), (3, 1, 2), (3, 1, 1)],
        [(5, 2, 3), (5, 1, 2)],
        [(7, 1, 3), (3, 2, 2)],
        [(3, 6, 2)],
    ):
        yield diagonal_form(terms)
    _, lam = linking_from_presentation([[3, 1, 0], [1, 5, 1], [0, 1, 7]])
    yield lam


@pytest.mark.parametrize("lam", list(_small_odd_forms()), ids=str)
def test_refinement_invariants_exhaustive(lam):
    assert lam.group.order <= 3**6
    q = quadratic_refinement(lam)
    G = lam.group
    elems = list(G.elements())
    assert q(G.zero()) == R2(0)
    for x in elems:
        assert Residue(q(x).value, 1) == -lam.self_pair(x)
        assert q(G.neg(x)) == q(x)
    # Polarization over all pairs, in integers scaled by the exponent N.
    N = G.exponent
    qn = {x: int(v.value * N) for x, v in q.values().items()}
    gram = [[int(v.value * N) for v in row] for row in lam.gram]
    for x in elems:
        xg = [sum(xi * row[j] for xi, row in zip(x, gram)) for j in range(G.rank)]
        for y in elems:
            pn = sum(a * b for a, b in zip(xg, y))
            assert (qn[G.add(x, y)] - qn[x] - qn[y] + 2 * pn) % (2 * N) == 0
    assert polarize(q) == lam
    assert quadratic_refinement(negate(lam)) == -q


def test_refinement_well_defined_under_lift_shift():
    # q uses the lift of λ(x,x) in [0,1); any other lift differs by an integer s,
    # which moves -(N+1)·lift by the even integer (N+1)·s.
    for terms in ([(3, 3, 2)], [(7, 1, 3), (3, 2, 2)]):
        lam = diagonal_form(terms)
        N = lam.group.exponent
        q = quadratic_refinement(lam)
        for x in lam.group.elements():
            a = lam.self_pair(x).value
            for s in range(-3, 4):
                assert Residue(-(N + 1) * (a + s), 2) == q(x)


@pytest.mark.parametrize("n", [k for k in range(-17, 18) if k % 2 and abs(k) >= 3])
def test_rho_surgery_differences_match_refinement(n):
    rho = rho_surgery(n)
    _, lam = linking_from_presentation([[n]])
    q = quadratic_refinement(lam)
    g = rho.generator
    assert lam.self_pair(g) == Residue(F(-1, n), 1)
    for x in range(abs(n)):
        assert surgery_rho_value(n, x) - rho.rho0 == q(rho.label(x))
        assert rho(x) == surgery_rho_value(n, x)
        assert rho(x) == rho(-x)


def _units(p, n):
    N = p**n
    return [u for u in range(1, N) if u % p]


def lemma_holds(p, n, u) -> bool:
    lam = standard_cyclic_form(p, n, u)
    q = quadratic_refinement(lam)
    N = p**n
    G = lam.group
    small = Subgroup.generated_by(G, [(p ** ((n + 1) // 2) % N,)])
    large = Subgroup.generated_by(G, [(p ** ((n - 1) // 2),)])
    assert small.order == p ** ((n - 1) // 2) and large.order == p ** ((n + 1) // 2)
    return refinement_vanishes_on(q, small) and not refinement_vanishes_on(q, large)


@pytest.mark.parametrize("p, n", [(3, 1), (3, 3), (3, 5), (7, 1), (7, 3), (11, 1), (11, 3), (19, 1), (19, 3)])
def test_linking_lemma_all_units(p, n):
    assert all(lemma_holds(p, n, u) for u in _units(p, n))


@pytest.mark.parametrize("p, n", [(7, 5), (11, 5), (19, 5)])
def test_linking_lemma_every_unit_class_mod_p(p, n, rng):
    # On these subgroups q_u depends on u only through u mod p (x² is divisible by p^{n-1}),
    # so one unit per nonzero residue class, with a random lift, covers every unit.
    N = p**n
    for r in range(1, p):
        u = r + p * rng.randrange(N // p)
        assert lemma_holds(p, n, u)


@given(st.sampled_from([(7, 5), (11, 5), (19, 5)]), st.integers(1, 19**5))
@settings(max_examples=25, deadline=None)
def test_linking_lemma_sampled_units(pn, u):
    p, n = pn
    if u % p == 0:
        u += 1
    assert lemma_holds(p, n, u % p**n)


def test_refinement_vanishes_on_examples():
    q12 = quadratic_refinement(diagonal_form([(3, 1, 1), (3, 1, 2)]))
    assert refinement_vanishes_on(q12, Subgroup.generated_by(q12.group, [(1, 1)]))
    q27 = quadratic_refinement(standard_cyclic_form(3, 3, 1))
    assert refinement_vanishes_on(q27, Subgroup.generated_by(q27.group, [(9,)]))
    assert not refinement_vanishes_on(q27, Subgroup.generated_by(q27.group, [(3,)]))
    with pytest.raises(NotASubgroup):
        refinement_vanishes_on(q27, Subgroup.whole(FiniteAbelianGroup.homogeneous(3, 1, 1)))


@pytest.mark.parametrize("p", [3, 7, 11, 19])
@pytest.mark.parametrize("n", [1, 3, 5])
def test_ladder_is_not_constant(p, n):
    N = p**n
    units = range(1, N) if N < 2000 else range(1, p)
    for u in units:
        if gcd(u, p) != 1:
            continue
        values = ladder_values(quadratic_refinement(standard_cyclic_form(p, n, u)), p, n)
        assert len(values) == (n + 1) // 2 + 1
        assert len(set(values)) > 1
