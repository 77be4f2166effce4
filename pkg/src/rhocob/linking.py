"""Linking forms, their mod-2 quadratic refinements, and ρ-maps of surgeries.

Sign conventions: a presentation matrix ``A`` gives ``λ(x, y) = -xᵀA⁻¹y``,
and ρ differences are ``ρ(t_x) - ρ(t_0) = q(x)`` where ``q`` refines
``-λ(x, x)``.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from math import gcd, lcm

from .abelian import (
    Element,
    FiniteAbelianGroup,
    Subgroup,
    _as_subgroup,
    primary_part,
    smith_normal_form,
)
from .errors import EvenOrderUnsupported, NotAUnit, SingularMatrix, ZeroFraming
from .exact import Residue, factorize, is_prime, mod_inverse


@dataclass(frozen=True)
class LinkingForm:
    """Symmetric bilinear ``G × G → Q/Z`` given by its values on the cyclic generators."""

    group: FiniteAbelianGroup
    gram: tuple[tuple[Residue, ...], ...]
    _den: int = field(default=1, init=False, repr=False, compare=False)
    _num: tuple = field(default=(), init=False, repr=False, compare=False)

    def __post_init__(self):
        k = self.group.rank
        gram = tuple(tuple(_residue1(v) for v in row) for row in self.gram)
        if len(gram) != k or any(len(row) != k for row in gram):
            raise ValueError(f"gram must be {k}x{k}")
        orders = self.group.orders
        for i in range(k):
            for j in range(k):
                if gram[i][j] != gram[j][i]:
                    raise ValueError("gram matrix is not symmetric")
                if not (gram[i][j] * gcd(orders[i], orders[j])).is_zero():
                    raise ValueError(f"gram[{i}][{j}] is not killed by gcd of the orders")
        object.__setattr__(self, "gram", gram)
        den = lcm(1, *(v.value.denominator for row in gram for v in row))
        object.__setattr__(self, "_den", den)
        object.__setattr__(self, "_num", tuple(tuple(v.value.numerator * (den // v.value.denominator) for v in row) for row in gram))

    @classmethod
    def trivial(cls) -> LinkingForm:
        return cls(FiniteAbelianGroup.trivial(), ())

    def pair(self, x: Element, y: Element) -> Residue:
        total = 0
        for xi, row in zip(x, self._num):
            if xi:
                total += xi * sum(yj * a for yj, a in zip(y, row))
        return Residue(Fraction(total % self._den, self._den), 1)

    def self_pair(self, x: Element) -> Residue:
        return self.pair(x, x)

    def restrict(self, indices) -> LinkingForm:
        """Form on the summand spanned by the given coordinates."""
        H = FiniteAbelianGroup(tuple(self.group.factors[i] for i in indices))
        return LinkingForm(H, tuple(tuple(self.gram[i][j] for j in indices) for i in indices))

    def primary(self, p: int) -> LinkingForm:
        return self.restrict(primary_part(self.group, p).indices)

    def __str__(self):
        rows = "; ".join(" ".join(str(v) for v in row) for row in self.gram)
        return f"LinkingForm({self.group}: [{rows}])"


def _residue1(v) -> Residue:
    if isinstance(v, Residue):
        if v.modulus != 1:
            raise ValueError("gram entries live in Q/Z")
        return v
    return Residue(v, 1)


def standard_cyclic_form(p: int, n: int, u: int) -> LinkingForm:
    """``λ(x, y) = u·x·y / p^n`` on ``Z/p^n``."""
    if p == 2 or not is_prime(p):
        raise ValueError(f"p must be an odd prime, got {p}")
    if n < 1:
        raise ValueError("n must be positive")
    if u % p == 0:
        raise NotAUnit(f"{u} is not a unit modulo {p}^{n}")
    G = FiniteAbelianGroup(((p, n),))
    return LinkingForm(G, ((Residue(Fraction(u, p**n)),),))


def _sum_order(groups):
    """Stable order of concatenated factors into canonical group order."""
    tagged = []
    for g in groups:
        tagged.extend(g.factors)
    return sorted(range(len(tagged)), key=lambda i: tagged[i])


def sum_coordinates(groups, elements) -> Element:
    """Coordinates in the direct sum of ``groups`` of a tuple of summand elements."""
    flat = [c for x in elements for c in x]
    return tuple(flat[i] for i in _sum_order(groups))


def direct_sum(forms) -> LinkingForm:
    forms = list(forms)
    blocks: list[tuple[tuple[int, int], list]] = []
    size = sum(f.group.rank for f in forms)
    big = [[Residue(0)] * size for _ in range(size)]
    factors = []
    offset = 0
    for f in forms:
        k = f.group.rank
        for i in range(k):
            for j in range(k):
                big[offset + i][offset + j] = f.gram[i][j]
        factors.extend(f.group.factors)
        offset += k
    perm = _sum_order([f.group for f in forms])
    G = FiniteAbelianGroup(tuple(factors[i] for i in perm))
    return LinkingForm(G, tuple(tuple(big[i][j] for j in perm) for i in perm))


def diagonal_form(terms) -> LinkingForm:
    """Direct sum of ``standard_cyclic_form(p, n, u)`` for ``(p, n, u)`` in ``terms``."""
    return direct_sum(standard_cyclic_form(p, n, u) for p, n, u in terms)


def negate(form: LinkingForm) -> LinkingForm:
    return LinkingForm(form.group, tuple(tuple(-v for v in row) for row in form.gram))


def is_nondegenerate(form: LinkingForm) -> bool:
    """Injectivity of ``x ↦ λ(x, ·)``, tested on the elements of prime order."""
    G = form.group
    basis = [tuple(int(i == j) for j in range(G.rank)) for i in range(G.rank)]
    for p in G.primes:
        part = primary_part(G, p)
        socle = FiniteAbelianGroup(tuple((p, 1) for _ in part.indices))
        steps = [d // p for d in part.group.orders]
        for coords in socle.elements():
            if not any(coords):
                continue
            x = part.include(tuple(c * s for c, s in zip(coords, steps)))
            if all(form.pair(x, e).is_zero() for e in basis):
                return False
    return True


@dataclass(frozen=True)
class QuadraticRefinement:
    """``q: G → Q/2Z`` with ``q ≡ -λ(x, x) (mod 1)`` and polarization ``-2λ``.

    Without an explicit ``table`` the value is ``-(N + 1)·ℓ`` where ``N`` is
    the exponent of the (odd-order) group and ``ℓ ∈ [0, 1)`` is the lift of
    ``λ(x, x)``; shifting the lift by 1 changes this by the even integer
    ``N + 1``.
    """

    form: LinkingForm
    table: dict | None = field(default=None, compare=False)

    @property
    def group(self) -> FiniteAbelianGroup:
        return self.form.group

    def __call__(self, x) -> Residue:
        x = self.group.element(x)
        if self.table is not None:
            return self.table[x]
        lift = self.form.self_pair(x).value
        return Residue(-(self.group.exponent + 1) * lift, 2)

    def values(self) -> dict:
        return {x: self(x) for x in self.group.elements()}

    def __eq__(self, other):
        if not isinstance(other, QuadraticRefinement):
            return NotImplemented
        return self.group == other.group and self.values() == other.values()

    def __neg__(self) -> QuadraticRefinement:
        return QuadraticRefinement(negate(self.form), {x: -v for x, v in self.values().items()})


def quadratic_refinement(form: LinkingForm) -> QuadraticRefinement:
    if form.group.order % 2 == 0:
        raise EvenOrderUnsupported("quadratic refinements are only provided for odd-order groups")
    return QuadraticRefinement(form)


def polarize(q: QuadraticRefinement) -> LinkingForm:
    """``λ(x, y) = -(q(x + y) - q(x) - q(y)) / 2 (mod 1)`` on the generators."""
    G = q.group
    basis = [tuple(int(i == j) for j in range(G.rank)) for i in range(G.rank)]
    gram = []
    for ei in basis:
        row = []
        for ej in basis:
            diff = q(G.add(ei, ej)) - q(ei) - q(ej)
            row.append(Residue(-diff.value / 2, 1))
        gram.append(tuple(row))
    return LinkingForm(G, tuple(gram))


def refinement_vanishes_on(q: QuadraticRefinement, M) -> bool:
    M = _as_subgroup(q.group, M)
    return all(q(x).is_zero() for x in M.elements())


def ladder_values(q: QuadraticRefinement, p: int, n: int) -> list[Residue]:
    """``q(a·p^((n-1)/2))`` for ``0 ≤ a ≤ (n+1)/2`` on a cyclic ``Z/p^n``."""
    step = p ** ((n - 1) // 2)
    return [q((a * step,)) for a in range((n + 1) // 2 + 1)]


# -- surgeries and presentations ------------------------------------------


def surgery_rho_value(n: int, x: int) -> Residue:
    """Closed form ``((2x + n)²/n - sign(n)) / 4 (mod 2)`` for ``S³_n(K)``."""
    if n == 0:
        raise ZeroFraming("0-surgery is not a rational homology sphere")
    sign = 1 if n > 0 else -1
    return Residue((Fraction((2 * x + n) ** 2, n) - sign) / 4, 2)


@dataclass(frozen=True)
class RhoMap:
    """ρ on spin^c labels ``t_x``; ``refinement`` is ``None`` for even-order groups.

    Labels are group elements, or integers ``x`` read as ``x·generator`` when
    the group is cyclic (as for surgeries, where ``Z/|n|`` is split into its
    primary coordinates).
    """

    group: FiniteAbelianGroup
    rho0: Residue
    refinement: QuadraticRefinement | None
    table: dict = field(default_factory=dict, compare=False)
    generator: Element | None = None

    def label(self, x) -> Element:
        if isinstance(x, int):
            if self.generator is None:
                raise ValueError("integer labels need a cyclic group with a chosen generator")
            return self.group.scale(x, self.generator)
        return self.group.element(x)

    def __call__(self, x) -> Residue:
        x = self.label(x)
        if x in self.table:
            return self.table[x]
        if self.refinement is None:
            raise KeyError(x)
        return self.rho0 + self.refinement(x)


def cyclic_generator(G: FiniteAbelianGroup) -> Element:
    """The element of a cyclic ``G = ⊕ Z/p_i^{e_i}`` (distinct p_i) that is 1 under CRT."""
    if len(G.primes) != G.rank:
        raise ValueError(f"{G} is not cyclic")
    N = G.order
    return tuple(mod_inverse(N // d, d) for d in G.orders)


def rho_surgery(n: int) -> RhoMap:
    """ρ-map of ``n``-surgery on a knot, labelled so that ``c_1`` pairs to ``2x + n``."""
    if n == 0:
        raise ZeroFraming("0-surgery is not a rational homology sphere")
    G, form = linking_from_presentation([[n]])
    gen = cyclic_generator(G)
    rho0 = surgery_rho_value(n, 0)
    if abs(n) % 2:
        return RhoMap(G, rho0, quadratic_refinement(form), generator=gen)
    table = {G.scale(x, gen): surgery_rho_value(n, x) for x in range(abs(n))}
    return RhoMap(G, rho0, None, table, gen)


def linking_from_presentation(A):
    """Group ``coker A`` and its form ``-x̃ᵀA⁻¹ỹ`` on canonical primary generators.

    With ``U A V = D`` from the Smith form, ``x ↦ Ux`` identifies ``coker A``
    with ``⊕ Z/d_i``; the lift of the i-th cyclic generator is the i-th column
    of ``U⁻¹``, and ``A⁻¹ = V D⁻¹ U``.  Each ``Z/d_i`` is split into primary
    pieces generated by ``(d_i / p^e)`` times that lift.
    """
    A = [[int(a) for a in row] for row in A]
    k = len(A)
    if any(len(row) != k for row in A):
        raise ValueError("presentation matrix must be square")
    if any(A[i][j] != A[j][i] for i in range(k) for j in range(k)):
        raise ValueError("presentation matrix must be symmetric")
    D, U, V = smith_normal_form(A)
    diag = [D[i][i] for i in range(k)]
    if any(d == 0 for d in diag):
        raise SingularMatrix("presentation matrix is singular")
    Uinv = _unimodular_inverse(U)
    Ainv = [
        [sum(Fraction(V[i][t] * U[t][j], diag[t]) for t in range(k)) for j in range(k)]
        for i in range(k)
    ]
    pieces = []
    for i, d in enumerate(diag):
        d = abs(d)
        if d == 1:
            continue
        lift = [Uinv[r][i] for r in range(k)]
        for p, e in sorted(factorize(d).items()):
            mult = d // p**e
            pieces.append(((p, e), [mult * c for c in lift]))
    pieces.sort(key=lambda piece: piece[0])
    G = FiniteAbelianGroup(tuple(f for f, _ in pieces))
    gram = []
    for _, x in pieces:
        row = []
        for _, y in pieces:
            val = sum(x[i] * Ainv[i][j] * y[j] for i in range(k) for j in range(k))
            row.append(Residue(-val, 1))
        gram.append(tuple(row))
    return G, LinkingForm(G, tuple(gram))


def _unimodular_inverse(U):
    k = len(U)
    aug = [[Fraction(x) for x in row] + [Fraction(int(i == j)) for j in range(k)] for i, row in enumerate(U)]
    for c in range(k):
        piv = next(r for r in range(c, k) if aug[r][c] != 0)
        aug[c], aug[piv] = aug[piv], aug[c]
        inv = 1 / aug[c][c]
        aug[c] = [x * inv for x in aug[c]]
        for r in range(k):
            if r != c and aug[r][c]:
                f = aug[r][c]
                aug[r] = [a - f * b for a, b in zip(aug[r], aug[c])]
    out = [[row[k + j] for j in range(k)] for row in aug]
    assert all(x.denominator == 1 for row in out for x in row)
    return [[int(x) for x in row] for row in out]
