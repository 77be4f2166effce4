"""Finite abelian groups in primary decomposition, and their subgroups.

Elements are plain tuples of integers, one coordinate per cyclic factor,
each reduced into ``[0, order)``.

A subgroup ``M`` of ``G = Z/d_1 + ... + Z/d_k`` is stored canonically as the
Hermite normal form of its preimage lattice ``L`` in ``Z^k`` (which always
contains ``d_1 Z + ... + d_k Z``).  The form is upper triangular with positive
diagonal entries ``h_j`` dividing ``d_j`` and entries above the diagonal
reduced into ``[0, h_j)``, so two subgroups are equal exactly when their forms
are equal.  ``|G/M|`` is the product of the diagonal.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from math import gcd, lcm, prod

from sympy import ZZ
from sympy.polys.matrices import DM
from sympy.polys.matrices.normalforms import smith_normal_decomp

from .errors import NotASubgroup, NotHomogeneousAmbient, OrderNotDividing
from .exact import factorize, is_prime, mod_inverse, padic_valuation

Element = tuple


@dataclass(frozen=True)
class FiniteAbelianGroup:
    """``⊕ Z/p^e`` with factors sorted by prime, then exponent."""

    factors: tuple[tuple[int, int], ...] = ()

    def __post_init__(self):
        facs = tuple(sorted((int(p), int(e)) for p, e in self.factors))
        for p, e in facs:
            if e < 1 or not is_prime(p):
                raise ValueError(f"bad cyclic factor Z/{p}^{e}")
        object.__setattr__(self, "factors", facs)

    @classmethod
    def trivial(cls) -> FiniteAbelianGroup:
        return cls(())

    @classmethod
    def homogeneous(cls, p: int, n: int, k: int) -> FiniteAbelianGroup:
        return cls(((p, n),) * k)

    @property
    def orders(self) -> tuple[int, ...]:
        return tuple(p**e for p, e in self.factors)

    @property
    def rank(self) -> int:
        return len(self.factors)

    @property
    def order(self) -> int:
        return prod(self.orders)

    @property
    def exponent(self) -> int:
        best: dict[int, int] = {}
        for p, e in self.factors:
            best[p] = max(best.get(p, 0), e)
        return prod(p**e for p, e in best.items())

    @property
    def primes(self) -> tuple[int, ...]:
        return tuple(sorted({p for p, _ in self.factors}))

    def is_trivial(self) -> bool:
        return not self.factors

    def is_homogeneous(self) -> bool:
        return len(set(self.factors)) <= 1

    def triples(self) -> list[list[int]]:
        """Serialized form: ``[prime, exponent, multiplicity]`` triples."""
        out: list[list[int]] = []
        for (p, e), grp in itertools.groupby(self.factors):
            out.append([p, e, len(list(grp))])
        return out

    @classmethod
    def from_triples(cls, triples) -> FiniteAbelianGroup:
        return cls(tuple((p, e) for p, e, mult in triples for _ in range(mult)))

    # -- elements --------------------------------------------------------

    def element(self, coords) -> Element:
        coords = tuple(int(c) for c in coords)
        if len(coords) != self.rank:
            raise ValueError(f"expected {self.rank} coordinates, got {len(coords)}")
        return tuple(c % d for c, d in zip(coords, self.orders))

    def zero(self) -> Element:
        return (0,) * self.rank

    def add(self, x: Element, y: Element) -> Element:
        return tuple((a + b) % d for a, b, d in zip(x, y, self.orders))

    def neg(self, x: Element) -> Element:
        return tuple(-a % d for a, d in zip(x, self.orders))

    def scale(self, k: int, x: Element) -> Element:
        return tuple(k * a % d for a, d in zip(x, self.orders))

    def element_order(self, x: Element) -> int:
        return lcm(1, *(d // gcd(a, d) for a, d in zip(x, self.orders)))

    def elements(self):
        return itertools.product(*(range(d) for d in self.orders))

    def __str__(self):
        if not self.factors:
            return "0"
        return " + ".join(f"Z/{p**e}" for p, e in self.factors)


def from_cyclic_orders(orders) -> FiniteAbelianGroup:
    factors = []
    for d in orders:
        d = int(d)
        if d < 1:
            raise ValueError(f"cyclic orders must be positive, got {d}")
        if d > 1:
            factors.extend(factorize(d).items())
    return FiniteAbelianGroup(tuple(factors))


@dataclass(frozen=True)
class PrimaryPart:
    """The p-primary summand of an ambient group with its coordinate maps."""

    ambient: FiniteAbelianGroup
    p: int
    group: FiniteAbelianGroup
    indices: tuple[int, ...]

    def project(self, x: Element) -> Element:
        return tuple(x[i] for i in self.indices)

    def include(self, y: Element) -> Element:
        out = [0] * self.ambient.rank
        for i, c in zip(self.indices, y):
            out[i] = c
        return tuple(out)


def primary_part(G: FiniteAbelianGroup, p: int) -> PrimaryPart:
    idx = tuple(i for i, (q, _) in enumerate(G.factors) if q == p)
    H = FiniteAbelianGroup(tuple(G.factors[i] for i in idx))
    return PrimaryPart(G, p, H, idx)


def is_isomorphic(G, H) -> bool:
    if not isinstance(G, FiniteAbelianGroup):
        G = from_cyclic_orders(G)
    if not isinstance(H, FiniteAbelianGroup):
        H = from_cyclic_orders(H)
    return G.factors == H.factors


# -- integer matrices -----------------------------------------------------


def smith_normal_form(A):
    """Return ``(D, U, V)`` with ``U @ A @ V == D`` and ``D`` in Smith form.

    Transforms are unimodular integer matrices; everything is returned as
    lists of lists of Python ints.
    """
    A = [[int(a) for a in row] for row in A]
    rows = len(A)
    cols = len(A[0]) if rows else 0
    if rows == 0 or cols == 0:
        return A, [[int(i == j) for j in range(rows)] for i in range(rows)], [
            [int(i == j) for j in range(cols)] for i in range(cols)
        ]
    D, U, V = smith_normal_decomp(DM(A, ZZ))
    return (
        [[int(a) for a in row] for row in D.to_list()],
        [[int(a) for a in row] for row in U.to_list()],
        [[int(a) for a in row] for row in V.to_list()],
    )


def invariant_factors(A) -> list[int]:
    """Nontrivial invariant factors of coker(A) for square nonsingular A, ascending."""
    D, _, _ = smith_normal_form(A)
    return [abs(D[i][i]) for i in range(min(len(D), len(D[0]))) if abs(D[i][i]) > 1]


def _xgcd(a: int, b: int):
    x0, y0, x1, y1 = 1, 0, 0, 1
    while b:
        q, a, b = a // b, b, a % b
        x0, x1 = x1, x0 - q * x1
        y0, y1 = y1, y0 - q * y1
    return a, x0, y0


def lattice_hnf(generators, orders) -> tuple[tuple[int, ...], ...]:
    """Hermite normal form of ``span(generators) + diag(orders) Z^k``."""
    k = len(orders)
    pool = [[c % d for c, d in zip(g, orders)] for g in generators]
    pool += [[orders[i] if j == i else 0 for j in range(k)] for i in range(k)]
    H = []
    for j in range(k):
        pivot = None
        rest = []
        for row in pool:
            if row[j] == 0:
                rest.append(row)
            elif pivot is None:
                pivot = row
            else:
                a, b = pivot[j], row[j]
                g, s, t = _xgcd(a, b)
                new_pivot = [s * x + t * y for x, y in zip(pivot, row)]
                other = [(b // g) * x - (a // g) * y for x, y in zip(pivot, row)]
                pivot = new_pivot
                for c in range(j + 1, k):
                    other[c] %= orders[c]
                rest.append(other)
        if pivot[j] < 0:
            pivot = [-x for x in pivot]
        for c in range(j + 1, k):
            pivot[c] %= orders[c]
        H.append(pivot)
        pool = [row for row in rest if any(row)]
    for j in range(k):
        h = H[j][j]
        for i in range(j):
            q = H[i][j] // h
            if q:
                H[i] = [x - q * y for x, y in zip(H[i], H[j])]
    return tuple(tuple(row) for row in H)


def _reduce_by_rows(x, rows, first_pivot=0):
    """Remainder of an integer vector modulo echelon rows with pivots on the diagonal."""
    x = list(x)
    for j, row in enumerate(rows, start=first_pivot):
        q = x[j] // row[j]
        if q:
            x = [a - q * b for a, b in zip(x, row)]
    return x


# -- subgroups ------------------------------------------------------------


@dataclass(frozen=True, eq=False)
class Subgroup:
    ambient: FiniteAbelianGroup
    hnf: tuple[tuple[int, ...], ...]
    spanning: tuple[Element, ...] = field(default=(), compare=False)

    @classmethod
    def generated_by(cls, ambient: FiniteAbelianGroup, generators) -> Subgroup:
        gens = tuple(ambient.element(g) for g in generators)
        hnf = lattice_hnf(gens, ambient.orders)
        sub = cls(ambient, hnf)
        nonzero = tuple(g for g in gens if any(g))
        object.__setattr__(sub, "spanning", nonzero or sub.generators)
        return sub

    @classmethod
    def whole(cls, ambient: FiniteAbelianGroup) -> Subgroup:
        return cls.generated_by(ambient, [tuple(int(i == j) for j in range(ambient.rank)) for i in range(ambient.rank)])

    @classmethod
    def trivial(cls, ambient: FiniteAbelianGroup) -> Subgroup:
        return cls.generated_by(ambient, [])

    def __eq__(self, other):
        if not isinstance(other, Subgroup):
            return NotImplemented
        return self.ambient == other.ambient and self.hnf == other.hnf

    def __hash__(self):
        return hash((self.ambient, self.hnf))

    @property
    def index(self) -> int:
        return prod(row[j] for j, row in enumerate(self.hnf))

    @property
    def order(self) -> int:
        return self.ambient.order // self.index

    @property
    def generators(self) -> tuple[Element, ...]:
        """Canonical generators: the rows of the normal form, reduced and nonzero."""
        gens = (self.ambient.element(row) for row in self.hnf)
        return tuple(g for g in gens if any(g))

    def __contains__(self, x) -> bool:
        return not any(_reduce_by_rows(self.ambient.element(x), self.hnf))

    def elements(self):
        """Every element exactly once, as ``sum c_j * row_j`` with ``0 <= c_j < d_j / h_j``."""
        G = self.ambient
        ranges = [range(d // row[j]) for j, (row, d) in enumerate(zip(self.hnf, G.orders))]
        for coeffs in itertools.product(*ranges):
            v = [0] * G.rank
            for c, row in zip(coeffs, self.hnf):
                if c:
                    v = [a + c * b for a, b in zip(v, row)]
            yield G.element(v)

    def is_subgroup_of(self, other: Subgroup) -> bool:
        return self.ambient == other.ambient and all(g in other for g in self.generators)

    def invariants(self) -> list[int]:
        """Invariant factors of the subgroup itself (ascending, trivial ones dropped)."""
        # diag(orders) = C @ hnf; M is the cokernel of C.
        orders = self.ambient.orders
        C = []
        for i, d in enumerate(orders):
            target = [d if j == i else 0 for j in range(len(orders))]
            coeffs = []
            for j, row in enumerate(self.hnf):
                q, r = divmod(target[j], row[j])
                assert r == 0
                coeffs.append(q)
                target = [a - q * b for a, b in zip(target, row)]
            C.append(coeffs)
        return invariant_factors(C) if C else []

    def __str__(self):
        gens = ", ".join("(" + ",".join(map(str, g)) + ")" for g in self.generators)
        return f"<{gens}>"


def _as_subgroup(G: FiniteAbelianGroup, M) -> Subgroup:
    if isinstance(M, Subgroup):
        if M.ambient != G:
            raise NotASubgroup(f"subgroup lives in {M.ambient}, not in {G}")
        return M
    try:
        return Subgroup.generated_by(G, M)
    except ValueError as exc:
        raise NotASubgroup(str(exc)) from None


def quotient_invariants(G: FiniteAbelianGroup, M) -> list[int]:
    M = _as_subgroup(G, M)
    return invariant_factors(M.hnf) if M.hnf else []


def _enumerate_primary_hnfs(orders: tuple[int, ...], p: int, t: int, accept=None):
    """All lattice HNFs of index ``p^t`` containing ``diag(orders)``.

    Rows are chosen bottom-up; row ``c`` is admissible when
    ``(orders[c] / h_c) * row_c - orders[c] * e_c`` lies in the span of the
    rows below it, which is exactly the condition ``orders[c] e_c in L``.
    ``accept(row, below)`` may veto a row given the rows already chosen;
    a vetoed partial matrix is never extended.
    """
    k = len(orders)
    exps = [padic_valuation(d, p) for d in orders]

    def rows_from(c, budget):
        if c == k:
            if budget == 0:
                yield ()
            return
        for b in range(min(exps[c], budget) + 1):
            h = p**b
            mult = orders[c] // h
            for below in rows_from(c + 1, budget - b):
                ranges = [range(row[j]) for j, row in enumerate(below, start=c + 1)]
                for tail in itertools.product(*ranges):
                    probe = [0] * (c + 1) + [mult * a for a in tail]
                    if not any(_reduce_by_rows(probe, below, c + 1)):
                        row = (0,) * c + (h,) + tail
                        if accept is None or accept(row, below):
                            yield (row,) + below

    yield from rows_from(0, t)


def enumerate_subgroups_of_order(G: FiniteAbelianGroup, N: int, accept=None) -> list[Subgroup]:
    """Every subgroup of order ``N``, each exactly once, in canonical form.

    Works prime by prime and takes products, so the cost is governed by the
    largest primary component.  ``accept(row, below)``, if given, prunes the
    search: it sees each candidate generator row together with the rows
    already fixed beneath it, in the coordinates of the primary component,
    and must be monotone (a rejected set of rows stays rejected when rows
    are added).
    """
    if N < 1 or G.order % N:
        raise OrderNotDividing(f"{N} does not divide |G| = {G.order}")
    index = G.order // N
    blocks = []
    for p in G.primes:
        part = primary_part(G, p)
        t = padic_valuation(index, p) if index % p == 0 else 0
        blocks.append((part, list(_enumerate_primary_hnfs(part.group.orders, p, t, accept))))
    out = []
    for choice in itertools.product(*(hnfs for _, hnfs in blocks)):
        H = [[0] * G.rank for _ in range(G.rank)]
        for (part, _), block in zip(blocks, choice):
            for r, row in zip(part.indices, block):
                for c, a in zip(part.indices, row):
                    H[r][c] = a
        out.append(Subgroup(G, tuple(tuple(row) for row in H)))
    for sub in out:
        object.__setattr__(sub, "spanning", sub.generators)
    return out


# -- echelon generating sets ----------------------------------------------


@dataclass(frozen=True)
class EchelonProfile:
    """Leading exponents ``a_i`` of an echelon generating set in ``(Z/p^n)^width``.

    ``counts[j]`` is the number of generators with leading term ``p^j`` for
    ``j < n``; ``counts[n]`` is the number of non-pivot columns.
    """

    p: int
    n: int
    width: int
    exponents: tuple[int, ...]
    pivots: tuple[int, ...]

    @property
    def ell(self) -> int:
        return len(self.exponents)

    @property
    def counts(self) -> tuple[int, ...]:
        ks = [0] * (self.n + 1)
        for a in self.exponents:
            ks[a] += 1
        ks[self.n] = self.width - self.ell
        return tuple(ks)

    @property
    def k(self) -> int:
        return self.counts[0]

    def is_symmetric(self) -> bool:
        ks = self.counts
        return all(ks[j] == ks[self.n - j] for j in range(self.n + 1))


def echelon_generators(M: Subgroup) -> tuple[tuple[Element, ...], EchelonProfile]:
    """Triangular generating set ``ω_1, ..., ω_ℓ`` of a subgroup of ``(Z/p^n)^k``.

    Each step takes the entry of least p-adic valuation among the rows and
    columns not yet used (ties: leftmost column, then first row), scales its
    row so the entry is exactly ``p^a``, and clears that column from the other
    unused rows.  Pivot columns are returned in selection order, so after
    permuting coordinates into that order each ``ω_i`` starts with ``i - 1``
    zeros, then ``p^{a_i}``, and every later entry is divisible by ``p^{a_i}``;
    the ``a_i`` are non-decreasing.  Only the spanning set is used, and
    re-running on the output reproduces it.
    """
    G = M.ambient
    if G.is_trivial():
        return (), EchelonProfile(1, 0, 0, (), ())
    if not G.is_homogeneous():
        raise NotHomogeneousAmbient(f"{G} is not of the form (Z/p^n)^k")
    p, n = G.factors[0]
    N = p**n
    rows = [list(g) for g in M.spanning if any(g)]
    free_cols = list(range(G.rank))
    out, exps, pivots = [], [], []
    while rows:
        best = None
        for c in free_cols:
            for r, row in enumerate(rows):
                if row[c]:
                    key = (padic_valuation(row[c], p), c, r)
                    if best is None or key < best:
                        best = key
        if best is None:
            break
        a, c, r = best
        row = rows.pop(r)
        unit = row[c] // p**a
        inv = mod_inverse(unit, N)
        row = [x * inv % N for x in row]
        for other in rows:
            if other[c]:
                q = other[c] // p**a
                for j in range(G.rank):
                    other[j] = (other[j] - q * row[j]) % N
        rows = [o for o in rows if any(o)]
        free_cols.remove(c)
        out.append(tuple(row))
        exps.append(a)
        pivots.append(c)
    return tuple(out), EchelonProfile(p, n, G.rank, tuple(exps), tuple(pivots))
