"""Decision procedures over manifold and knot records.

Every checker certifies that a known obstruction applies; when a hypothesis
fails the verdict is ``inconclusive`` and names the failing clause.  No
checker ever claims that a manifold or knot is trivial.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from fractions import Fraction
from math import isqrt, prod

from .abelian import FiniteAbelianGroup, from_cyclic_orders, primary_part
from .dfun import ValidationReport
from .errors import EvenFraming, MissingData
from .exact import Residue, factorize, format_rational, is_prime
from .linking import (
    LinkingForm,
    direct_sum,
    is_nondegenerate,
    linking_from_presentation,
    negate,
    quadratic_refinement,
    rho_surgery,
    sum_coordinates,
)

INFINITE_ORDER = "infinite_order"
NONZERO = "nonzero"
INDEPENDENT = "independent"
OBSTRUCTED_SQUARE = "obstructed_square"
INCONCLUSIVE = "inconclusive"

MAX_TABLE_SIZE = 10**6


@dataclass(frozen=True)
class ManifoldDescriptor:
    name: str
    h1: FiniteAbelianGroup
    linking: LinkingForm | None = None
    rho0: Residue | None = None
    d_table: dict | None = field(default=None, hash=False)
    provenance: tuple = ("abstract",)

    def __post_init__(self):
        if self.linking is not None and self.linking.group != self.h1:
            raise ValueError(f"{self.name}: linking form lives on {self.linking.group}, not {self.h1}")

    @classmethod
    def abstract(cls, name: str, orders=(), **kwargs) -> ManifoldDescriptor:
        h1 = orders if isinstance(orders, FiniteAbelianGroup) else from_cyclic_orders(orders)
        return cls(name, h1, **kwargs)

    @classmethod
    def sphere(cls) -> ManifoldDescriptor:
        G = FiniteAbelianGroup.trivial()
        return cls("S3", G, LinkingForm.trivial(), Residue(0, 2), {(): Fraction(0)}, ("abstract",))

    @classmethod
    def surgery(cls, n: int, name: str | None = None) -> ManifoldDescriptor:
        rho = rho_surgery(n)
        _, form = linking_from_presentation([[n]])
        return cls(name or f"S3_{n}(K)", rho.group, form, rho.rho0, None, ("surgery", n))

    @classmethod
    def presentation(cls, A, name: str = "Y", **kwargs) -> ManifoldDescriptor:
        G, form = linking_from_presentation(A)
        return cls(name, G, form, provenance=("presentation", tuple(tuple(r) for r in A)), **kwargs)

    def d(self, x) -> Fraction:
        return self.d_table[self.h1.element(x)]


def reverse(Y: ManifoldDescriptor) -> ManifoldDescriptor:
    if Y.provenance[0] == "reversed":
        return Y.provenance[1]
    return ManifoldDescriptor(
        name=f"-{Y.name}",
        h1=Y.h1,
        linking=negate(Y.linking) if Y.linking is not None else None,
        rho0=-Y.rho0 if Y.rho0 is not None else None,
        d_table={x: -v for x, v in Y.d_table.items()} if Y.d_table is not None else None,
        provenance=("reversed", Y),
    )


def connected_sum(descriptors) -> ManifoldDescriptor:
    """``H_1`` and linking forms add as direct sums, ρ(t_0) and d-values add."""
    descriptors = list(descriptors)
    if len(descriptors) == 1:
        return descriptors[0]
    groups = [Y.h1 for Y in descriptors]
    h1 = FiniteAbelianGroup(tuple(sorted(f for G in groups for f in G.factors)))
    linking = None
    if all(Y.linking is not None for Y in descriptors):
        linking = direct_sum([Y.linking for Y in descriptors])
    rho0 = None
    if all(Y.rho0 is not None for Y in descriptors):
        rho0 = sum((Y.rho0 for Y in descriptors), Residue(0, 2))
    table = None
    if all(Y.d_table is not None for Y in descriptors):
        if prod(G.order for G in groups) > MAX_TABLE_SIZE:
            raise MissingData("connected sum d-table would be too large to tabulate")
        table = {}
        for combo in itertools.product(*(list(Y.d_table.items()) for Y in descriptors)):
            key = sum_coordinates(groups, [x for x, _ in combo])
            table[key] = sum((v for _, v in combo), Fraction(0))
    name = " # ".join(Y.name for Y in descriptors)
    return ManifoldDescriptor(name, h1, linking, rho0, table, ("connected_sum", tuple(descriptors)))


def multiple(Y: ManifoldDescriptor, m: int) -> ManifoldDescriptor:
    """``mY``; negative ``m`` means ``|m|(-Y)``."""
    if m == 0:
        return ManifoldDescriptor.sphere()
    base = Y if m > 0 else reverse(Y)
    return connected_sum([base] * abs(m))


@dataclass
class Verdict:
    conclusion: str
    reasons: list[str] = field(default_factory=list)
    checklist: list[tuple[str, bool]] = field(default_factory=list)

    @property
    def conclusive(self) -> bool:
        return self.conclusion != INCONCLUSIVE

    @property
    def failed_clause(self) -> str | None:
        return next((name for name, ok in self.checklist if not ok), None)


def square_order_test(G: FiniteAbelianGroup) -> bool:
    return isqrt(G.order) ** 2 == G.order


def check_square_obstruction(Y: ManifoldDescriptor) -> Verdict:
    ok = square_order_test(Y.h1)
    check = [(f"|H1| = {Y.h1.order} is a perfect square", ok)]
    if ok:
        return Verdict(INCONCLUSIVE, ["order of H1 is a square; no obstruction"], check)
    return Verdict(
        OBSTRUCTED_SQUARE,
        [f"|H1({Y.name})| = {Y.h1.order} is not a square, so it bounds no rational homology ball"],
        check,
    )


def check_surgery_infinite_order(n: int) -> Verdict:
    """Odd ``n``-surgery on a knot has infinite order when ``|n| ≢ 1 (mod 8)``."""
    if n % 2 == 0:
        raise EvenFraming(f"the surgery criterion needs an odd framing, got {n}")
    rho0 = rho_surgery(n).rho0
    mod8 = abs(n) % 8
    rho_nonzero = not rho0.is_zero()
    # ρ(t_0) = ±(|n| - 1)/4 vanishes mod 2 exactly when |n| ≡ 1 (mod 8)
    assert rho_nonzero == (mod8 != 1)
    checklist = [("n odd", True), (f"|n| mod 8 = {mod8} != 1", mod8 != 1)]
    reasons = [f"rho(t0) = {rho0} mod 2"]
    if rho_nonzero:
        reasons.append("rho(t0) != 0 mod 2, so m*d(Y,t0) = 0 is impossible for m != 0: infinite order")
        return Verdict(INFINITE_ORDER, reasons, checklist)
    reasons.append("rho(t0) = 0 mod 2; surgery criterion does not apply")
    return Verdict(INCONCLUSIVE, reasons, checklist)


def _cyclic_odd_power(G: FiniteAbelianGroup, p: int):
    """Exponent ``n`` when the p-primary part is ``Z/p^n`` with ``n`` odd, else ``None``."""
    part = primary_part(G, p).group
    if part.rank == 1 and part.factors[0][1] % 2 == 1:
        return part.factors[0][1]
    return None


def check_theorem_main(Y: ManifoldDescriptor, N: ManifoldDescriptor, m: int, p: int, n: int) -> Verdict:
    """Whether ``mY # N`` is certified nonzero in the rational cobordism group."""
    part = primary_part(Y.h1, p).group if is_prime(p) else None
    checklist = [
        ("m != 0", m != 0),
        (f"|H1({Y.name})| odd", Y.h1.order % 2 == 1),
        (f"|H1({N.name})| odd", N.h1.order % 2 == 1),
        (f"p = {p} prime", is_prime(p)),
        (f"p = {p} is 3 mod 4", p % 4 == 3),
        (f"n = {n} odd and positive", n > 0 and n % 2 == 1),
        (
            f"{p}-primary part of H1({Y.name}) is Z/{p}^{n}",
            part is not None and part.factors == ((p, n),),
        ),
        (f"{p}-primary part of H1({N.name}) is trivial", N.h1.order % p != 0 if p > 1 else False),
    ]
    failed = [name for name, ok in checklist if not ok]
    if failed:
        return Verdict(INCONCLUSIVE, [f"hypothesis fails: {failed[0]}"], checklist)
    return Verdict(NONZERO, [f"{m}*{Y.name} # {N.name} is nonzero in the rational homology cobordism group"], checklist)


def candidate_primes(G: FiniteAbelianGroup) -> list[tuple[int, int]]:
    """Primes ``p ≡ 3 (mod 4)`` whose primary part is cyclic of odd exponent."""
    out = []
    for p in G.primes:
        if p % 4 == 3:
            e = _cyclic_odd_power(G, p)
            if e is not None:
                out.append((p, e))
    return out


@dataclass
class IndependenceCertificate:
    assignment: list[tuple[str, int, int]]
    verdict: Verdict

    @property
    def independent(self) -> bool:
        return self.verdict.conclusion == INDEPENDENT


def _assign_prime(i: int, family):
    """Smallest admissible prime for ``family[i]`` or the clause that rules every prime out."""
    Y = family[i]
    if Y.h1.order % 2 == 0:
        return None, "even_order", f"|H1({Y.name})| = {Y.h1.order} is even, so {Y.name} is not a Z/2-homology sphere"
    failures = []
    for p in Y.h1.primes:
        if p % 4 != 3:
            continue
        part = primary_part(Y.h1, p).group
        if part.rank != 1:
            failures.append(("cyclic", f"{p}-primary part of H1({Y.name}) is {part}, not cyclic"))
            continue
        e = part.factors[0][1]
        if e % 2 == 0:
            failures.append(("exponent_parity", f"{p}-primary part of H1({Y.name}) is Z/{p}^{e}: exponent {e} is even"))
            continue
        clash = next((Z for j, Z in enumerate(family) if j != i and Z.h1.order % p == 0), None)
        if clash is not None:
            failures.append(("disjointness", f"{p}-primary part of H1({clash.name}) is nonzero"))
            continue
        return (p, e), None, ""
    if not failures:
        return None, "prime_3_mod_4", f"no prime congruent to 3 mod 4 divides |H1({Y.name})| = {Y.h1.order}"
    clause, why = failures[0]
    return None, clause, "; ".join(w for _, w in failures)


def check_independence(family) -> IndependenceCertificate:
    """Search for distinct primes ``p_i ≡ 3 (mod 4)`` witnessing independence.

    For each manifold the smallest admissible prime is taken: its primary
    part must be cyclic of odd exponent and it must divide no other ``|H_1|``,
    which already forces the chosen primes to be distinct.
    """
    family = list(family)
    assignment = []
    checklist = []
    for i, Y in enumerate(family):
        choice, clause, why = _assign_prime(i, family)
        checklist.append((clause or f"prime for {Y.name}", choice is not None))
        if choice is None:
            return IndependenceCertificate(assignment, Verdict(INCONCLUSIVE, [why], checklist))
        assignment.append((Y.name, choice[0], choice[1]))
    reasons = [f"{name}: p = {p}, n = {n}" for name, p, n in assignment]
    reasons.append("linearly independent modulo integral homology spheres")
    return IndependenceCertificate(assignment, Verdict(INDEPENDENT, reasons, checklist))


# -- knots ----------------------------------------------------------------


@dataclass(frozen=True)
class KnotRecord:
    name: str
    determinant: int | None = None
    cyclic: bool = False
    goeritz: tuple | None = None
    branched_cover: ManifoldDescriptor | None = None


def branched_cover(K: KnotRecord) -> ManifoldDescriptor:
    """Descriptor for ``Y_K``; ``H_1`` from the cover, a Goeritz matrix, or the determinant.

    A determinant alone fixes ``H_1`` only when it is squarefree or the record
    asserts that the cover's homology is cyclic.
    """
    if K.branched_cover is not None:
        Y = K.branched_cover
    elif K.goeritz is not None:
        Y = ManifoldDescriptor.presentation(K.goeritz, name=f"Y_{K.name}")
    elif K.determinant is not None:
        det = abs(K.determinant)
        if det == 0:
            raise MissingData(f"{K.name}: determinant 0 does not give a rational homology sphere")
        squarefree = all(e == 1 for e in factorize(det).values()) if det > 1 else True
        if not (K.cyclic or squarefree):
            raise MissingData(f"{K.name}: H1 of the branched cover is not determined by det = {det}; assert cyclic: true or supply a goeritz matrix or h1")
        Y = ManifoldDescriptor.abstract(f"Y_{K.name}", [det])
    else:
        raise MissingData(f"{K.name}: neither determinant nor branched-cover homology given")
    if K.determinant is not None and abs(K.determinant) != Y.h1.order:
        raise MissingData(f"{K.name}: |det| = {abs(K.determinant)} but |H1(Y_K)| = {Y.h1.order}")
    return Y


def check_knot_family(knots) -> IndependenceCertificate:
    return check_independence([branched_cover(K) for K in knots])


def check_knot_sum(K: KnotRecord, J: KnotRecord, m: int, p: int | None = None) -> Verdict:
    """``mK # J`` nonzero in concordance via the branched covers."""
    YK, YJ = branched_cover(K), branched_cover(J)
    if p is None:
        options = [(q, e) for q, e in candidate_primes(YK.h1) if YJ.h1.order % q]
        if not options:
            options = candidate_primes(YK.h1) or [(3, 1)]
        p, n = options[0]
    else:
        n = _cyclic_odd_power(YK.h1, p) or 0
    v = check_theorem_main(YK, YJ, m, p, n)
    if v.conclusive:
        v.reasons.append(f"{m}{K.name} # {J.name} is not slice, hence nonzero in concordance")
    return v


# -- d-tables -------------------------------------------------------------


def validate_d_axioms(Y: ManifoldDescriptor) -> ValidationReport:
    """Origin, conjugation symmetry, mod-2 agreement with ρ, and additivity."""
    report = ValidationReport()
    if Y.d_table is None:
        report.violations.append(f"{Y.name}: no d-table")
        return report
    G = Y.h1
    table = Y.d_table
    missing = [x for x in G.elements() if x not in table]
    if missing:
        report.violations.append(f"origin/labels: {len(missing)} labels missing, e.g. {missing[0]}")
        return report
    zero = G.zero()
    if G.is_trivial() and table[zero] != 0:
        report.violations.append(f"origin: d(S3, t0) = {format_rational(table[zero])} is not 0")
    for x in G.elements():
        nx = G.neg(x)
        if x < nx and table[x] != table[nx]:
            report.violations.append(
                f"symmetry: d(t_{_label(x)}) = {format_rational(table[x])} "
                f"but d(t_{_label(nx)}) = {format_rational(table[nx])}"
            )
    if Y.linking is not None and G.order % 2 == 1:
        q = quadratic_refinement(Y.linking)
        for x in G.elements():
            diff = Residue(table[x] - table[zero], 2)
            if diff != q(x):
                report.violations.append(
                    f"mod 2: d(t_{_label(x)}) - d(t_0) = {format_rational(table[x] - table[zero])} "
                    f"is not -lambda(x,x) refinement {q(x)}"
                )
    if Y.rho0 is not None and Residue(table[zero], 2) != Y.rho0:
        report.violations.append(f"mod 2: d(t_0) = {format_rational(table[zero])} is not rho(t_0) = {Y.rho0}")
    if Y.provenance[0] == "connected_sum":
        parts = Y.provenance[1]
        if all(Z.d_table is not None for Z in parts):
            groups = [Z.h1 for Z in parts]
            for combo in itertools.product(*(list(Z.d_table.items()) for Z in parts)):
                key = sum_coordinates(groups, [x for x, _ in combo])
                total = sum((v for _, v in combo), Fraction(0))
                if table.get(key) != total:
                    report.violations.append(f"additivity fails at t_{_label(key)}")
                    break
    return report


def _label(x) -> str:
    return ",".join(str(c) for c in x)


def is_valid_descriptor(Y: ManifoldDescriptor) -> bool:
    return Y.linking is None or is_nondegenerate(Y.linking)
