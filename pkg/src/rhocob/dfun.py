"""Functions ``f: Z/p^n → Q`` modelling d̄, and the exact oracle for the vanishing proposition.

The oracle works on the ``(p^n - 1)/2`` free values ``f(1), ..., f((p^n-1)/2)``
of a symmetric ``f`` with ``f(0) = 0``.  Every element of a metabolizer gives
one integer linear constraint ``Σ_j f(x_j) = 0``; the claim to certify is that
each coordinate ``f(g)``, ``g ∈ ⟨p^{(n-1)/2}⟩``, lies in the row space of
those constraints.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from math import gcd

from .abelian import FiniteAbelianGroup, Subgroup, smith_normal_form
from .errors import CapacityError, NOddRequired
from .exact import Residue, as_rational, format_rational
from .linking import LinkingForm, QuadraticRefinement, quadratic_refinement
from .metab import MAX_GROUP_ORDER, Metabolizer, enumerate_metabolizers


@dataclass(frozen=True)
class DFunction:
    p: int
    n: int
    values: tuple[Fraction, ...]

    def __post_init__(self):
        if len(self.values) != self.p**self.n:
            raise ValueError(f"need {self.p ** self.n} values")
        object.__setattr__(self, "values", tuple(as_rational(v) for v in self.values))

    @property
    def modulus(self) -> int:
        return self.p**self.n

    @classmethod
    def from_orbit_values(cls, p: int, n: int, free) -> DFunction:
        """Symmetric ``f`` with ``f(0) = 0`` and ``f(g) = free[g-1]`` for ``1 ≤ g ≤ (p^n-1)/2``."""
        N = p**n
        free = [as_rational(v) for v in free]
        if len(free) != (N - 1) // 2:
            raise ValueError(f"need {(N - 1) // 2} free values")
        vals = [Fraction(0)] * N
        for g, v in enumerate(free, start=1):
            vals[g] = v
            vals[N - g] = v
        return cls(p, n, tuple(vals))

    @classmethod
    def from_table(cls, p: int, n: int, table) -> DFunction:
        """Ingest ``{"0": "0", "1": "-1/2", ...}``; a missing label is filled from its negative."""
        N = p**n
        raw = {int(k) % N: as_rational(v) for k, v in table.items()}
        vals = []
        for g in range(N):
            if g in raw:
                vals.append(raw[g])
            elif -g % N in raw:
                vals.append(raw[-g % N])
            else:
                raise ValueError(f"no value for label {g}")
        return cls(p, n, tuple(vals))

    @classmethod
    def from_rho_map(cls, rho) -> DFunction:
        """``d̄(t_x) = ρ(t_x) - ρ(t_0)`` lifted to ``[0, 2)``, for ρ on ``Z/p^n``."""
        (p, n), = rho.group.factors
        return cls(p, n, tuple((rho(g) - rho.rho0).value for g in range(p**n)))

    @classmethod
    def zero(cls, p: int, n: int) -> DFunction:
        return cls(p, n, (Fraction(0),) * p**n)

    def __call__(self, g: int) -> Fraction:
        return self.values[g % self.modulus]

    def to_table(self) -> dict[str, str]:
        return {str(g): format_rational(v) for g, v in enumerate(self.values)}


@dataclass
class ValidationReport:
    violations: list[str] = field(default_factory=list)

    @property
    def valid(self) -> bool:
        return not self.violations

    def __bool__(self):
        return self.valid


def validate(f: DFunction, q: QuadraticRefinement | None = None) -> ValidationReport:
    """``f(0) = 0``, ``f(-g) = f(g)`` and, given ``q``, ``f(g) ≡ q(g) (mod 2)``."""
    report = ValidationReport()
    N = f.modulus
    if f(0) != 0:
        report.violations.append(f"f(0) = {format_rational(f(0))} is not 0")
    for g in range(1, N):
        if g < N - g and f(g) != f(N - g):
            report.violations.append(
                f"symmetry: f({g}) = {format_rational(f(g))} but f({N - g}) = {format_rational(f(N - g))}"
            )
    if q is not None:
        if q.group.orders != (N,):
            raise ValueError(f"refinement lives on {q.group}, not Z/{N}")
        for g in range(N):
            if Residue(f(g), 2) != q((g,)):
                report.violations.append(
                    f"compatibility: f({g}) = {format_rational(f(g))} is not {q((g,))} mod 2"
                )
    return report


def extend(f: DFunction, m: int):
    """``f^(m)(g_1, ..., g_m) = f(g_1) + ... + f(g_m)``."""
    if m < 1:
        raise ValueError("m must be positive")

    def f_m(gs) -> Fraction:
        gs = tuple(gs)
        if len(gs) != m:
            raise ValueError(f"expected {m} coordinates")
        return sum((f(g) for g in gs), Fraction(0))

    return f_m


def vanishes_on_metabolizer(f: DFunction, m: int, M) -> bool:
    """Whether ``f^(2m)`` is zero on every element of ``M ⊂ (Z/p^n)^{2m}``."""
    sub = M.subgroup if isinstance(M, Metabolizer) else M
    if sub.ambient.rank != 2 * m:
        raise ValueError(f"metabolizer lives in rank {sub.ambient.rank}, expected {2 * m}")
    f2m = extend(f, 2 * m)
    return all(f2m(x) == 0 for x in sub.elements())


def conclusion_subgroup(p: int, n: int) -> list[int]:
    """Elements of ``⟨p^{(n-1)/2}⟩ ⊂ Z/p^n``, of order ``p^{(n+1)/2}``."""
    if n % 2 == 0:
        raise NOddRequired(f"n must be odd, got {n}")
    step = p ** ((n - 1) // 2)
    return list(range(0, p**n, step))


def conclusion_holds(f: DFunction) -> bool:
    return all(f(g) == 0 for g in conclusion_subgroup(f.p, f.n))


# -- exact linear algebra -------------------------------------------------


def _primitive_row(row):
    g = 0
    for x in row:
        g = gcd(g, x)
    if g > 1:
        row = [x // g for x in row]
    return row


def integer_echelon(rows) -> list[list[int]]:
    """Fraction-free row echelon form of integer rows (each row kept primitive)."""
    rows = [_primitive_row(list(r)) for r in rows if any(r)]
    if not rows:
        return []
    width = len(rows[0])
    out = []
    col = 0
    while rows and col < width:
        piv = next((r for r in rows if r[col]), None)
        if piv is None:
            col += 1
            continue
        rows.remove(piv)
        nxt = []
        for r in rows:
            if r[col]:
                r = [piv[col] * a - r[col] * b for a, b in zip(r, piv)]
            if any(r):
                nxt.append(_primitive_row(r))
        out.append(piv)
        rows = nxt
        col += 1
    return out


def rank(rows) -> int:
    return len(integer_echelon(rows))


def in_row_space(vector, echelon) -> bool:
    return rank(list(echelon) + [list(vector)]) == len(echelon)


def integer_solvable(A, b) -> bool:
    """Whether ``A w = b`` has an integer solution (``b`` may be rational)."""
    if not A:
        return all(x == 0 for x in b)
    den = 1
    for x in b:
        den = den * Fraction(x).denominator // gcd(den, Fraction(x).denominator)
    A = [[den * a for a in row] for row in A]
    b = [int(Fraction(x) * den) for x in b]
    D, U, _ = smith_normal_form(A)
    Ub = [sum(u * x for u, x in zip(row, b)) for row in U]
    for i, val in enumerate(Ub):
        d = D[i][i] if i < len(D[0]) else 0
        if d == 0:
            if val != 0:
                return False
        elif val % d:
            return False
    return True


# -- the oracle -----------------------------------------------------------


def constraint_rows(M, p: int, n: int) -> list[list[int]]:
    """One row per element of ``M``: multiplicities of the orbit classes ``±g``."""
    N = p**n
    K = (N - 1) // 2
    sub = M.subgroup if isinstance(M, Metabolizer) else M
    rows = set()
    for x in sub.elements():
        row = [0] * K
        for c in x:
            g = min(c % N, -c % N)
            if g:
                row[g - 1] += 1
        if any(row):
            rows.add(tuple(row))
    return [list(r) for r in sorted(rows)]


def compatibility_residues(form: LinkingForm, p: int, n: int) -> list[Residue] | None:
    """Residues ``c(g)`` with ``f^(2m) ≡ q_form (mod 2)`` iff ``f(g) ≡ c(g)`` for all g.

    ``None`` when no ``f`` can be compatible: the form is not diagonal, or
    the coordinate refinements disagree.
    """
    G = form.group
    k = G.rank
    for i in range(k):
        for j in range(k):
            if i != j and not form.gram[i][j].is_zero():
                return None
    q = quadratic_refinement(form)
    N = p**n
    residues = []
    for g in range(N):
        vals = {q(tuple(g if t == i else 0 for t in range(k))) for i in range(k)}
        if len(vals) != 1:
            return None
        residues.append(vals.pop())
    return residues


@dataclass
class MetabolizerCertificateEntry:
    generators: list
    constraint_rank: int
    nullity: int
    forced_zero: list[int]
    contained: bool
    compatible_solution_exists: bool | None = None


@dataclass
class OracleCertificate:
    p: int
    n: int
    m: int
    unknowns: int
    conclusion_labels: list[int]
    entries: list[MetabolizerCertificateEntry]
    compatibility_coset_empty: bool | None = None

    @property
    def holds(self) -> bool:
        return all(e.contained for e in self.entries)

    @property
    def vacuous(self) -> bool:
        return not self.entries


def _certify_one(M, p, n, conclusion, compat):
    N = p**n
    K = (N - 1) // 2
    rows = constraint_rows(M, p, n)
    ech = integer_echelon(rows)
    forced = []
    for g in range(1, K + 1):
        e = [0] * K
        e[g - 1] = 1
        if in_row_space(e, ech):
            forced.append(g)
    entry = MetabolizerCertificateEntry(
        generators=[list(x) for x in M.generators],
        constraint_rank=len(ech),
        nullity=K - len(ech),
        forced_zero=forced,
        contained=all(g in forced for g in conclusion),
    )
    if compat is not None:
        c = [compat[g].value for g in range(1, K + 1)]
        if ech:
            # f = c + 2w must satisfy C f = 0, i.e. (2C) w = -C c over the integers.
            A = [[2 * a for a in row] for row in ech]
            b = [-sum(a * x for a, x in zip(row, c)) for row in ech]
            entry.compatible_solution_exists = integer_solvable(A, b)
        else:
            entry.compatible_solution_exists = True
    return entry


def oracle_verify_proposition(p: int, n: int, m: int, form: LinkingForm, with_compatibility=False, jobs=1):
    """Certify that every metabolizer forces ``f ≡ 0`` on ``⟨p^{(n-1)/2}⟩``.

    For each metabolizer the solution space ``{f symmetric, f(0) = 0 :
    f^(2m)|_M = 0}`` is contained in the conclusion set exactly when every
    conclusion coordinate is forced to vanish.  With ``with_compatibility``
    each entry also records whether some solution satisfies the mod-2
    compatibility with the refinement of ``form``.
    """
    if n % 2 == 0:
        raise NOddRequired(f"n must be odd, got {n}")
    if p % 4 != 3:
        raise ValueError(f"p must be congruent to 3 mod 4, got {p}")
    G = form.group
    if G != FiniteAbelianGroup.homogeneous(p, n, 2 * m):
        raise ValueError(f"form must live on (Z/{p}^{n})^{2 * m}, got {G}")
    if G.order > MAX_GROUP_ORDER:
        raise CapacityError(f"|G| = {G.order} exceeds the supported bound {MAX_GROUP_ORDER}")
    conclusion = sorted({min(g, p**n - g) for g in conclusion_subgroup(p, n)} - {0})
    metabolizers = enumerate_metabolizers(form)
    compat = compatibility_residues(form, p, n) if with_compatibility else None
    args = [(M, p, n, conclusion, compat) for M in metabolizers]
    if jobs > 1 and len(args) > 1:
        from concurrent.futures import ProcessPoolExecutor

        with ProcessPoolExecutor(max_workers=jobs) as pool:
            entries = list(pool.map(_certify_star, args))
    else:
        entries = [_certify_one(*a) for a in args]
    return OracleCertificate(
        p=p,
        n=n,
        m=m,
        unknowns=(p**n - 1) // 2,
        conclusion_labels=conclusion,
        entries=entries,
        compatibility_coset_empty=(compat is None) if with_compatibility else None,
    )


def _certify_star(args):
    return _certify_one(*args)
