"""Metabolizers of linking forms and the machinery of the induction on ``H_j``.

For a metabolizer ``M`` of ``(Z/p^n)^{2m}`` and ``(n+1)/2 ≤ r ≤ n`` the
element ``z`` has ``p^{r-1}`` on the pivot coordinates of every echelon
generator with ``a_i ≤ r - 1`` and multiples of ``p^{r-1}`` elsewhere.  The
vector ``ψ(x)`` counts, for each power ``a^i`` of a generator ``a`` of
``(Z/p^{n-r+1})^*/{±1}``, the coordinates of ``x`` equal to ``±a^i p^{r-1}``.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from fractions import Fraction
from math import gcd, isqrt, lcm

from .abelian import (
    EchelonProfile,
    Element,
    Subgroup,
    _as_subgroup,
    echelon_generators,
    enumerate_subgroups_of_order,
    is_isomorphic,
    primary_part,
    quotient_invariants,
)
from .errors import CapacityError, InequalityViolation, NotHomogeneousAmbient, ProfileAsymmetry, RangeError
from .exact import Residue, mod_inverse
from .linking import LinkingForm

MAX_GROUP_ORDER = 10**8


@dataclass(frozen=True)
class MetabolizerCertificate:
    is_metabolizer: bool
    order_ok: bool
    isotropic: bool
    quotient_ok: bool
    witness: tuple[Element, Element, Residue] | None = None

    def __bool__(self):
        return self.is_metabolizer


@dataclass(frozen=True)
class Metabolizer:
    subgroup: Subgroup
    ambient_form: LinkingForm
    certificate: MetabolizerCertificate | None = field(default=None, compare=False)

    @property
    def generators(self):
        return self.subgroup.generators


def is_metabolizer(form: LinkingForm, M) -> MetabolizerCertificate:
    """Check ``|M|² = |G|``, ``λ|_{M×M} = 0`` and ``G/M ≅ M``.

    Isotropy is checked on all pairs of canonical generators, which by
    bilinearity covers every pair of elements; a failing pair is returned as
    the witness.
    """
    G = form.group
    M = _as_subgroup(G, M)
    order_ok = M.order**2 == G.order
    witness = None
    gens = M.generators
    for x, y in itertools.combinations_with_replacement(gens, 2):
        v = form.pair(x, y)
        if not v.is_zero():
            witness = (x, y, v)
            break
    isotropic = witness is None
    quotient_ok = is_isomorphic(quotient_invariants(G, M), M.invariants())
    return MetabolizerCertificate(order_ok and isotropic and quotient_ok, order_ok, isotropic, quotient_ok, witness)


def _check_capacity(form: LinkingForm):
    if form.group.order > MAX_GROUP_ORDER:
        raise CapacityError(f"|G| = {form.group.order} exceeds the supported bound {MAX_GROUP_ORDER}")


def enumerate_metabolizers(form: LinkingForm) -> list[Metabolizer]:
    """All metabolizers, in canonical order; empty when ``|G|`` is not a square.

    Distinct primes are orthogonal for any linking form, so a metabolizer is
    the sum of metabolizers of the primary parts; those are found among the
    subgroups of order ``sqrt|G_p|`` and combined.
    """
    _check_capacity(form)
    G = form.group
    if isqrt(G.order) ** 2 != G.order:
        return []
    per_prime = []
    for p in G.primes:
        part = primary_part(G, p)
        sub_form = form.restrict(part.indices)
        n = sub_form.group.order
        root = isqrt(n)
        if root * root != n:
            return []
        candidates = enumerate_subgroups_of_order(sub_form.group, root, accept=_isotropic_extension(sub_form))
        found = [M for M in candidates if is_metabolizer(sub_form, M)]
        if not found:
            return []
        per_prime.append((part, found))
    out = []
    for combo in itertools.product(*(found for _, found in per_prime)):
        gens = [part.include(g) for (part, _), M in zip(per_prime, combo) for g in M.generators]
        M = Subgroup.generated_by(G, gens)
        cert = is_metabolizer(form, M)
        assert cert, "a sum of primary metabolizers must be a metabolizer"
        out.append(Metabolizer(M, form, cert))
    if not per_prime:
        M = Subgroup.trivial(G)
        out.append(Metabolizer(M, form, is_metabolizer(form, M)))
    return out


def _isotropic_extension(form: LinkingForm):
    """Pruning rule for subgroup search: a new generator must pair to zero with itself and the others."""

    def accept(row, below) -> bool:
        return form.pair(row, row).is_zero() and all(form.pair(row, b).is_zero() for b in below)

    return accept


def _homogeneous_shape(M: Subgroup):
    G = M.ambient
    if not G.is_homogeneous():
        raise NotHomogeneousAmbient(f"{G} is not of the form (Z/p^n)^k")
    if G.is_trivial():
        return 1, 0, 0
    p, n = G.factors[0]
    return p, n, G.rank


def _subgroup_of(M) -> Subgroup:
    return M.subgroup if isinstance(M, Metabolizer) else M


def k_profile(M) -> EchelonProfile:
    """Echelon profile of a metabolizer of ``(Z/p^n)^{2m}``, checked for symmetry.

    Raises ``ProfileAsymmetry`` if ``k_j ≠ k_{n-j}`` for some ``j`` or
    ``2m ≠ ℓ + k``.
    """
    sub = _subgroup_of(M)
    _homogeneous_shape(sub)
    _, profile = echelon_generators(sub)
    if not profile.is_symmetric() or profile.width != profile.ell + profile.k:
        raise ProfileAsymmetry(f"profile {profile.counts} of {sub} is not symmetric")
    return profile


@dataclass(frozen=True)
class ZElement:
    vector: Element
    p: int
    n: int
    r: int
    ell_bar: int
    k_bar: int
    pivots: tuple[int, ...]
    tail: tuple[int, ...]


def build_z(M, r: int) -> ZElement:
    """Sum of the generators with ``a_i ≤ r - 1`` scaled to leading term ``p^{r-1}``.

    The scaled generators all lie in ``p^{r-1}·(Z/p^n)^{2m} ≅ (Z/p^{n-r+1})^{2m}``
    with unit pivots there, so they are first reduced against each other on
    the pivot columns; the sum then has exactly ``p^{r-1}`` on each pivot.
    """
    sub = _subgroup_of(M)
    p, n, width = _homogeneous_shape(sub)
    if not (n + 1) / 2 <= r <= n:
        raise RangeError(f"r must satisfy (n+1)/2 <= r <= n, got r={r}, n={n}")
    gens, profile = echelon_generators(sub)
    low = p ** (r - 1)
    mod = p ** (n - r + 1)
    used = [(g, a, c) for g, a, c in zip(gens, profile.exponents, profile.pivots) if a <= r - 1]
    scaled = [[(x // p**a) % mod for x in g] for g, a, _ in used]
    pivots = [c for _, _, c in used]
    for i in range(len(scaled)):
        for j in range(len(scaled)):
            if i != j and scaled[i][pivots[j]]:
                f = scaled[i][pivots[j]]
                scaled[i] = [(x - f * y) % mod for x, y in zip(scaled[i], scaled[j])]
    total = [sum(col) % mod for col in zip(*scaled)] if scaled else [0] * width
    vector = tuple(low * t % p**n for t in total)
    tail = tuple(vector[c] for c in range(width) if c not in pivots)
    return ZElement(vector, p, n, r, len(used), width - len(used), tuple(pivots), tail)


def _class_order(a: int, mod: int) -> int:
    x, t = a % mod, 1
    while x not in (1, mod - 1 if mod > 2 else 1):
        x = x * a % mod
        t += 1
    return t


def canonical_generator(p: int, n: int, r: int) -> int:
    """Smallest positive integer generating ``(Z/p^{n-r+1})^* / {±1}``."""
    mod = p ** (n - r + 1)
    qbar = p ** (n - r) * (p - 1) // 2
    a = 1
    while True:
        if a % p and _class_order(a, mod) == qbar:
            return a
        a += 1


def psi(x: Element, p: int, n: int, r: int, a: int) -> tuple[int, ...]:
    """Count of coordinates equal to ``±a^i p^{r-1}`` modulo ``p^n`` for each ``i``."""
    N = p**n
    qbar = p ** (n - r) * (p - 1) // 2
    low = p ** (r - 1)
    index = {}
    power = 1
    for i in range(qbar):
        index[power * low % N] = i
        index[-power * low % N] = i
        power = power * a % N
    alpha = [0] * qbar
    for c in x:
        i = index.get(c % N)
        if i is not None:
            alpha[i] += 1
    return tuple(alpha)


@dataclass(frozen=True)
class HPolynomial:
    """``β_0 + β_1 t + ... + β_{q̄-1} t^{q̄-1}`` in ``Q[t]/(t^q̄ - 1)``."""

    coefficients: tuple[int, ...]
    qbar: int
    generator: int

    def __post_init__(self):
        if len(self.coefficients) != self.qbar:
            raise ValueError("need exactly q̄ coefficients")


def h_polynomial(z: ZElement, a: int | None = None) -> HPolynomial:
    """``ψ(z)`` read as a polynomial, with the chain ``Σ_{i≥1} β_i ≤ k̄ ≤ ℓ̄ ≤ β_0`` enforced."""
    p, n, r = z.p, z.n, z.r
    qbar = p ** (n - r) * (p - 1) // 2
    if a is None:
        a = canonical_generator(p, n, r)
    beta = psi(z.vector, p, n, r, a)
    h = HPolynomial(beta, qbar, a)
    if not (sum(beta[1:]) <= z.k_bar <= z.ell_bar <= beta[0]):
        raise InequalityViolation(f"β = {beta}, k̄ = {z.k_bar}, ℓ̄ = {z.ell_bar}")
    return h


def _poly_trim(c):
    c = list(c)
    while c and c[-1] == 0:
        c.pop()
    return c


def _poly_divmod(num, den):
    num = [Fraction(x) for x in num]
    q = [Fraction(0)] * max(len(num) - len(den) + 1, 1)
    lead = Fraction(den[-1])
    while len(num) >= len(den) and num:
        shift = len(num) - len(den)
        f = num[-1] / lead
        q[shift] = f
        for i, d in enumerate(den):
            num[shift + i] -= f * d
        num = _poly_trim(num)
    return q, num


def _primitive(c):
    """Scale a nonzero rational polynomial to integer coefficients with content 1."""
    den = lcm(*(Fraction(x).denominator for x in c))
    ints = [int(Fraction(x) * den) for x in c]
    g = 0
    for x in ints:
        g = gcd(g, x)
    ints = [x // g for x in ints]
    if ints[-1] < 0:
        ints = [-x for x in ints]
    return ints


def poly_gcd(f, g) -> list[int]:
    """Monic-up-to-content gcd over Q, coefficients lowest degree first."""
    f, g = _poly_trim(f), _poly_trim(g)
    while g:
        _, rem = _poly_divmod(f, g)
        f, g = _primitive(g), (_primitive(rem) if rem else [])
    return _primitive(f) if f else []


def ideal_is_full(h: HPolynomial) -> bool:
    """Whether ``(h)`` is all of ``Q[t]/(t^q̄ - 1)``, i.e. ``gcd(h, t^q̄ - 1) = 1``."""
    modulus = [-1] + [0] * (h.qbar - 1) + [1]
    if not _poly_trim(h.coefficients):
        return False
    return poly_gcd(modulus, h.coefficients) == [1]


def tau_shift_check(M, a: int | None, r: int) -> bool:
    """``ψ(a·x)`` is the cyclic shift of ``ψ(x)`` for every ``x`` killed by ``p^{n-r+1}``."""
    sub = _subgroup_of(M)
    p, n, _ = _homogeneous_shape(sub)
    if n == 0:
        return True
    if not (n + 1) / 2 <= r <= n:
        raise RangeError(f"r must satisfy (n+1)/2 <= r <= n, got r={r}, n={n}")
    if a is None:
        a = canonical_generator(p, n, r)
    mod = p ** (n - r + 1)
    qbar = p ** (n - r) * (p - 1) // 2
    if a % p == 0 or _class_order(a, mod) != qbar:
        raise ValueError(f"{a} does not generate (Z/{mod})^*/(+-1)")
    G = sub.ambient
    kill = p ** (n - r + 1)
    for x in sub.elements():
        if any(G.scale(kill, x)):
            continue
        before = psi(x, p, n, r, a)
        after = psi(G.scale(a, x), p, n, r, a)
        if after != before[-1:] + before[:-1]:
            return False
    return True


def metabolizer_report(M: Metabolizer) -> dict:
    """Serializable summary: generators, k-profile, ℓ and the certificate."""
    cert = M.certificate or is_metabolizer(M.ambient_form, M.subgroup)
    report = {
        "generators": [list(g) for g in M.generators],
        "order": M.subgroup.order,
        "certificate": {
            "is_metabolizer": cert.is_metabolizer,
            "order_ok": cert.order_ok,
            "isotropic": cert.isotropic,
            "quotient_ok": cert.quotient_ok,
        },
    }
    if cert.witness is not None:
        x, y, v = cert.witness
        report["certificate"]["witness"] = {"x": list(x), "y": list(y), "value": str(v)}
    G = M.subgroup.ambient
    if G.is_homogeneous() and not G.is_trivial():
        profile = k_profile(M)
        report["k_profile"] = list(profile.counts)
        report["ell"] = profile.ell
    return report
