"""Exact obstructions in the rational homology cobordism group from linking forms and ρ-invariants."""

from .abelian import (
    EchelonProfile,
    FiniteAbelianGroup,
    Subgroup,
    echelon_generators,
    enumerate_subgroups_of_order,
    from_cyclic_orders,
    invariant_factors,
    primary_part,
    quotient_invariants,
    smith_normal_form,
)
from .dfun import DFunction, extend, oracle_verify_proposition, validate
from .exact import Residue, as_rational, format_rational, mod_inverse, normalize_mod, padic_valuation
from .linking import (
    LinkingForm,
    QuadraticRefinement,
    diagonal_form,
    direct_sum,
    linking_from_presentation,
    negate,
    polarize,
    quadratic_refinement,
    rho_surgery,
    standard_cyclic_form,
)
from .metab import (
    build_z,
    enumerate_metabolizers,
    h_polynomial,
    ideal_is_full,
    is_metabolizer,
    k_profile,
    psi,
    tau_shift_check,
)
from .obstruct import (
    KnotRecord,
    ManifoldDescriptor,
    Verdict,
    check_independence,
    check_knot_family,
    check_knot_sum,
    check_surgery_infinite_order,
    check_theorem_main,
    connected_sum,
    reverse,
    square_order_test,
    validate_d_axioms,
)

__version__ = "0.1.0"
