"""Smooth speed-transfer protocols for the damped linear drive xdot + x = u.

Two families of solutions to the same steering problem, cross-validated
against each other:

* basis-function trajectory design (:mod:`lincontrol.sta`): postulate
  ``x(t)`` in a polynomial, trigonometric, or exponential family, eliminate
  the boundary conditions exactly, and minimise the running cost as an
  explicit quadratic form;
* Pontryagin optimal control (:mod:`lincontrol.oct`): the impulsive global
  optimum, the energy-regularized linear-quadratic solver at any boundary
  order, and the overflow-safe closed form of the first-order solution.
"""

__version__ = "0.1.0"

from .model import (
    BoundaryReport,
    ControlProblem,
    CostBreakdown,
    Impulse,
    InvalidOrder,
    ProtocolSolution,
    StateSample,
    Trajectory,
    cost_functional,
    csv_text,
    sample_table,
    verify_boundaries,
    write_csv,
)
from .numerics import (
    ComplexSpectrum,
    DefectiveMatrix,
    NoConvergence,
    NonFiniteSample,
    NotPositiveDefinite,
    NumericsError,
    Overflow,
    SingularMatrix,
    eigendecompose,
    integrate,
    mat_exp,
    minimize_quadratic,
    solve_linear,
)
from .oct import (
    EquivalenceReport,
    LambdaOutOfRange,
    LqProblem,
    PontryaginFlow,
    ShootingSingular,
    build_lq,
    equivalence_sta_regular,
    hamiltonian_flow,
    regular_cost_analytic,
    regular_order1_analytic,
    shoot_adjoint_block,
    singular_consistency_check,
    singular_solution,
    solve_regular,
)
from .sta import (
    AnsatzFamily,
    DegenerateBasis,
    GramForm,
    assemble_gram,
    build_exponential,
    build_polynomial,
    build_trigonometric,
    solve_sta,
)

__all__ = [
    "__version__",
    "AnsatzFamily",
    "BoundaryReport",
    "ComplexSpectrum",
    "ControlProblem",
    "CostBreakdown",
    "DefectiveMatrix",
    "DegenerateBasis",
    "EquivalenceReport",
    "GramForm",
    "Impulse",
    "InvalidOrder",
    "LambdaOutOfRange",
    "LqProblem",
    "NoConvergence",
    "NonFiniteSample",
    "NotPositiveDefinite",
    "NumericsError",
    "Overflow",
    "PontryaginFlow",
    "ProtocolSolution",
    "ShootingSingular",
    "SingularMatrix",
    "StateSample",
    "Trajectory",
    "assemble_gram",
    "build_exponential",
    "build_lq",
    "build_polynomial",
    "build_trigonometric",
    "cost_functional",
    "csv_text",
    "eigendecompose",
    "equivalence_sta_regular",
    "hamiltonian_flow",
    "integrate",
    "mat_exp",
    "minimize_quadratic",
    "regular_cost_analytic",
    "regular_order1_analytic",
    "sample_table",
    "shoot_adjoint_block",
    "singular_consistency_check",
    "singular_solution",
    "solve_linear",
    "solve_regular",
    "solve_sta",
    "verify_boundaries",
    "write_csv",
]
