"""Constant-coefficient forms on C^n and numerical checks of mixed Hodge-Riemann,
Hodge index and Khovanskii-Teissier type statements."""
from .config import DEFAULT, Tolerances
from .errors import (GenerationError, HypothesisError, NoWitnessError, StageSolveError,
                     UnsatisfiableSpec)
from .exterior import (BigradedForm, HermitianCoeff, as_form, as_hermitian, basis, conjugate,
                       dimension, from_hermitian, hermitian_power, kahler_form, power,
                       to_hermitian, top_coefficient, wedge, wedge_all)
from .hodge import (HRSetting, LefschetzDecomposition, SignatureReport, hard_lefschetz_verify,
                    hodge_index_signature, hodge_index_verify, hodge_riemann_verify,
                    lefschetz_decompose, primitive_basis)
from .hyperbolicity import (LinePolynomial, PositivityClass, TowerSpec, build_tower, cone_member,
                            cone_member_by_roots, eigen_signature, garding_inequality_check,
                            is_hyperbolic_at, is_m_positive, line_coefficients, polarized)
from .kt import (KTReport, KTSetting, TorusModel, find_witness, higher_rank_kt, hodge_condition,
                 kt_difference_form, kt_rank1, lem_eq_verify, log_concavity,
                 null_class_equivalence, witness_construct)

__version__ = "0.1.0"
