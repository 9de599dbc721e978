"""Exact reduced forms of higher variational equations of Hamiltonian systems
and an order-by-order test for abelian differential Galois Lie algebras."""

from .constants import Const, ConstantTower
from .errors import MRSError
from .lie import (adjoint_action, envelope_dimension, lie_closure, off_diagonal_algebra,
                  split_diag_sub, wei_norman)
from .matrix import Matrix, joint_characteristic_spaces, kernel_basis, minimal_polynomial
from .ode import (CancelToken, DiffOperator, parametrized_first_order, rational_solutions)
from .ratfunc import RatFunc, RationalFunctionField
from .reducer import (ABELIAN_UP_TO, OBSTRUCTION, Verdict, full_reduce, mrs_driver,
                      reduce_order, simplified_check, stopping_test)
from .variational import (Gauge, HamiltonianSystem, build_lve, first_variational,
                          gauge_apply, parse_curve, sym_power, sym_power_gauge,
                          verify_gauge)

__version__ = "0.1.0"
