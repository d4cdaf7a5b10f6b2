"""Forward modeling and inversion for the acoustic-gravitational system.

Thin Python facade over the compiled extension. Installed wheels carry the
extension inside the package; in a plain CMake build tree the module sits on
sys.path next to the package.
"""

try:
    from ._gravac import *  # noqa: F401,F403
    from ._gravac import __doc__ as _ext_doc
except ImportError:  # build-tree layout
    from _gravac import *  # noqa: F401,F403
    from _gravac import __doc__ as _ext_doc

__all__ = [
    "Side",
    "Medium",
    "homogeneous_medium",
    "layered_ball",
    "halfspace_medium",
    "GravityField",
    "solve_phi_radial",
    "solve_phi_grid",
    "selfgrav_symbol_b0",
    "trace_ray",
    "geodesic_distance",
    "InterfaceSides",
    "principal_R",
    "principal_T",
    "brewster_slowness",
    "reflect_amp_minus1",
    "transfer_matrix_R",
    "recover_order0",
    "carleman_ratio",
    "cli_run",
    "run_acceptance",
]
