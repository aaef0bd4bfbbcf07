"""Exact Fourier expansions of theta blocks, their lattice lifts, and Borcherds products."""

from .lattice import DualVector, GramLattice, check_embedding, load_lattice, named_lattice
from .qseries import FourierSeries, PrecisionError, eta, eta_power, mul, specialize, theta_odd
from .blocks import (
    ThetaBlockSpec,
    block_report,
    build_block,
    build_corollary_blocks,
    build_family_wt2,
    build_family_wt3,
    holomorphy_check,
    lattice_block,
    parse_block,
    riemann_theta_relation_check,
)
from .hecke import apply_T_minus
from .lifts import BorcherdsData, FJExpansion, borcherds_data, borcherds_expand, divisor_multiplicity, grit, quotient_psi
from .weil import (
    WeilRep,
    od_class_invariance,
    orbit_invariance_report,
    reconstruct,
    theta_decompose,
    weil_matrices,
)

__version__ = "0.1.0"
