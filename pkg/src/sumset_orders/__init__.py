"""Finite sets whose iterated sumset sizes follow prescribed relative orders.

Exact sumsets over the integers and over (Z/pZ)^t, the X/Y/Z building
blocks with closed-form sizes, the product assembly and its embeddings,
the multiscale exponent calculus, and independent oracles.
"""

from .assembly import (AssemblyPlan, Certificate, GroupReduction, GroupSpec, construct_extension,
                       construct_int, construct_modp, embed_factors, freiman_embed, make_plan,
                       materialize_product, product_sizes, reduce_group, select_multiplicities)
from .blocks import (BlockFamily, XBlockParams, YBlockParams, ZBlockParams, choose_w_extension,
                     choose_X_family, choose_Y_family, choose_Z_family, materialize_X,
                     materialize_Y, materialize_Z, size_X_hfold, size_Y_hfold, size_Z_hfold,
                     verify_block_family)
from .core import (IntegerSet, ModpVectorSet, PointSet, cartesian_product, dilate, hfold_int,
                   hfold_modp, hfold_points, matches_pattern, minkowski_sum, minkowski_sum_modp,
                   relative_order)
from .errors import BudgetExceeded, DomainError, SumsetError
from .multiscale import (GapPartition, ScaleSystem, build_multiscale_set, choose_scale_system,
                         construct_multiscale, empirical_lemma43, exponent_E, full_expansion_check,
                         gap_classes, union_sumset_bounds)
from .verify import SizeSequence, certify, khovanskii_probe, oracle_hfold

__version__ = "0.1.0"

__all__ = [name for name in dir() if not name.startswith("_")]
