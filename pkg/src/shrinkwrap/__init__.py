"""Desk-scale laboratory for the combinatorics of shrink wrapping.

Everything in the package is finitely represented and decidable: points are
ultimately periodic sequences, trees carry finitely many branches, and every
verifier answers by exhaustive scan of a computable bound.
"""

from shrinkwrap.core import (
    ZERO,
    BranchTree,
    CoderConfig,
    DEFAULT_CODERS,
    Node,
    UPReal,
    bt_intersect,
    bt_separation_level,
    growth,
    pair_index,
    pair_of,
    shape_code,
    up_canonical,
    up_compare,
    up_equal,
    up_eval,
    up_first_diff,
)
from shrinkwrap.domination import (
    DominationReport,
    DominationRow,
    big_t,
    check_domination,
    check_hypotheses_simple,
    exit_level,
    fx,
    g_full,
    g_simple,
    sep_bound,
)
from shrinkwrap.sacks import (
    FusionReport,
    HorizonPerfectTree,
    RMap,
    fusion_intersect,
    fusion_union,
    hpt_branching_nodes,
    hpt_leq_n,
    hpt_stem,
    stem_or_path,
    verify_fusion_helper,
)
from shrinkwrap.silver import (
    BruteSummary,
    GroundUniverse,
    ObstructionReport,
    SilverTree,
    adversarial_pair,
    adversarial_sequence,
    brute_obstruction,
    flatten,
    homogenize,
    obstruct,
    replace_below,
    sv_leftmost,
    sv_validate,
)
from shrinkwrap.wrapper import (
    PairVerdict,
    ShrinkWrapper,
    TreeFamily,
    Violation,
    WrapperReport,
    WrapperScope,
    build_padded_wrapper,
    build_wrapper,
    classify_pair,
    full_scope,
    separate_stems,
    verify_condition4,
    verify_wrapper,
)

__all__ = [
    "ZERO",
    "BranchTree",
    "BruteSummary",
    "CoderConfig",
    "DEFAULT_CODERS",
    "DominationReport",
    "DominationRow",
    "FusionReport",
    "GroundUniverse",
    "HorizonPerfectTree",
    "Node",
    "ObstructionReport",
    "PairVerdict",
    "RMap",
    "ShrinkWrapper",
    "SilverTree",
    "TreeFamily",
    "UPReal",
    "Violation",
    "WrapperReport",
    "WrapperScope",
    "adversarial_pair",
    "adversarial_sequence",
    "big_t",
    "brute_obstruction",
    "bt_intersect",
    "bt_separation_level",
    "build_padded_wrapper",
    "build_wrapper",
    "check_domination",
    "check_hypotheses_simple",
    "classify_pair",
    "exit_level",
    "flatten",
    "full_scope",
    "fusion_intersect",
    "fusion_union",
    "fx",
    "g_full",
    "g_simple",
    "growth",
    "homogenize",
    "hpt_branching_nodes",
    "hpt_leq_n",
    "hpt_stem",
    "obstruct",
    "pair_index",
    "pair_of",
    "replace_below",
    "separate_stems",
    "sep_bound",
    "shape_code",
    "stem_or_path",
    "sv_leftmost",
    "sv_validate",
    "up_canonical",
    "up_compare",
    "up_equal",
    "up_eval",
    "up_first_diff",
    "verify_condition4",
    "verify_fusion_helper",
    "verify_wrapper",
]
