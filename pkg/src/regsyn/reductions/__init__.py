"""Generators for the undecidable classes, their candidate checkers and a
bounded semi-decision driver."""

from .bounded import CHECKED_SOURCES, bounded_solve, euf_oracle, oracle_for
from .bv import CfgPair, check_bv_candidate, gen_cfg_bv, parse_cfg_pair
from .pcp import (
    PcpInstance,
    check_pcp_candidate,
    counter_model_holds,
    decode_indices,
    gen_pcp_arrays,
    gen_pcp_regular,
    gen_pcp_tree,
    gen_pcp_wellformed,
    pcp_term,
)
from .sreu import RigidEquation, SreuInstance, gen_sreu, parse_sreu, sreu_candidate

__all__ = [
    "CHECKED_SOURCES",
    "CfgPair",
    "PcpInstance",
    "RigidEquation",
    "SreuInstance",
    "bounded_solve",
    "check_bv_candidate",
    "check_pcp_candidate",
    "counter_model_holds",
    "decode_indices",
    "euf_oracle",
    "gen_cfg_bv",
    "gen_pcp_arrays",
    "gen_pcp_regular",
    "gen_pcp_tree",
    "gen_pcp_wellformed",
    "gen_sreu",
    "oracle_for",
    "parse_cfg_pair",
    "parse_sreu",
    "pcp_term",
    "sreu_candidate",
]
