"""Exact Hecke eigensystems for Gamma_0(N) in SL_3(Z) and the 2-adic checks around them."""

from __future__ import annotations

from .cyclolinalg import GaussRat, SparseMat, format_gauss, parse_gauss
from .errors import (AnchorNotFound, BudgetExceeded, CacheCorrupt, Hecke3Error, InconsistentInputs,
                     InsufficientPrecision, NilpotentRisk, NonUnimodular, NotMember,
                     ProbeRankDeficient, ReductionStall)
from .heckeops import (CosetDecomposition, EigenReport, HeckeMatrix, eigenreport,
                       enumerate_decomposition, hecke_matrix, parse_alpha, verify_decomposition)
from .projspace import Level, ProjPoint, PointTable, enumerate_points, lift_point, normalize
from .relspace import ModelBasis, check_membership, solve_model
from .symreduce import ModularSymbol, SymbolSum, pairing, reduce

__version__ = "0.1.0"

__all__ = [
    "AnchorNotFound", "BudgetExceeded", "CacheCorrupt", "CosetDecomposition", "EigenReport",
    "GaussRat", "Hecke3Error", "HeckeMatrix", "InconsistentInputs", "InsufficientPrecision",
    "Level", "ModelBasis", "ModularSymbol", "NilpotentRisk", "NonUnimodular", "NotMember",
    "PointTable", "ProbeRankDeficient", "ProjPoint", "ReductionStall", "SparseMat", "SymbolSum",
    "check_membership", "eigenreport", "enumerate_decomposition", "enumerate_points",
    "format_gauss", "hecke_matrix", "lift_point", "normalize", "pairing", "parse_alpha",
    "parse_gauss", "reduce", "solve_model", "verify_decomposition",
]
