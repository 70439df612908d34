"""Deciders for the studied monotone graph properties."""

from ..graph import UndirectedGraph
from .connectivity import articulation_point, is_connected, is_k_connected, min_degree
from .hamilton import has_hamilton_cycle
from .matching import has_perfect_matching, maximum_matching
from .oracle import ORACLE_MAX_N, ORACLE_MAX_N_ROBUST, oracle_check
from .robustness import is_k_robust
from .types import Budget, CheckOutcome, Kind, PropertySpec, Verdict
from .verify import verify_outcome


def check(g: UndirectedGraph, spec: PropertySpec, budget: Budget | None = None) -> CheckOutcome:
    """Dispatch ``spec`` to its checker."""
    kind = spec.kind
    if kind is Kind.MIN_DEGREE:
        d = min_degree(g)
        if d >= spec.k:
            return CheckOutcome.yes({"min_degree": d})
        return CheckOutcome.no({"min_degree": d, "node": int(g.degrees.argmin())})
    if kind is Kind.K_CONNECTIVITY:
        return is_k_connected(g, spec.k)
    if kind is Kind.K_ROBUSTNESS:
        return is_k_robust(g, spec.k, budget)
    if kind is Kind.HAMILTON_CYCLE:
        return has_hamilton_cycle(g, budget)
    return has_perfect_matching(g)


__all__ = [
    "Budget", "CheckOutcome", "Kind", "PropertySpec", "Verdict",
    "articulation_point", "check", "has_hamilton_cycle", "has_perfect_matching",
    "is_connected", "is_k_connected", "is_k_robust", "maximum_matching", "min_degree",
    "oracle_check", "verify_outcome", "ORACLE_MAX_N", "ORACLE_MAX_N_ROBUST",
]
