"""Kendall's tau-b and the overall / topic-by-topic correlation of score matrices."""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from ..exceptions import ContractError, DegenerateInputError


@dataclass(frozen=True)
class KendallResult:
    tau: float
    concordant: int
    discordant: int
    ties_x: int  # pairs tied in x only
    ties_y: int  # pairs tied in y only


def kendall_tau_b(x, y) -> KendallResult:
    """Kendall's tau-b with explicit pair counts (quadratic pair scan)."""
    x = np.asarray(x, dtype=float)
    y = np.asarray(y, dtype=float)
    if x.shape != y.shape or x.ndim != 1:
        raise ContractError("x and y must be 1-d sequences of equal length")
    if x.size < 2:
        raise ContractError("need at least two observations")
    i, j = np.triu_indices(x.size, k=1)
    dx = np.sign(x[i] - x[j])
    dy = np.sign(y[i] - y[j])
    prod = dx * dy
    concordant = int(np.sum(prod > 0))
    discordant = int(np.sum(prod < 0))
    ties_x = int(np.sum((dx == 0) & (dy != 0)))
    ties_y = int(np.sum((dy == 0) & (dx != 0)))
    denom = (concordant + discordant + ties_x) * (concordant + discordant + ties_y)
    if denom == 0:
        raise DegenerateInputError("all values are tied in at least one sequence")
    tau = (concordant - discordant) / math.sqrt(denom)
    return KendallResult(max(-1.0, min(1.0, tau)), concordant, discordant, ties_x, ties_y)


def _cells(m):
    return np.asarray(m.cells if hasattr(m, "cells") else m, dtype=float)


def overall_correlation(a, b) -> float:
    """tau-b between the system rankings induced by the column means."""
    ca, cb = _cells(a), _cells(b)
    if ca.shape != cb.shape:
        raise ContractError(f"matrices differ in shape: {ca.shape} vs {cb.shape}")
    return kendall_tau_b(np.round(ca.mean(axis=0), 8), np.round(cb.mean(axis=0), 8)).tau


def topicwise_correlation(a, b) -> np.ndarray:
    """Row-by-row tau-b; rows with no ordering information are NaN."""
    ca, cb = _cells(a), _cells(b)
    if ca.shape != cb.shape:
        raise ContractError(f"matrices differ in shape: {ca.shape} vs {cb.shape}")
    out = np.full(ca.shape[0], np.nan)
    for r in range(ca.shape[0]):
        try:
            out[r] = kendall_tau_b(ca[r], cb[r]).tau
        except DegenerateInputError:
            pass
    return out
