"""Add-only fast evaluation of the rounded transform for power-of-two orders.

The rounded matrix satisfies the same even/odd row identities as the exact
kernel, and they survive rounding because rounding commutes with negation:

    h(2m, k)       = h_{n/2}(m, k mod n/2)
    h(2m+1, k+n/2) = -h(2m+1, k)

so even outputs are the half-size transform of (low + high) and odd outputs
are a ternary block G applied to (low - high).  G is applied sparsely, one
copy-with-sign plus additions per row, which keeps the multiplication count
at zero on every path.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .core import Normalization, Spectrum, build_rht_matrix

__all__ = ["OpCount", "FastPlan", "plan", "fast_rht", "count_model"]


@dataclass(frozen=True)
class OpCount:
    additions: int
    multiplications: int


class FastPlan:
    """Precomputed recursion for one power-of-two order.

    Immutable after construction and shareable; holds per-row index arrays
    of the odd-output block (positive and negative positions) plus the
    half-size sub-plan.
    """

    __slots__ = ("order", "sub", "pos_idx", "neg_idx", "_block_adds")

    def __init__(self, order: int):
        if order < 1 or order & (order - 1):
            raise ValueError(f"fast plan needs a power-of-two order, got {order}")
        self.order = order
        if order == 1:
            self.sub = None
            self.pos_idx = self.neg_idx = None
            self._block_adds = 0
            return
        half = order // 2
        g = build_rht_matrix(order).entries[1::2, :half]
        self.pos_idx = [np.nonzero(row == 1)[0] for row in g]
        self.neg_idx = [np.nonzero(row == -1)[0] for row in g]
        # first nonzero of a row is a signed copy, the rest are adds;
        # rows are never empty since column 0 of G is all ones
        self._block_adds = sum(
            len(p) + len(q) - 1 for p, q in zip(self.pos_idx, self.neg_idx)
        )
        self.sub = FastPlan(half)


def plan(n: int) -> FastPlan:
    """Build the even/odd decomposition plan for order n (a power of two)."""
    return FastPlan(n)


def _execute(p: FastPlan, v: np.ndarray, out: np.ndarray, counter: list) -> None:
    n = p.order
    if n == 1:
        out[0] = v[0]
        return
    half = n // 2
    low, high = v[:half], v[half:]
    s = low + high
    d = low - high
    counter[0] += n  # one butterfly stage: half adds plus half subtracts
    even = np.empty(half)
    _execute(p.sub, s, even, counter)
    out[0::2] = even
    block_out = out[1::2]
    for r in range(half):
        pos, neg = p.pos_idx[r], p.neg_idx[r]
        block_out[r] = d[pos].sum() - d[neg].sum()
    counter[0] += p._block_adds


def fast_rht(p: FastPlan, v) -> tuple[Spectrum, OpCount]:
    """Fast unscaled rounded transform with instrumented operation counts.

    The spectrum equals the direct ternary product exactly (bit-exact for
    integer inputs); the count of executed additions/subtractions is
    tallied as the plan runs and multiplications are structurally zero.
    """
    v = np.asarray(v, dtype=np.float64)
    if v.ndim != 1 or len(v) != p.order:
        raise ValueError(f"input length {v.shape} does not match order {p.order}")
    out = np.empty(p.order)
    counter = [0]
    _execute(p, v, out, counter)
    return Spectrum(out, Normalization.UNSCALED), OpCount(counter[0], 0)


def count_model(n: int) -> OpCount:
    """Predicted operation counts for order n without executing the plan.

    additions(1) = 0 and
    additions(n) = n + additions(n/2) + sum over G rows of (nonzeros - 1),
    the butterfly stage plus the recursive half plus the sparse odd block.
    """
    if n < 1 or n & (n - 1):
        raise ValueError(f"count model needs a power-of-two order, got {n}")
    adds = 0
    while n > 1:
        half = n // 2
        g = build_rht_matrix(n).entries[1::2, :half]
        row_nnz = (g != 0).sum(axis=1)
        adds += n + int((row_nnz - 1).sum())
        n = half
    return OpCount(adds, 0)
