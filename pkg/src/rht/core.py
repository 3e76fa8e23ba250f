"""Hartley transform kernels: the real DHT matrix, its integer rounding,
direct and weak-inverse application, and Fourier spectrum estimation.

The rounded matrix has every entry in {-1, 0, 1}, so applying it needs no
general multiplications; the only product ever taken is the single 1/sqrt(n)
scale factor in symmetric normalization.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass

import numpy as np

__all__ = [
    "Normalization",
    "Spectrum",
    "TernaryMatrix",
    "ScaledTransform",
    "cas",
    "build_dht_matrix",
    "build_rht_matrix",
    "rounded_transform",
    "apply_direct",
    "apply_dht",
    "weak_inverse_apply",
    "reconstruction_error",
    "fourier_estimate",
]

# Rounding margin guard: |cas| values provably never fall on a .5 tie, so any
# value this close to 0.5 means a numerical problem, not a legitimate tie.
TIE_GUARD = 1e-9


class Normalization(enum.Enum):
    """Scaling convention carried by every transform and spectrum.

    UNSCALED applies the raw matrix; SYMMETRIC multiplies each application
    by n**-0.5, which makes the exact DHT an involution.  The tag is never
    implicit and mixing tags raises.
    """

    UNSCALED = "unscaled"
    SYMMETRIC = "symmetric"


def cas(x):
    """cos(x) + sin(x), the Hartley kernel.  Accepts scalars or arrays."""
    return np.cos(x) + np.sin(x)


def _cas_table(n: int) -> np.ndarray:
    """cas(2*pi*m/n) for m = 0..n-1, the only kernel values an order-n
    transform can contain (angles reduce mod n in the exponent product)."""
    m = np.arange(n)
    return cas(2.0 * np.pi * m / n)


def _round_half_away(x: np.ndarray) -> np.ndarray:
    # np.round ties to even; the construction rule is half away from zero.
    return np.sign(x) * np.floor(np.abs(x) + 0.5)


@dataclass(frozen=True)
class TernaryMatrix:
    """Integer rounding of the order-n DHT matrix.

    Entries lie in {-1, 0, 1}, the matrix is symmetric, and row 0 and
    column 0 are all ones.  Violations raise at construction.
    """

    order: int
    entries: np.ndarray

    def __post_init__(self):
        e = self.entries
        if e.shape != (self.order, self.order):
            raise ValueError("entries shape does not match order")
        if not np.isin(e, (-1, 0, 1)).all():
            raise ValueError("entries outside {-1, 0, 1}")
        if not np.array_equal(e, e.T):
            raise ValueError("rounded Hartley matrix must be symmetric")
        if not (e[0] == 1).all() or not (e[:, 0] == 1).all():
            raise ValueError("first row and column must be all ones")
        e.setflags(write=False)


@dataclass(frozen=True)
class Spectrum:
    """Transform coefficients plus the normalization they were produced under."""

    coefficients: np.ndarray
    normalization: Normalization

    def __post_init__(self):
        object.__setattr__(
            self, "coefficients", np.asarray(self.coefficients, dtype=np.float64)
        )

    def __len__(self):
        return len(self.coefficients)


@dataclass(frozen=True)
class ScaledTransform:
    """A ternary transform matrix bound to a normalization tag."""

    matrix: TernaryMatrix
    normalization: Normalization

    @property
    def order(self) -> int:
        return self.matrix.order


def build_dht_matrix(
    n: int, normalization: Normalization = Normalization.UNSCALED
) -> np.ndarray:
    """Dense DHT matrix with entries cas(2*pi*i*k/n).

    Args:
        n: transform order, n >= 1.
        normalization: UNSCALED for raw kernel values, SYMMETRIC to fold
            the 1/sqrt(n) factor into the entries.

    Returns:
        (n, n) float array, symmetric.
    """
    if n < 1:
        raise ValueError("order must be positive")
    idx = np.arange(n, dtype=np.int64)
    table = _cas_table(n)
    h = table[np.outer(idx, idx) % n]
    if normalization is Normalization.SYMMETRIC:
        h = h / math.sqrt(n)
    return h

def build_rht_matrix(n: int) -> TernaryMatrix:
    """Round the order-n DHT matrix entrywise to the nearest integer.

    Rounding is half away from zero; actual ties cannot occur because
    |cas| of a rational angle never equals 1/2 exactly.  A guard asserts
    every kernel value stays clear of the tie by at least TIE_GUARD.
    """
    if n < 1:
        raise ValueError("order must be positive")
    table = _cas_table(n)
    margin = np.abs(np.abs(table) - 0.5).min()
    if margin < TIE_GUARD:
        raise AssertionError(
            f"kernel value within {TIE_GUARD} of the rounding tie at n={n}"
        )
    idx = np.arange(n, dtype=np.int64)
    rounded = _round_half_away(table)[np.outer(idx, idx) % n].astype(np.int64)
    return TernaryMatrix(n, rounded)


def rounded_transform(n: int, normalization: Normalization) -> ScaledTransform:
    """Convenience constructor pairing build_rht_matrix with a tag."""
    return ScaledTransform(build_rht_matrix(n), normalization)


def _as_signal(v, n: int) -> np.ndarray:
    v = np.asarray(v, dtype=np.float64)
    if v.ndim != 1 or len(v) != n:
        raise ValueError(f"signal length {v.shape} does not match order {n}")
    if not np.isfinite(v).all():
        raise ValueError("signal contains non-finite samples")
    return v


def _ternary_product(entries: np.ndarray, v: np.ndarray) -> np.ndarray:
    """Matrix-vector product of a ternary matrix using additions only.

    Each output coefficient is a sum of +v[i] and -v[i] terms selected by
    the matrix row; no entrywise products are formed.
    """
    out = np.empty(len(entries))
    for k, row in enumerate(entries):
        out[k] = v[row == 1].sum() - v[row == -1].sum()
    return out


def apply_direct(t: ScaledTransform, v) -> Spectrum:
    """Forward rounded transform of a signal.

    The accumulation uses additions and subtractions over the ternary
    entries only; in SYMMETRIC mode the result is scaled by n**-0.5 once.
    """
    v = _as_signal(v, t.order)
    coeffs = _ternary_product(t.matrix.entries, v)
    if t.normalization is Normalization.SYMMETRIC:
        coeffs = coeffs / math.sqrt(t.order)
    return Spectrum(coeffs, t.normalization)


def apply_dht(
    m: np.ndarray, v, normalization: Normalization = Normalization.UNSCALED
) -> Spectrum:
    """Reference DHT application (dense real product).

    The tag must state the normalization the matrix was built with; it is
    carried onto the spectrum unchanged.
    """
    n = len(m)
    v = _as_signal(v, n)
    return Spectrum(np.asarray(m, dtype=np.float64) @ v, normalization)


def weak_inverse_apply(t: ScaledTransform, s: Spectrum) -> np.ndarray:
    """Apply the symmetric transform a second time to invert approximately.

    The scaled rounded matrix is its own weak inverse: the round trip
    differs from the original signal by (H_s^2 - I) v.  Weak inversion is
    only defined for SYMMETRIC normalization; unscaled input raises.
    """
    if t.normalization is not Normalization.SYMMETRIC:
        raise ValueError("weak inversion requires SYMMETRIC normalization")
    if s.normalization is not Normalization.SYMMETRIC:
        raise ValueError(
            f"spectrum tagged {s.normalization.value}; expected symmetric"
        )
    return apply_direct(t, s.coefficients).coefficients


def reconstruction_error(t: ScaledTransform, v) -> np.ndarray:
    """(H_s^2 - I) v, the weak-inverse round-trip error for the signal.

    Computed from the exact integer square of the ternary matrix divided
    by n, so the only floating step is the final scale and subtraction.
    """
    if t.normalization is not Normalization.SYMMETRIC:
        raise ValueError("reconstruction error is defined for SYMMETRIC mode")
    v = _as_signal(v, t.order)
    e = t.matrix.entries
    # float matmul is exact here: all partial sums are integers below 2**53
    square = (e.astype(np.float64) @ e.astype(np.float64)).astype(np.int64)
    return (square @ v) / t.order - v


def fourier_estimate(s: Spectrum) -> np.ndarray:
    """Fourier spectrum from a Hartley spectrum via the even/odd split.

    F_k = E_k - 1j*O_k with E_k = (V_k + V_{n-k mod n})/2 and
    O_k = (V_k - V_{n-k mod n})/2.  Fed an exact DHT spectrum this equals
    the DFT of the original signal; fed a rounded spectrum it is the
    fast rough estimate.
    """
    v = s.coefficients
    n = len(v)
    rev = v[(-np.arange(n)) % n]
    even = (v + rev) / 2.0
    odd = (v - rev) / 2.0
    return even - 1j * odd
