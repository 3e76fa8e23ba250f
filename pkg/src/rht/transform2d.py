"""Two-dimensional rounded transform of square images.

The forward path builds a temporary matrix T = K A K (K the ternary
matrix, applied to rows and columns) and combines index-reversed copies,
B = (T + T_cols + T_rows - T_both) / 2.  The same combination with K/n on
both sides gives the weak inverse; round trips are exact only at the
involution orders 1, 2 and 4, and PSNR measures the damage elsewhere.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .core import build_rht_matrix

__all__ = [
    "GrayImage",
    "CoefficientGrid",
    "RoundTrip",
    "temp_matrix",
    "flip_cols",
    "flip_rows",
    "flip_both",
    "forward_2d",
    "weak_inverse_2d",
    "exact_inverse_2d",
    "psnr",
    "roundtrip_report",
]


def _square_float(values, what: str) -> np.ndarray:
    arr = np.asarray(values, dtype=np.float64)
    if arr.ndim != 2 or arr.shape[0] != arr.shape[1]:
        raise ValueError(f"{what} must be a square 2-D grid, got shape {arr.shape}")
    if arr.shape[0] == 0:
        raise ValueError(f"{what} must be non-empty")
    if not np.all(np.isfinite(arr)):
        raise ValueError(f"{what} contains non-finite values")
    arr = arr.copy()
    arr.setflags(write=False)
    return arr


@dataclass(frozen=True)
class GrayImage:
    """Square grayscale raster; 0..255 on input, real-valued after transforms."""

    pixels: np.ndarray

    def __post_init__(self):
        object.__setattr__(self, "pixels", _square_float(self.pixels, "image"))

    @property
    def order(self) -> int:
        return self.pixels.shape[0]


@dataclass(frozen=True)
class CoefficientGrid:
    """Square grid of 2-D transform coefficients."""

    values: np.ndarray

    def __post_init__(self):
        object.__setattr__(self, "values", _square_float(self.values, "grid"))

    @property
    def order(self) -> int:
        return self.values.shape[0]


def _as_image(a) -> GrayImage:
    return a if isinstance(a, GrayImage) else GrayImage(a)


def _as_grid(t) -> CoefficientGrid:
    return t if isinstance(t, CoefficientGrid) else CoefficientGrid(t)


def _reversal(n: int) -> np.ndarray:
    # index map i -> (n - i) mod n; position 0 is fixed
    return (-np.arange(n)) % n


def temp_matrix(a) -> CoefficientGrid:
    """T = K A K: the 1-D transform of every row, then of every column."""
    a = _as_image(a)
    k = build_rht_matrix(a.order).entries.astype(np.float64)
    return CoefficientGrid(k @ a.pixels @ k)


def flip_cols(t) -> CoefficientGrid:
    t = _as_grid(t)
    return CoefficientGrid(t.values[:, _reversal(t.order)])


def flip_rows(t) -> CoefficientGrid:
    t = _as_grid(t)
    return CoefficientGrid(t.values[_reversal(t.order), :])


def flip_both(t) -> CoefficientGrid:
    t = _as_grid(t)
    rev = _reversal(t.order)
    return CoefficientGrid(t.values[np.ix_(rev, rev)])


def _flip_combination(x: np.ndarray) -> np.ndarray:
    n = x.shape[0]
    rev = _reversal(n)
    return 0.5 * (x + x[:, rev] + x[rev, :] - x[np.ix_(rev, rev)])


def forward_2d(a) -> CoefficientGrid:
    """B = (T + flip_cols(T) + flip_rows(T) - flip_both(T)) / 2."""
    a = _as_image(a)
    return CoefficientGrid(_flip_combination(temp_matrix(a).values))


def weak_inverse_2d(b) -> GrayImage:
    """Approximate reconstruction using K/n on both sides plus the flips."""
    b = _as_grid(b)
    n = b.order
    k = build_rht_matrix(n).entries.astype(np.float64)
    t = (k @ b.values @ k) / float(n * n)
    return GrayImage(_flip_combination(t))


def exact_inverse_2d(b) -> GrayImage:
    """Reconstruction through the exact rational inverse of K.

    The flip combination is an involution, so it undoes itself; what
    remains is stripping K from both sides.  Evaluated in float64, good
    to ~1e-9 at the orders where the inverse entries stay moderate.
    """
    from .exact import exact_inverse

    b = _as_grid(b)
    inv = exact_inverse(b.order)
    inv_f = np.array(inv.numerators, dtype=np.float64) / float(inv.denominator)
    t = _flip_combination(b.values)
    return GrayImage(inv_f @ t @ inv_f)


def psnr(original, recovered) -> float:
    """20 log10(255 / RMSE); +inf when the images agree exactly."""
    a = _as_image(original).pixels
    b = _as_image(recovered).pixels
    if a.shape != b.shape:
        raise ValueError(f"image orders differ: {a.shape[0]} vs {b.shape[0]}")
    rmse = math.sqrt(float(np.mean((a - b) ** 2)))
    if rmse == 0.0:
        return math.inf
    return 20.0 * math.log10(255.0 / rmse)


@dataclass(frozen=True)
class RoundTrip:
    coefficients: CoefficientGrid
    recovered: GrayImage
    psnr_db: float


def roundtrip_report(a) -> RoundTrip:
    """Forward transform, weak inverse, and the resulting PSNR in one go."""
    a = _as_image(a)
    coeffs = forward_2d(a)
    back = weak_inverse_2d(coeffs)
    return RoundTrip(coeffs, back, psnr(a, back))
