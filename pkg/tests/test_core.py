import math
from fractions import Fraction

import numpy as np
import pytest

from rht import (
    Normalization,
    ScaledTransform,
    Spectrum,
    apply_dht,
    apply_direct,
    build_dht_matrix,
    build_rht_matrix,
    cas,
    fourier_estimate,
    reconstruction_error,
    rounded_transform,
    weak_inverse_apply,
)
from oracles import brute_force_dft

# The published 16-point matrix, glyphs as printed: blank 0, "-" is -1.
H16_GLYPHS = [
    "1 1 1 1 1 1 1 1 1 1 1 1 1 1 1 1",
    "1 1 1 1 1 1   - - - - - - -   1",
    "1 1 1   - - -   1 1 1   - - -  ",
    "1 1   - - 1 1 1 - -   1 1 - - -",
    "1 1 - - 1 1 - - 1 1 - - 1 1 - -",
    "1 1 - 1 1 -   1 - - 1 - - 1   -",
    "1   - 1 -   1 - 1   - 1 -   1 -",
    "1 -   1 - 1 - 1 - 1   - 1 - 1 -",
    "1 - 1 - 1 - 1 - 1 - 1 - 1 - 1 -",
    "1 - 1 - 1 -   1 - 1 - 1 - 1   -",
    "1 - 1   - 1 -   1 - 1   - 1 -  ",
    "1 -   1 - - 1 - - 1   - 1 1 - 1",
    "1 - - 1 1 - - 1 1 - - 1 1 - - 1",
    "1 - - - 1 1   - - 1 1 1 - -   1",
    "1   - - -   1 1 1   - - -   1 1",
    "1 1   - - - - - - -   1 1 1 1 1",
]


def glyphs_to_matrix(lines):
    value = {"1": 1, "-": -1, " ": 0}
    return np.array([[value[line[2 * k] if 2 * k < len(line) else " "]
                      for k in range(16)] for line in lines])


def direct_rounding(n):
    # independent of the package's lookup-table construction
    out = np.zeros((n, n), dtype=np.int64)
    for i in range(n):
        for k in range(n):
            x = math.cos(2 * math.pi * i * k / n) + math.sin(2 * math.pi * i * k / n)
            out[i, k] = int(math.copysign(math.floor(abs(x) + 0.5), x)) if x else 0
    return out


def test_cas_kernel_values():
    assert cas(0.0) == pytest.approx(1.0)
    assert cas(np.pi / 4) == pytest.approx(math.sqrt(2))
    assert cas(np.pi) == pytest.approx(-1.0)
    np.testing.assert_allclose(cas(np.array([0.0, np.pi])), [1.0, -1.0], atol=1e-15)


def test_order_two_and_three_matrices():
    assert build_rht_matrix(2).entries.tolist() == [[1, 1], [1, -1]]
    assert build_rht_matrix(3).entries.tolist() == [[1, 1, 1], [1, 0, -1], [1, -1, 0]]


def test_sixteen_point_matrix_matches_published_figure():
    assert np.array_equal(build_rht_matrix(16).entries, glyphs_to_matrix(H16_GLYPHS))


@pytest.mark.parametrize("n", [1, 2, 3, 5, 8, 12, 16, 31, 64, 100])
def test_matrix_equals_direct_entrywise_rounding(n):
    assert np.array_equal(build_rht_matrix(n).entries, direct_rounding(n))


@pytest.mark.parametrize("n", list(range(1, 33)) + [64, 128, 257])
def test_matrix_is_ternary_symmetric_with_unit_borders(n):
    m = build_rht_matrix(n)
    e = m.entries
    assert set(np.unique(e)) <= {-1, 0, 1}
    assert np.array_equal(e, e.T)
    assert (e[0] == 1).all() and (e[:, 0] == 1).all()


def test_dht_matrix_symmetric_scaling_is_orthogonal():
    for n in (2, 3, 8, 17, 32):
        hs = build_dht_matrix(n, Normalization.SYMMETRIC)
        np.testing.assert_allclose(hs @ hs, np.eye(n), atol=1e-12)


def test_dht_unscaled_square_is_n_identity():
    for n in (2, 5, 16):
        h = build_dht_matrix(n)
        np.testing.assert_allclose(h @ h, n * np.eye(n), atol=1e-10)


def test_bad_orders_rejected():
    for n in (0, -3):
        with pytest.raises(ValueError):
            build_rht_matrix(n)
        with pytest.raises(ValueError):
            build_dht_matrix(n)


def test_apply_direct_matches_dense_product():
    rng = np.random.default_rng(5)
    for n in (1, 2, 3, 7, 16, 40):
        t = rounded_transform(n, Normalization.UNSCALED)
        v = rng.integers(-99, 100, n).astype(np.float64)
        got = apply_direct(t, v)
        want = t.matrix.entries.astype(np.float64) @ v
        assert np.array_equal(got.coefficients, want)
        assert got.normalization is Normalization.UNSCALED


def test_apply_direct_symmetric_scales_once():
    v = np.array([4.0, 0.0, 0.0, 0.0])
    t = rounded_transform(4, Normalization.SYMMETRIC)
    s = apply_direct(t, v)
    np.testing.assert_allclose(s.coefficients, np.full(4, 2.0))


def test_signal_validation():
    t = rounded_transform(4, Normalization.UNSCALED)
    with pytest.raises(ValueError):
        apply_direct(t, [1.0, 2.0])
    with pytest.raises(ValueError):
        apply_direct(t, [[1.0, 2.0], [3.0, 4.0]])
    with pytest.raises(ValueError):
        apply_direct(t, [1.0, np.nan, 0.0, 0.0])


def test_weak_inverse_requires_symmetric_normalization():
    t_plain = rounded_transform(4, Normalization.UNSCALED)
    t_sym = rounded_transform(4, Normalization.SYMMETRIC)
    s_plain = apply_direct(t_plain, [1.0, 2.0, 3.0, 4.0])
    s_sym = apply_direct(t_sym, [1.0, 2.0, 3.0, 4.0])
    with pytest.raises(ValueError):
        weak_inverse_apply(t_sym, s_plain)
    with pytest.raises(ValueError):
        weak_inverse_apply(t_plain, s_sym)
    back = weak_inverse_apply(t_sym, s_sym)
    np.testing.assert_allclose(back, [1.0, 2.0, 3.0, 4.0], atol=1e-12)


def test_weak_inverse_roundtrip_error_small_but_nonzero_at_eight():
    rng = np.random.default_rng(11)
    v = rng.normal(size=8)
    t = rounded_transform(8, Normalization.SYMMETRIC)
    back = weak_inverse_apply(t, apply_direct(t, v))
    err = np.abs(back - v).max()
    e = t.matrix.entries.astype(np.float64)
    defect = np.linalg.norm(e @ e / 8.0 - np.eye(8))  # Frobenius bound
    assert 0 < err <= defect * np.linalg.norm(v)


def test_reconstruction_error_on_second_basis_vector_order_three():
    t = rounded_transform(3, Normalization.SYMMETRIC)
    err = reconstruction_error(t, [0.0, 1.0, 0.0])
    np.testing.assert_allclose(err, [0.0, -1 / 3, 1 / 3], atol=1e-15)
    # the same vector in exact rationals, straight from the integer square
    e = t.matrix.entries.astype(object)
    col = (e @ e)[:, 1]
    exact = [Fraction(int(c), 3) - int(k == 1) for k, c in enumerate(col)]
    assert exact == [Fraction(0), Fraction(-1, 3), Fraction(1, 3)]


def test_reconstruction_error_zero_at_involution_orders():
    rng = np.random.default_rng(3)
    for n in (1, 2, 4):
        t = rounded_transform(n, Normalization.SYMMETRIC)
        v = rng.integers(-50, 50, n).astype(np.float64)
        assert np.array_equal(reconstruction_error(t, v), np.zeros(n))


def test_spectrum_len_and_immutability():
    s = Spectrum(np.arange(4.0), Normalization.UNSCALED)
    assert len(s) == 4
    t = rounded_transform(3, Normalization.UNSCALED)
    with pytest.raises((ValueError, AttributeError)):
        t.matrix.entries[0, 0] = 5


def test_fourier_estimate_matches_brute_force_dft():
    rng = np.random.default_rng(17)
    for n in (2, 3, 8, 21, 64):
        v = rng.normal(size=n)
        dht_spec = apply_dht(build_dht_matrix(n), v)
        got = fourier_estimate(dht_spec)
        want = brute_force_dft(v)
        np.testing.assert_allclose(got, want, atol=1e-9 * max(1.0, np.abs(want).max()))


def test_fourier_estimate_of_real_even_signal_is_real():
    v = np.array([4.0, 1.0, 2.0, 1.0])  # even symmetry v[k] == v[n-k]
    f = fourier_estimate(apply_dht(build_dht_matrix(4), v))
    np.testing.assert_allclose(f.imag, 0.0, atol=1e-12)
