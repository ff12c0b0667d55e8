"""Square complex-grid algebra shared by the whole package.

Grids are plain complex ndarrays of shape (N, N). Flat beam indices are
row-major, k = r*N + c; rows index the elevation dimension of the array
and columns the azimuth dimension. All functions here are pure and
deterministic.
"""

import numpy as np


def _as_square(a):
    a = np.asarray(a)
    if a.ndim != 2 or a.shape[0] != a.shape[1]:
        raise ValueError(f"expected a square grid, got shape {a.shape}")
    return a


def dft2(a):
    """Unitary 2D-DFT, U A U with U[j, k] = exp(-2j*pi*j*k/N) / sqrt(N)."""
    a = _as_square(a)
    return np.fft.fft2(a) / a.shape[0]


def idft2(a):
    """Inverse of dft2, conj(U) A conj(U); preserves the Frobenius norm."""
    a = _as_square(a)
    return np.fft.ifft2(a) * a.shape[0]


def circ_shift(a, shift):
    """Circularly shift a grid by `shift = (rows, cols)`.

    output[i, j] = a[(i - rows) % N, (j - cols) % N]
    """
    a = _as_square(a)
    r, c = shift
    return np.roll(a, (int(r), int(c)), axis=(0, 1))


def flip_conjugate(p):
    """conj(P[(-k) % N, (-l) % N]); an involution, magnitudes unchanged."""
    p = _as_square(p)
    idx = (-np.arange(p.shape[0])) % p.shape[0]
    return np.conj(p[np.ix_(idx, idx)])


def circ_conv2(a, b):
    """2D circular convolution of two same-side grids (FFT product route)."""
    a = _as_square(a)
    b = _as_square(b)
    if a.shape != b.shape:
        raise ValueError(f"side mismatch: {a.shape} vs {b.shape}")
    return np.fft.ifft2(np.fft.fft2(a) * np.fft.fft2(b))


def array_response(n, delta):
    """Half-wavelength steering vector [1, e^{j pi d}, ..., e^{j pi (n-1) d}]."""
    if n < 1:
        raise ValueError("array size must be >= 1")
    return np.exp(1j * np.pi * float(delta) * np.arange(n))


def vec(a):
    """Row-major flattening, entry (r, c) lands at k = r*N + c."""
    return np.asarray(a).reshape(-1)


def unvec(x, n=None):
    """Inverse of vec. Side n is inferred when the length is a square."""
    x = np.asarray(x).reshape(-1)
    if n is None:
        n = int(round(np.sqrt(x.size)))
    if n * n != x.size:
        raise ValueError(f"length {x.size} is not a square grid of side {n}")
    return x.reshape(n, n)
