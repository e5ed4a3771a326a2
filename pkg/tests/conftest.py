"""Shared fixtures and independent oracles.

The oracle helpers deliberately avoid the package's own code paths: radial
quantities come from fine 1-D quadrature, transforms from a brute-force DFT
matrix, visibilities from Fourier coefficients of densely sampled exact
probabilities. Tests compare the implementation against these.
"""

from __future__ import annotations

import numpy as np
import pytest

from povmem import GridSpec


@pytest.fixture()
def ring_grid() -> GridSpec:
    """256-sample grid holding the default 100 um ring comfortably."""
    return GridSpec(256, 3.125e-6, 795e-9)


@pytest.fixture()
def fine_grid() -> GridSpec:
    """512-sample grid at the default pitch."""
    return GridSpec(512, 1.5625e-6, 795e-9)


RING_R = 100e-6
RING_W0 = 10e-6


# ---------------------------------------------------------------- oracles

def lg_radius_oracles(l: int, w0: float, r_max: float | None = None,
                      samples: int = 400_001) -> tuple[float, float]:
    """(centroid, argmax) radius of the vortex intensity r^{2|l|} e^{-2r^2/w0^2}
    from a fine 1-D radial grid."""
    if r_max is None:
        r_max = w0 * (np.sqrt(abs(l) / 2.0) + 4.0)
    r = np.linspace(0.0, r_max, samples)
    intensity = (np.sqrt(2.0) * r / w0) ** (2 * abs(l)) * np.exp(-2.0 * r**2 / w0**2)
    centroid = np.trapezoid(r**2 * intensity, r) / np.trapezoid(r * intensity, r)
    return float(centroid), float(r[np.argmax(intensity)])


def pov_centroid_oracle(r_r: float, w0: float, samples: int = 400_001) -> float:
    """Centroid radius of the ring intensity e^{-2(r-r_r)^2/w0^2} by quadrature."""
    r = np.linspace(0.0, r_r + 6.0 * w0, samples)
    intensity = np.exp(-2.0 * (r - r_r) ** 2 / w0**2)
    return float(np.trapezoid(r**2 * intensity, r) / np.trapezoid(r * intensity, r))


def efficiency_oracle_pov(eta0: float, sigma_a: float, r_r: float, w0: float,
                          samples: int = 400_001) -> float:
    """Radial quadrature of the acceptance-weighted ring intensity."""
    r = np.linspace(0.0, r_r + 6.0 * w0, samples)
    intensity = np.exp(-2.0 * (r - r_r) ** 2 / w0**2)
    acceptance = np.exp(-(r**2) / (2.0 * sigma_a**2))
    return float(eta0 * np.trapezoid(r * intensity * acceptance, r)
                 / np.trapezoid(r * intensity, r))


def efficiency_oracle_lg(eta0: float, sigma_a: float, l: int, w0: float,
                         samples: int = 400_001) -> float:
    r = np.linspace(0.0, w0 * (np.sqrt(abs(l) / 2.0) + 5.0), samples)
    intensity = (np.sqrt(2.0) * r / w0) ** (2 * abs(l)) * np.exp(-2.0 * r**2 / w0**2)
    acceptance = np.exp(-(r**2) / (2.0 * sigma_a**2))
    return float(eta0 * np.trapezoid(r * intensity * acceptance, r)
                 / np.trapezoid(r * intensity, r))


def brute_force_lens_fourier(amplitude: np.ndarray, pitch: float,
                             wavelength: float, focal_length: float) -> np.ndarray:
    """Direct evaluation of the lens transform as a separable DFT matrix.

    out[j1,j2] = pitch^2/(i lam f) * sum_i in[i1,i2]
                 exp(-i k (x_i1 u_j1 + x_i2 u_j2)/f)
    with half-pixel-offset coordinates on both planes.
    """
    n = amplitude.shape[0]
    c = 0.5 - n / 2
    idx = np.arange(n) + c
    kernel = np.exp(-2j * np.pi * np.outer(idx, idx) / n)
    scale = pitch**2 / (1j * wavelength * focal_length)
    return scale * (kernel @ amplitude @ kernel.T)


def azimuthal_overlap_quadrature(delta_l: int, samples: int = 100_000) -> complex:
    """Direct quadrature of the azimuthal factor integral (1/2pi) phase avg."""
    phi = np.linspace(0.0, 2.0 * np.pi, samples, endpoint=False)
    return complex(np.mean(np.exp(1j * delta_l * phi)))


def count_cos_maxima(delta_l: int, theta: float, samples: int = 4096) -> int:
    """Maxima count of 1 + cos(delta_l*phi + theta) by direct sampling."""
    phi = np.linspace(0.0, 2.0 * np.pi, samples, endpoint=False)
    profile = 1.0 + np.cos(delta_l * phi + theta)
    span = profile.max() - profile.min()
    if span < 1e-12:
        return 0
    prev, nxt = np.roll(profile, 1), np.roll(profile, -1)
    peaks = (profile > prev) & (profile >= nxt) & (profile - profile.min() > 0.05 * span)
    return int(np.count_nonzero(peaks))


def visibility_fourier_oracle(rho: np.ndarray, scan_dof: str = "oam",
                              samples: int = 512) -> tuple[float, float]:
    """(V, theta) from Fourier coefficients of the densely sampled exact
    projection probabilities; independent of the least-squares fit path."""
    alphas = np.linspace(0.0, 2.0 * np.pi, samples, endpoint=False)
    vals = np.empty(samples)
    for i, a in enumerate(alphas):
        if scan_dof == "oam":
            s = np.kron([1.0, 1.0], [1.0, np.exp(1j * a)]) / 2.0
        else:
            s = np.kron([1.0, np.exp(1j * a)], [1.0, 1.0]) / 2.0
        vals[i] = np.real(np.conj(s) @ rho @ s)
    c0 = vals.mean()
    c1 = np.mean(vals * np.exp(-1j * alphas))
    if c0 <= 0:
        return 0.0, 0.0
    # I(a) = A(1 + V cos(theta - a)) has first coefficient (A V / 2) e^{-i theta}
    return float(2.0 * np.abs(c1) / c0), float(np.mod(-np.angle(c1), 2.0 * np.pi))


def coherence_visibility_oracle(rho: np.ndarray) -> float:
    """Closed-form scan visibility from the state's off-diagonal entries:
    the mode-phase fringe amplitude is |rho01+rho03+rho21+rho23| against a
    mean of (1 + 2Re(rho02+rho13))/4."""
    z = rho[0, 1] + rho[0, 3] + rho[2, 1] + rho[2, 3]
    mean = 1.0 + 2.0 * np.real(rho[0, 2] + rho[1, 3])
    return float(2.0 * np.abs(z) / mean)


def werner_density(amplitudes: np.ndarray, weight: float) -> np.ndarray:
    """weight * |psi><psi| + (1 - weight) * I/4."""
    psi = np.asarray(amplitudes, dtype=complex)
    psi = psi / np.linalg.norm(psi)
    return weight * np.outer(psi, psi.conj()) + (1.0 - weight) * np.eye(4) / 4.0


def random_density_matrix(rng: np.random.Generator, dim: int = 4) -> np.ndarray:
    """Wishart-style random full-rank state."""
    g = rng.normal(size=(dim, dim)) + 1j * rng.normal(size=(dim, dim))
    m = g @ g.conj().T
    return m / np.trace(m).real


def random_unitary(rng: np.random.Generator, dim: int = 4) -> np.ndarray:
    g = rng.normal(size=(dim, dim)) + 1j * rng.normal(size=(dim, dim))
    q, r = np.linalg.qr(g)
    return q * (np.diag(r) / np.abs(np.diag(r)))
