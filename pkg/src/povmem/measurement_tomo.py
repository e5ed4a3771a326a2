"""Projective measurements, interference scans and density-matrix tomography.

Works in the joint polarization x mode-label space with basis order
[H.L1, H.L2, V.L1, V.L2]. Reconstruction uses linear inversion on an
informationally complete 16-projector frame followed by projection onto the
physical cone (eigenvalue clipping and trace renormalization); an iterative
maximum-likelihood refinement is available behind a flag for noisy counts.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import (
    DomainError,
    InvalidStateError,
    SingularFrameError,
)

_HERMITICITY_TOL = 1e-12
_TRACE_TOL = 1e-12
_EIGENVALUE_TOL = -1e-12

_PAULIS = (
    np.eye(2, dtype=np.complex128),
    np.array([[0, 1], [1, 0]], dtype=np.complex128),
    np.array([[0, -1j], [1j, 0]], dtype=np.complex128),
    np.array([[1, 0], [0, -1]], dtype=np.complex128),
)


@dataclass(frozen=True)
class DensityMatrix:
    """Hermitian, unit-trace, positive-semidefinite matrix."""

    matrix: np.ndarray

    def __post_init__(self) -> None:
        m = np.ascontiguousarray(self.matrix, dtype=np.complex128)
        if m.ndim != 2 or m.shape[0] != m.shape[1]:
            raise InvalidStateError(f"density matrix must be square, got {m.shape}")
        if np.max(np.abs(m - m.conj().T)) > _HERMITICITY_TOL:
            raise InvalidStateError("matrix is not Hermitian")
        if abs(np.trace(m).real - 1.0) > _TRACE_TOL or abs(np.trace(m).imag) > _TRACE_TOL:
            raise InvalidStateError(f"trace must be 1, got {np.trace(m)}")
        if np.linalg.eigvalsh(m).min() < _EIGENVALUE_TOL:
            raise InvalidStateError("matrix has a negative eigenvalue")
        m.setflags(write=False)
        object.__setattr__(self, "matrix", m)

    @property
    def dim(self) -> int:
        return self.matrix.shape[0]

    @classmethod
    def from_ket(cls, amplitudes) -> "DensityMatrix":
        v = np.asarray(amplitudes, dtype=np.complex128).ravel()
        norm = np.linalg.norm(v)
        if not norm > 0:
            raise InvalidStateError("cannot build a state from a zero ket")
        v = v / norm
        return cls(np.outer(v, v.conj()))

    @classmethod
    def maximally_mixed(cls, dim: int = 4) -> "DensityMatrix":
        return cls(np.eye(dim, dtype=np.complex128) / dim)

    def purity(self) -> float:
        return float(np.trace(self.matrix @ self.matrix).real)


@dataclass(frozen=True)
class MeasurementSetting:
    """A (polarization ket, mode ket) projector pair."""

    pol: np.ndarray
    oam: np.ndarray
    label: str = ""

    def __post_init__(self) -> None:
        for name, vec in (("pol", self.pol), ("oam", self.oam)):
            v = np.ascontiguousarray(vec, dtype=np.complex128)
            if v.shape != (2,):
                raise ValueError(f"{name} ket must have two components")
            norm = np.linalg.norm(v)
            if not norm > 0:
                raise ValueError(f"{name} ket has zero norm")
            v = v / norm
            v.setflags(write=False)
            object.__setattr__(self, name, v)

    def ket(self) -> np.ndarray:
        return np.kron(self.pol, self.oam)

    def projector(self) -> np.ndarray:
        v = self.ket()
        return np.outer(v, v.conj())


@dataclass(frozen=True)
class InterferenceScan:
    """A phase scan with its fitted cosine parameters."""

    alphas: np.ndarray
    intensities: np.ndarray
    theta: float
    visibility: float
    amplitude: float

    def __post_init__(self) -> None:
        a = np.ascontiguousarray(self.alphas, dtype=np.float64)
        i = np.ascontiguousarray(self.intensities, dtype=np.float64)
        if a.shape != i.shape:
            raise ValueError("alphas and intensities must have the same shape")
        if i.min() < -1e-12:
            raise ValueError("intensities must be nonnegative")
        if not 0.0 <= self.visibility <= 1.0:
            raise ValueError(f"visibility out of range: {self.visibility}")
        a.setflags(write=False)
        i.setflags(write=False)
        object.__setattr__(self, "alphas", a)
        object.__setattr__(self, "intensities", i)


def project(rho: DensityMatrix, setting: MeasurementSetting) -> float:
    """Probability Tr(rho |s><s|) of the projective outcome."""
    v = setting.ket()
    if v.size != rho.dim:
        raise InvalidStateError(
            f"setting dimension {v.size} does not match state dimension {rho.dim}"
        )
    p = float(np.real(np.conj(v) @ rho.matrix @ v))
    if p < -1e-9 or p > 1.0 + 1e-9:
        raise InvalidStateError(f"projection probability {p} outside [0, 1]")
    return float(np.clip(p, 0.0, 1.0))


def fit_interference(alphas: np.ndarray, intensities: np.ndarray
                     ) -> tuple[float, float, float]:
    """Least-squares fit of I(a) = A*(1 + V*cos(theta - a)).

    Linear in the (1, cos a, sin a) basis, so no iteration can fail; a flat
    scan returns V = 0. Returns (theta mod 2*pi, V, A).
    """
    alphas = np.asarray(alphas, dtype=np.float64)
    design = np.column_stack(
        [np.ones_like(alphas), np.cos(alphas), np.sin(alphas)]
    )
    coef, *_ = np.linalg.lstsq(design, np.asarray(intensities, dtype=np.float64),
                               rcond=None)
    a, b, c = (float(x) for x in coef)
    if a <= 1e-300 or np.hypot(b, c) < 1e-14 * max(abs(a), 1e-300):
        return 0.0, 0.0, max(a, 0.0)
    visibility = float(np.hypot(b, c) / a)
    theta = float(np.mod(np.arctan2(c, b), 2.0 * np.pi))
    if theta >= 2.0 * np.pi:  # float round-up at the seam
        theta = 0.0
    return theta, float(np.clip(visibility, 0.0, 1.0)), a


def _phase_superposition(alpha: float) -> np.ndarray:
    return np.array([1.0, np.exp(1j * alpha)], dtype=np.complex128) / np.sqrt(2.0)


def scan_setting(alpha: float, scan_dof: str = "oam",
                 reference_phase: float = 0.0) -> MeasurementSetting:
    """Setting for one scan point: the scanned degree of freedom is projected
    onto (|0> + e^{i alpha}|1>)/sqrt(2), the other onto the fixed equal
    superposition with the given reference phase."""
    if scan_dof == "oam":
        return MeasurementSetting(
            pol=_phase_superposition(reference_phase),
            oam=_phase_superposition(alpha),
            label=f"oam-scan a={alpha:.6f}",
        )
    if scan_dof == "pol":
        return MeasurementSetting(
            pol=_phase_superposition(alpha),
            oam=_phase_superposition(reference_phase),
            label=f"pol-scan a={alpha:.6f}",
        )
    raise ValueError(f"scan_dof must be 'oam' or 'pol', got {scan_dof!r}")


def interference_scan(rho: DensityMatrix, alphas, *, scan_dof: str = "oam",
                      reference_phase: float = 0.0) -> InterferenceScan:
    """Scan the relative phase of one degree of freedom and fit the fringe.

    Needs at least 8 phase points over [0, 2*pi) for a stable fit.
    """
    alphas = np.asarray(alphas, dtype=np.float64)
    if alphas.size < 8:
        raise DomainError("phase scan needs at least 8 points")
    intensities = np.array(
        [project(rho, scan_setting(a, scan_dof, reference_phase)) for a in alphas]
    )
    theta, visibility, amplitude = fit_interference(alphas, intensities)
    return InterferenceScan(alphas, intensities, theta, visibility, amplitude)


def polarization_scan(rho2: DensityMatrix, alphas) -> InterferenceScan:
    """Phase scan of a bare polarization qubit (used when L1 == L2 and the
    mode label carries no information)."""
    alphas = np.asarray(alphas, dtype=np.float64)
    if alphas.size < 8:
        raise DomainError("phase scan needs at least 8 points")
    if rho2.dim != 2:
        raise InvalidStateError("polarization scan expects a 2x2 state")
    intensities = np.empty(alphas.size)
    for i, a in enumerate(alphas):
        v = _phase_superposition(a)
        intensities[i] = float(np.real(np.conj(v) @ rho2.matrix @ v))
    theta, visibility, amplitude = fit_interference(alphas, intensities)
    return InterferenceScan(alphas, intensities, theta, visibility, amplitude)


def estimate_fidelity_from_visibility(visibility: float) -> float:
    """Quick fidelity estimate (1 + 3V)/4 from an average visibility."""
    if not -1e-12 <= visibility <= 1.0 + 1e-12:
        raise DomainError(f"visibility must lie in [0, 1], got {visibility}")
    return (1.0 + 3.0 * float(np.clip(visibility, 0.0, 1.0))) / 4.0


def tomography_settings(l1: int, l2: int) -> list[MeasurementSetting]:
    """The 16 product settings {H, V, H+iV, H+V} x {L1, L2, L1+iL2, L1+L2}.

    Informationally complete for the 4-dimensional subspace; depends on the
    labels only through the requirement that they differ.
    """
    if l1 == l2:
        raise DomainError("tomography needs two distinct mode labels")
    h = np.array([1.0, 0.0], dtype=np.complex128)
    v = np.array([0.0, 1.0], dtype=np.complex128)
    pol_bases = [("H", h), ("V", v), ("H+iV", (h + 1j * v) / np.sqrt(2.0)),
                 ("H+V", (h + v) / np.sqrt(2.0))]
    oam_bases = [("L1", h), ("L2", v), ("L1+iL2", (h + 1j * v) / np.sqrt(2.0)),
                 ("L1+L2", (h + v) / np.sqrt(2.0))]
    return [
        MeasurementSetting(pol=pv, oam=ov, label=f"{pn}|{on}")
        for pn, pv in pol_bases
        for on, ov in oam_bases
    ]


def probabilities(rho: DensityMatrix, settings: list[MeasurementSetting]) -> np.ndarray:
    """Forward model: projection probability for every setting."""
    return np.array([project(rho, s) for s in settings])


def _pauli_basis(dim: int) -> list[np.ndarray]:
    if dim == 4:
        return [np.kron(a, b) for a in _PAULIS for b in _PAULIS]
    if dim == 2:
        return list(_PAULIS)
    raise InvalidStateError(f"unsupported dimension {dim}")


def _clip_to_physical(matrix: np.ndarray) -> DensityMatrix:
    herm = 0.5 * (matrix + matrix.conj().T)
    vals, vecs = np.linalg.eigh(herm)
    vals = np.clip(vals, 0.0, None)
    total = vals.sum()
    if not total > 0:
        raise InvalidStateError("reconstruction collapsed to the zero matrix")
    vals = vals / total
    return DensityMatrix((vecs * vals) @ vecs.conj().T)


def reconstruct(probabilities, settings: list[MeasurementSetting], *,
                method: str = "linear", max_iterations: int = 2000,
                tolerance: float = 1e-12) -> DensityMatrix:
    """Reconstruct a density matrix from per-setting projection probabilities.

    ``linear`` (default): invert the projector frame on the Hermitian
    operator basis, then clip negative eigenvalues and renormalize the trace.
    ``mle``: refine the linear estimate with a diluted fixed-point iteration
    of the per-setting binomial likelihood; useful for finite-count data.
    """
    probs = np.asarray(probabilities, dtype=np.float64)
    if probs.shape != (len(settings),):
        raise ValueError("one probability per setting is required")
    if probs.min() < -1e-9 or probs.max() > 1.0 + 1e-9:
        raise ValueError("probabilities must lie in [0, 1]")
    dim = settings[0].ket().size
    basis = _pauli_basis(dim)
    if len(settings) < len(basis):
        raise SingularFrameError(
            f"{len(settings)} settings cannot determine {len(basis)} operator components"
        )
    projectors = [s.projector() for s in settings]
    frame = np.array(
        [[np.trace(b @ p).real for b in basis] for p in projectors]
    )
    if np.linalg.matrix_rank(frame, tol=1e-10) < len(basis):
        raise SingularFrameError("measurement frame is not informationally complete")
    coeffs, *_ = np.linalg.lstsq(frame, probs, rcond=None)
    rho_lin = sum(c * b for c, b in zip(coeffs, basis))
    rho = _clip_to_physical(rho_lin)
    if method == "linear":
        return rho
    if method != "mle":
        raise ValueError(f"unknown reconstruction method {method!r}")
    return _mle_refine(rho, probs, projectors, max_iterations, tolerance)


def _binomial_log_likelihood(q: np.ndarray, f: np.ndarray) -> float:
    eps = 1e-12
    q = np.clip(q, eps, 1.0 - eps)
    return float(np.sum(f * np.log(q) + (1.0 - f) * np.log(1.0 - q)))


def _mle_refine(rho: DensityMatrix, freqs: np.ndarray, projectors, max_iterations: int,
                tolerance: float) -> DensityMatrix:
    dim = rho.dim
    eye = np.eye(dim, dtype=np.complex128)
    stack = np.stack(projectors)
    # start strictly inside the cone so likelihood ratios stay finite
    current = 0.98 * rho.matrix + 0.02 * eye / dim
    best_ll = -np.inf
    eps = 1e-12
    for _ in range(max_iterations):
        q = np.clip(np.einsum("jk,ikj->i", current, stack).real, eps, 1.0 - eps)
        ll = _binomial_log_likelihood(q, freqs)
        a = freqs / q
        b = (1.0 - freqs) / (1.0 - q)
        r_op = (np.einsum("i,ijk->jk", a - b, stack) + b.sum() * eye) / len(projectors)
        step = 0.5 * (eye + r_op / np.einsum("jk,kj->", r_op, current).real)
        candidate = step @ current @ step.conj().T
        candidate = candidate / np.trace(candidate).real
        if np.max(np.abs(candidate - current)) < tolerance:
            current = candidate
            break
        if ll < best_ll - 1e-9:
            break
        best_ll = max(best_ll, ll)
        current = candidate
    return _clip_to_physical(current)


def _clipped_positive(vals: np.ndarray) -> np.ndarray:
    """Zero out eigenvalues at the eigensolver noise floor.

    Square roots amplify spurious values near zero (sqrt(1e-17) ~ 3e-9), so
    anything below a relative threshold is treated as an exact zero.
    """
    vals = np.clip(vals, 0.0, None)
    top = vals.max(initial=0.0)
    if top > 0:
        vals[vals < 1e-14 * top] = 0.0
    return vals


def fidelity(rho: DensityMatrix, rho0: DensityMatrix) -> float:
    """Uhlmann fidelity [Tr sqrt(sqrt(rho) rho0 sqrt(rho))]^2.

    Symmetric in its arguments, 1 exactly when the states coincide.
    """
    if rho.dim != rho0.dim:
        raise InvalidStateError("states have different dimensions")
    vals, vecs = np.linalg.eigh(rho.matrix)
    sqrt_rho = (vecs * np.sqrt(_clipped_positive(vals))) @ vecs.conj().T
    mid = sqrt_rho @ rho0.matrix @ sqrt_rho
    mid = 0.5 * (mid + mid.conj().T)
    mid_vals = _clipped_positive(np.linalg.eigvalsh(mid))
    value = float(np.sum(np.sqrt(mid_vals)) ** 2)
    return float(np.clip(value, 0.0, 1.0))
