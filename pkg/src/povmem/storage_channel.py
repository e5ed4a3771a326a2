"""Phenomenological atomic-memory channel with mode-dependent efficiency.

The stored mode samples a Gaussian optical-depth acceptance profile of radius
sigma_a; its storage efficiency is the peak efficiency eta0 weighted by the
transverse overlap of the mode intensity with that profile. A two-mode input
(c_H |H,L1> + c_V |V,L2>) is retrieved with each arm's amplitude weighted by
its efficiency and renormalized, which reduces the overlap with the input to
1/2 + kappa/(1 + kappa^2) for an efficiency ratio kappa. Optional noise mixes
in dephasing of the H/V coherences and isotropic depolarization.

The amplitude weighting follows the retrieved-state convention amplitude
proportional to eta, which is the one consistent with the closed-form
fidelity above; set ``amplitude_convention="sqrt_eta"`` for the
energy-measure alternative.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import DegenerateFieldError, DomainError
from .field_core import TransverseField
from .measurement_tomo import DensityMatrix
from .vector_state import TwoDofKet, VectorBeamField

_AMPLITUDE_CONVENTIONS = ("eta", "sqrt_eta")


@dataclass(frozen=True)
class NoiseSpec:
    """Depolarizing weight and H/V dephasing strength, both in [0, 1]."""

    p_dep: float = 0.0
    p_phi: float = 0.0

    def __post_init__(self) -> None:
        for name, p in (("p_dep", self.p_dep), ("p_phi", self.p_phi)):
            if not 0.0 <= p <= 1.0:
                raise ValueError(f"{name} must lie in [0, 1], got {p}")


@dataclass(frozen=True)
class ChannelSpec:
    """Memory definition: peak efficiency, Gaussian acceptance radius, noise.

    ``storage_time`` is carried as metadata only; no decay curve is modeled.
    """

    eta0: float = 0.143
    sigma_a: float = 1.0e-3
    noise: NoiseSpec = NoiseSpec()
    storage_time: float = 1.5e-6
    amplitude_convention: str = "eta"

    def __post_init__(self) -> None:
        if not 0.0 < self.eta0 <= 1.0:
            raise ValueError(f"eta0 must lie in (0, 1], got {self.eta0}")
        if not self.sigma_a > 0:
            raise ValueError(f"sigma_a must be positive, got {self.sigma_a}")
        if self.amplitude_convention not in _AMPLITUDE_CONVENTIONS:
            raise ValueError(
                f"amplitude_convention must be one of {_AMPLITUDE_CONVENTIONS}"
            )


@dataclass(frozen=True)
class ChannelReport:
    """Per-arm efficiencies, their ratio, and the closed-form fidelity bound."""

    eta1: float
    eta2: float
    kappa: float
    predicted_fidelity: float


def mode_efficiency(mode: TransverseField, channel: ChannelSpec) -> float:
    """Storage efficiency of one transverse mode.

    eta = eta0 * integral(I * exp(-r^2/(2 sigma_a^2))) / integral(I); the
    result approaches eta0 for modes much smaller than the acceptance radius.
    """
    intensity = mode.intensity()
    power = float(intensity.sum())
    if not power > 0:
        raise DegenerateFieldError("mode carries no power")
    _, _, r, _ = mode.grid.coords()
    acceptance = np.exp(-(r**2) / (2.0 * channel.sigma_a**2))
    return float(channel.eta0 * (intensity * acceptance).sum() / power)


def predict_fidelity(kappa: float) -> float:
    """Closed-form fidelity 1/2 + kappa/(1 + kappa^2) after unbalanced storage.

    Symmetric under kappa -> 1/kappa, maximal (1) at kappa = 1.
    """
    if not np.isfinite(kappa) or kappa <= 0:
        raise DomainError(f"kappa must be positive and finite, got {kappa}")
    return float(0.5 + kappa / (1.0 + kappa**2))


def _arm_efficiencies(fields: VectorBeamField, channel: ChannelSpec
                      ) -> tuple[float, float]:
    p_h = fields.e_h.power()
    p_v = fields.e_v.power()
    total = p_h + p_v
    if not total > 0:
        raise DegenerateFieldError("vector field carries no power")
    # An empty arm has no mode to store; give it the other arm's efficiency so
    # the ratio stays neutral (its ket component is zero anyway).
    if p_h < 1e-12 * total:
        eta2 = mode_efficiency(fields.e_v, channel)
        return eta2, eta2
    if p_v < 1e-12 * total:
        eta1 = mode_efficiency(fields.e_h, channel)
        return eta1, eta1
    return mode_efficiency(fields.e_h, channel), mode_efficiency(fields.e_v, channel)


def apply_channel(ket: TwoDofKet, fields: VectorBeamField | None,
                  channel: ChannelSpec, *,
                  efficiencies: tuple[float, float] | None = None
                  ) -> tuple[DensityMatrix, ChannelReport]:
    """Store and retrieve a two-mode state.

    Arm efficiencies come from the field realization unless an explicit
    ``efficiencies=(eta1, eta2)`` override is given. Component amplitudes are
    weighted per the channel's amplitude convention and renormalized; then
    dephasing shrinks the H/V coherences by (1 - p_phi) and depolarization
    mixes the state with I/4 by weight p_dep.
    """
    if efficiencies is not None:
        eta1, eta2 = (float(e) for e in efficiencies)
        if not (eta1 > 0 and eta2 > 0):
            raise DomainError("arm efficiencies must be positive")
    else:
        if fields is None:
            raise DegenerateFieldError(
                "apply_channel needs a field realization or explicit efficiencies"
            )
        eta1, eta2 = _arm_efficiencies(fields, channel)

    if channel.amplitude_convention == "eta":
        g1, g2 = eta1, eta2
    else:
        g1, g2 = np.sqrt(eta1), np.sqrt(eta2)

    weights = np.array([g1, g2, g1, g2])  # basis order [H.L1, H.L2, V.L1, V.L2]
    retrieved = ket.amplitudes * weights
    norm = np.linalg.norm(retrieved)
    if not norm > 0:
        raise DegenerateFieldError("retrieved state has zero norm")
    retrieved = retrieved / norm

    rho = np.outer(retrieved, retrieved.conj())
    p_phi = channel.noise.p_phi
    if p_phi > 0:
        rho[:2, 2:] *= 1.0 - p_phi
        rho[2:, :2] *= 1.0 - p_phi
    p_dep = channel.noise.p_dep
    if p_dep > 0:
        rho = (1.0 - p_dep) * rho + p_dep * np.eye(4) / 4.0

    kappa = eta2 / eta1
    report = ChannelReport(eta1, eta2, kappa, predict_fidelity(kappa))
    return DensityMatrix(rho), report


def apply_polarization_channel(theta: float, channel: ChannelSpec) -> DensityMatrix:
    """Channel output for a degenerate state (L1 == L2): both arms carry the
    same mode, so only the polarization qubit (|H> + e^{i theta}|V>)/sqrt(2)
    evolves, under the same dephasing and depolarizing noise."""
    ket = np.array([1.0, np.exp(1j * theta)]) / np.sqrt(2.0)
    rho = np.outer(ket, ket.conj())
    p_phi = channel.noise.p_phi
    if p_phi > 0:
        rho[0, 1] *= 1.0 - p_phi
        rho[1, 0] *= 1.0 - p_phi
    p_dep = channel.noise.p_dep
    if p_dep > 0:
        rho = (1.0 - p_dep) * rho + p_dep * np.eye(2) / 2.0
    return DensityMatrix(rho)
