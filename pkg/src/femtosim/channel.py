"""Received-power models for the desired and interfering downlinks.

Every link follows P_R = P_T * P0 * d^(-eta) * xi * Z with unit-mean
exponential slow (xi) and fast (Z) fading; the desired link is same-indoor so
its slow fading is dropped and its deterministic part is the mean power
``s_bar``.  Femto-to-femto interference additionally crosses a configurable
number of walls.  All powers are linear watts internally; dB only appears at
I/O boundaries.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .spectrum import FrequencyPlan, MacroSector, UeRegion, cochannel
from .topology import Deployment, Fap

__all__ = [
    "ChannelSample",
    "LinkPowers",
    "PropagationParams",
    "draw_sample",
    "interference_powers",
    "link_coefficients",
    "mean_desired_power",
]

SPEED_OF_LIGHT = 299_792_458.0


@dataclass(frozen=True)
class PropagationParams:
    """Path-loss constants per link class.

    The defaults are model choices, not reported values: free-space-like
    indoor links (eta = 2, P0 from the Friis constant at the carrier) and a
    macro constant calibrated to ~128 dB path loss at 1 km.
    """

    carrier_hz: float = 900e6
    eta_desired: float = 2.0  # serving FAP -> its UE
    eta_femto_interf: float = 2.0  # neighbor FAP -> UE
    eta_macro: float = 3.5  # macro BS -> UE
    p0_femto: float = 0.000702646130511537  # Friis (c / 4 pi f)^2 at 900 MHz
    p0_macro: float = 0.005011872336272714  # 128 dB at 1 km, eta 3.5
    wall_loss_db: float = 10.0
    walls_between_femtos: int = 1

    def __post_init__(self):
        for eta in (self.eta_desired, self.eta_femto_interf, self.eta_macro):
            if not 1.5 <= eta <= 6.0:
                raise ValueError(f"path-loss exponent {eta} outside [1.5, 6]")
        if self.p0_femto <= 0 or self.p0_macro <= 0:
            raise ValueError("propagation constants must be positive")
        if self.wall_loss_db < 0:
            raise ValueError("wall loss must be >= 0 dB")

    @classmethod
    def for_carrier(cls, carrier_hz: float, **overrides) -> "PropagationParams":
        """Recompute the femto Friis constant and macro 128 dB @ 1 km
        calibration for a different carrier frequency."""
        eta_macro = overrides.get("eta_macro", 3.5)
        p0f = (SPEED_OF_LIGHT / (4.0 * math.pi * carrier_hz)) ** 2
        p0m = 10 ** (-12.8) * 1000.0 ** eta_macro
        return cls(carrier_hz=carrier_hz, p0_femto=p0f, p0_macro=p0m, **overrides)

    @property
    def wall_attenuation(self) -> float:
        return 10 ** (-self.walls_between_femtos * self.wall_loss_db / 10.0)


@dataclass
class ChannelSample:
    """One fading realization: Z_0 for the desired link plus an (xi, Z) pair
    per interfering femto link and one pair for the macro link."""

    z0: float
    xi: np.ndarray  # (K,) slow fading per neighbor
    z: np.ndarray  # (K,) fast fading per neighbor
    xi_macro: float
    z_macro: float

    @property
    def neighbor_count(self) -> int:
        return len(self.xi)


@dataclass
class LinkPowers:
    """Deterministic mean desired power and per-source interference powers for
    one fading realization, in watts."""

    s_bar: float
    i_femto: np.ndarray  # (K,) one entry per neighbor, 0.0 where X_i = 0
    i_macro: float

    @property
    def total_interference(self) -> float:
        return float(self.i_femto.sum()) + self.i_macro


def draw_sample(neighbor_count: int, rng: np.random.Generator) -> ChannelSample:
    """Draw 1 + 2*neighbor_count + 2 independent unit-mean exponential fading
    values (order: z0, xi vector, z vector, macro pair)."""
    if neighbor_count < 0:
        raise ValueError("neighbor_count must be >= 0")
    z0 = rng.exponential()
    xi = rng.exponential(size=neighbor_count)
    z = rng.exponential(size=neighbor_count)
    xi_m = rng.exponential()
    z_m = rng.exponential()
    return ChannelSample(z0=z0, xi=xi, z=z, xi_macro=xi_m, z_macro=z_m)


def mean_desired_power(fap: Fap, ue_distance: float, params: PropagationParams) -> float:
    """Mean received power s_bar = P_T * P0f * d^(-eta1): no wall loss and no
    fading factor on the same-indoor desired link."""
    if ue_distance <= 0:
        raise ValueError("UE distance must be positive")
    return fap.tx_power * params.p0_femto * ue_distance ** (-params.eta_desired)


def neighbor_ids(deployment: Deployment, reference_fap: Fap) -> list[int]:
    """Ids of FAPs within the deployment's neighbor radius of the reference
    FAP (center-to-center), in ascending id order."""
    radius = deployment.params.neighbor_radius_m
    out = []
    for f in deployment.faps:
        if f.id == reference_fap.id:
            continue
        if np.linalg.norm(f.position - reference_fap.position) <= radius:
            out.append(f.id)
    return sorted(out)


def link_coefficients(
    deployment: Deployment,
    reference_fap: Fap,
    ue_position: np.ndarray,
    plan: FrequencyPlan,
    ue_region: UeRegion,
    params: PropagationParams,
) -> tuple[list[int], np.ndarray, float, float]:
    """Deterministic per-link factors, i.e. everything except the fading draws.

    Returns ``(ids, femto_coeffs, macro_coeff, s_bar)`` where each femto
    coefficient is P_T * P0f * d_i^(-eta2) * wall_attenuation * X_i (exactly
    0.0 for non-co-channel neighbors), the macro coefficient carries the Y
    flag the same way, and distances are measured from the UE position.
    """
    if reference_fap.allocation is None:
        raise ValueError("reference FAP has no allocation; apply a plan first")
    ue = np.asarray(ue_position, dtype=float)
    ids = neighbor_ids(deployment, reference_fap)
    coeffs = np.zeros(len(ids))
    for k, fid in enumerate(ids):
        f = deployment.fap_by_id(fid)
        if f.allocation is None:
            raise ValueError(f"FAP {fid} has no allocation; apply a plan first")
        x_i = cochannel(plan, reference_fap.allocation, ue_region, f.allocation)
        if x_i:
            d = float(np.linalg.norm(f.position - ue))
            coeffs[k] = (
                f.tx_power
                * params.p0_femto
                * d ** (-params.eta_femto_interf)
                * params.wall_attenuation
            )
    macro_coeff = 0.0
    if deployment.macro is not None:
        y = cochannel(
            plan,
            reference_fap.allocation,
            ue_region,
            MacroSector(reference_fap.sector_index),
        )
        if y:
            d_m = float(np.linalg.norm(deployment.macro.position - ue))
            macro_coeff = (
                deployment.macro.tx_power * params.p0_macro * d_m ** (-params.eta_macro)
            )
    d0 = float(np.linalg.norm(reference_fap.position - ue))
    s_bar = mean_desired_power(reference_fap, d0, params)
    return ids, coeffs, macro_coeff, s_bar


def interference_powers(
    deployment: Deployment,
    reference_fap: Fap,
    ue_position: np.ndarray,
    plan: FrequencyPlan,
    ue_region: UeRegion,
    params: PropagationParams,
    sample: ChannelSample,
) -> LinkPowers:
    """Received interference powers at the UE for one fading realization.

    Each neighbor term is P_T * P0f * d_i^(-eta2) * xi_i * Z_i * X_i through
    the configured wall count; the macro term is P_Tm * P0m * d_m^(-eta3) *
    xi_m * Z_m * Y with no wall.
    """
    ids, coeffs, macro_coeff, s_bar = link_coefficients(
        deployment, reference_fap, ue_position, plan, ue_region, params
    )
    if sample.neighbor_count != len(ids):
        raise ValueError(
            f"sample has {sample.neighbor_count} fading pairs for {len(ids)} neighbors"
        )
    i_femto = coeffs * sample.xi * sample.z
    i_macro = macro_coeff * sample.xi_macro * sample.z_macro
    return LinkPowers(s_bar=s_bar, i_femto=i_femto, i_macro=i_macro)
