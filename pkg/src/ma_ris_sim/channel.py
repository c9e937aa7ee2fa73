"""Path phases, element radiation patterns and the near-field power budget."""

from __future__ import annotations

import cmath
import math
from dataclasses import dataclass
from typing import Sequence

from .geometry import GeometryError, LinkAngles, Vec3, planar_azimuth

TWO_PI = 2.0 * math.pi


def wrap_phase(phase: float) -> float:
    """Wrap an angle to (-pi, pi]."""
    w = math.remainder(phase, TWO_PI)
    return math.pi if w == -math.pi else w


@dataclass(frozen=True)
class PathPhase:
    path_difference: float
    phase: float

    @classmethod
    def from_path(cls, rho: float, wavelength: float) -> "PathPhase":
        return cls(rho, wrap_phase(TWO_PI * rho / wavelength))


@dataclass(frozen=True)
class PatternGains:
    incident: float
    reflect_in: float
    reflect_out: float

    @property
    def product(self) -> float:
        return self.incident * self.reflect_in * self.reflect_out


@dataclass(frozen=True)
class CascadedElement:
    index: int
    rx_phase: PathPhase
    tx_phase: PathPhase
    gains: PatternGains
    d_n1: float
    d_n2: float
    applied_phase: float = 0.0


def path_difference(position: Vec3, angles: LinkAngles) -> float:
    """Projection ``x sin(t) cos(p) + y cos(t)``; the z component is dropped."""
    return (position.x * math.sin(angles.theta) * math.cos(angles.phi)
            + position.y * math.cos(angles.theta))


def steering_phase(position: Vec3, angles: LinkAngles, wavelength: float) -> complex:
    if not wavelength > 0:
        raise ValueError("wavelength must be positive")
    return cmath.exp(1j * TWO_PI * path_difference(position, angles) / wavelength)


def incident_pattern(phi_n: float, phi_center: float, hpbw: float) -> float:
    off = phi_n - phi_center
    if abs(off) >= hpbw:
        return 0.0
    return math.cos(math.pi * off / (2.0 * hpbw)) ** 2


def element_pattern(phi: float) -> float:
    return max(math.cos(phi) ** 3, 0.0)


def pattern_gains(element: Vec3, panel_center: Vec3, rx: Vec3, hpbw: float) -> PatternGains:
    """Incident-beam lobe U and the element's own cos^3 patterns W_r, W_t."""
    try:
        phi_nr = planar_azimuth(element.x, element.y)
        phi_r = planar_azimuth(panel_center.x, panel_center.y)
        phi_nt = planar_azimuth(rx.x - element.x, rx.y - element.y)
    except GeometryError as exc:
        raise GeometryError(f"pattern azimuth degenerate for element at {element}: {exc}") from None
    return PatternGains(
        incident_pattern(phi_nr, phi_r, hpbw),
        element_pattern(phi_nr),
        element_pattern(phi_nt),
    )


def _pairwise_sum(values: Sequence[float]):
    # Fixed-order pairwise reduction so results do not depend on chunking.
    n = len(values)
    if n == 0:
        return 0.0
    if n == 1:
        return values[0]
    mid = n // 2
    return _pairwise_sum(values[:mid]) + _pairwise_sum(values[mid:])


def received_power(p_t: float, wavelength: float, element_size: tuple[float, float],
                   elements: Sequence[CascadedElement], n_eff: int) -> float:
    """Near-field received power summed over the first ``n_eff`` elements.

    P_r = P_t * lambda^2 d_x d_y / (64 pi^3) * |sum sqrt(U W_r W_t) / (d1 d2)|^2
    """
    if n_eff < 0 or n_eff > len(elements):
        raise ValueError(f"n_eff={n_eff} outside [0, {len(elements)}]")
    if n_eff == 0:
        return 0.0
    d_x, d_y = element_size
    terms = [math.sqrt(e.gains.product) / (e.d_n1 * e.d_n2) for e in elements[:n_eff]]
    amp = _pairwise_sum(terms)
    return p_t * wavelength ** 2 * d_x * d_y / (64.0 * math.pi ** 3) * amp * amp


def optimal_phase(rho_b: float, rho_r_n: float, rho_t_n: float, rho_u: float,
                  wavelength: float) -> float:
    """RIS phase setting that zeroes the cascaded phase of one element."""
    if not wavelength > 0:
        raise ValueError("wavelength must be positive")
    return wrap_phase(TWO_PI * (rho_b + rho_r_n + rho_t_n + rho_u) / wavelength)


def cascaded_amplitude(elements: Sequence[CascadedElement],
                       amplitudes: Sequence[tuple[float, float]],
                       n_eff: int, rho_b: float = 0.0, rho_u: float = 0.0,
                       wavelength: float = 1.0) -> complex:
    """Sum of ``a_n b_n exp(j(theta_n - 2 pi w_n / lambda))`` over n < n_eff.

    ``w_n`` is the aggregate path difference ``rho_b + rho_r(n) + rho_t(n) + rho_u``.
    """
    if n_eff > len(elements) or n_eff > len(amplitudes):
        raise ValueError(
            f"n_eff={n_eff} exceeds elements ({len(elements)}) or amplitudes ({len(amplitudes)})"
        )
    terms = []
    for e, (alpha, beta) in zip(elements[:n_eff], amplitudes[:n_eff]):
        varpi = rho_b + e.rx_phase.path_difference + e.tx_phase.path_difference + rho_u
        terms.append(alpha * beta * cmath.exp(1j * (e.applied_phase - TWO_PI * varpi / wavelength)))
    return complex(_pairwise_sum(terms))
