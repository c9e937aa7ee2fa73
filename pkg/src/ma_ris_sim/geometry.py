"""Element placement, link angles and the elliptical illumination footprint.

Coordinate conventions
----------------------
* 3D direction angles use elevation measured from the +y axis and azimuth
  ``atan2(z, x)``, so a unit vector is ``(sin t cos p, cos t, sin t sin p)``.
* Radiation-pattern azimuths use the planar ``arctan(x / y)`` convention
  (see :func:`planar_azimuth`).  The two are kept separate on purpose.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass

import numpy as np

# Lower bound applied to the movable-element spacing formula (m).
SPACING_FLOOR = 1e-4


class GeometryError(ValueError):
    """Raised for degenerate or inconsistent geometry."""


class GrazingIncidence(GeometryError):
    """The main-lobe edge never meets the panel plane; the footprint is unbounded."""


class Layout(enum.Enum):
    ONE_D = "1D"
    TWO_D = "2D"


class Mobility(enum.Enum):
    MOVABLE = "MA"
    FIXED = "FPA"


@dataclass(frozen=True)
class Vec3:
    x: float
    y: float
    z: float

    def __post_init__(self):
        if not all(math.isfinite(c) for c in (self.x, self.y, self.z)):
            raise GeometryError(f"non-finite position {self!r}")

    def __sub__(self, other: "Vec3") -> "Vec3":
        return Vec3(self.x - other.x, self.y - other.y, self.z - other.z)

    def __add__(self, other: "Vec3") -> "Vec3":
        return Vec3(self.x + other.x, self.y + other.y, self.z + other.z)

    def norm(self) -> float:
        return math.sqrt(self.x * self.x + self.y * self.y + self.z * self.z)

    def as_array(self) -> np.ndarray:
        return np.array([self.x, self.y, self.z])


@dataclass(frozen=True)
class PanelGeometry:
    center: Vec3
    length: float
    layout: Layout
    n_total: int
    n_x: int
    n_y: int
    element_size: tuple[float, float]
    mobility: Mobility

    def __post_init__(self):
        if self.length <= 0:
            raise GeometryError("panel length must be positive")
        if self.n_total < 1:
            raise GeometryError("panel needs at least one element")
        if min(self.element_size) <= 0:
            raise GeometryError("element size components must be positive")
        if self.layout is Layout.TWO_D and self.n_x * self.n_y < self.n_total:
            raise GeometryError(
                f"2D grid {self.n_x}x{self.n_y} cannot hold {self.n_total} elements"
            )


@dataclass(frozen=True)
class MovementState:
    t_index: int
    speed: float
    spacing: float

    def __post_init__(self):
        if self.t_index < 1:
            raise GeometryError(f"t_index must be >= 1, got {self.t_index}")
        if self.speed < 0:
            raise GeometryError("speed must be non-negative")
        if not self.spacing > 0:
            raise GeometryError(f"element spacing must be positive, got {self.spacing}")


@dataclass(frozen=True)
class IlluminationEllipse:
    semi_major: float
    semi_minor: float
    area: float
    center_distance: float


@dataclass(frozen=True)
class LinkAngles:
    theta: float
    phi: float

    def wave_vector(self) -> np.ndarray:
        st = math.sin(self.theta)
        return np.array([st * math.cos(self.phi), math.cos(self.theta), st * math.sin(self.phi)])


def grid_shape(n_total: int) -> tuple[int, int]:
    """Default (n_x, n_y) factorization used when a 2D grid is not given."""
    n_x = math.ceil(math.sqrt(n_total))
    return n_x, math.ceil(n_total / n_x)


def cluster_offset(t_index: int, speed: float, length: float) -> float:
    """x-offset of the moving cluster from the panel center at time step t."""
    return (t_index - 1) * speed - length / 2.0


def ma_spacing(t_index: int, speed: float, n_total: int, d_sf: float) -> float:
    """Movable-element spacing ``(v t - (N-1) d_sf) / (N-1)``, floored at 1e-4 m."""
    if n_total < 2:
        raise GeometryError("spacing is undefined for fewer than two elements")
    raw = (speed * t_index - (n_total - 1) * d_sf) / (n_total - 1)
    return max(raw, SPACING_FLOOR)


def element_positions(panel: PanelGeometry, state: MovementState) -> list[Vec3]:
    """Positions of all N elements at ``state.t_index``.

    Fixed panels are frozen at the first time step.  Elements are indexed from
    the left edge of the cluster; a 2D panel fills ``n_x`` columns along x and
    ``n_y`` rows along z (row-major, last row possibly partial), with the rows
    centered on the panel's z.
    """
    t = 1 if panel.mobility is Mobility.FIXED else state.t_index
    c = panel.center
    x0 = c.x + cluster_offset(t, state.speed, panel.length)
    ds = state.spacing
    if panel.layout is Layout.ONE_D:
        return [Vec3(x0 + n * ds, c.y, c.z) for n in range(panel.n_total)]
    z_mid = (panel.n_y - 1) / 2.0
    out = []
    for n in range(panel.n_total):
        row, col = divmod(n, panel.n_x)
        out.append(Vec3(x0 + col * ds, c.y, c.z + (row - z_mid) * ds))
    return out


def direction_angles(origin: Vec3, target: Vec3) -> LinkAngles:
    d = target - origin
    r = d.norm()
    if r == 0.0:
        raise GeometryError("direction between coincident points is undefined")
    # Equals arccos(d_y / r) but keeps full precision near the +/-y axis.
    theta = math.atan2(math.hypot(d.x, d.z), d.y)
    if d.x == 0.0 and d.z == 0.0:
        return LinkAngles(theta, 0.0)
    phi = math.atan2(d.z, d.x)
    if phi == -math.pi:
        phi = math.pi
    return LinkAngles(theta, phi)


def planar_azimuth(x: float, y: float) -> float:
    """Pattern azimuth ``arctan(x / y)`` in [-pi/2, pi/2].

    ``y == 0`` maps to +/-pi/2 by the sign of ``x``.  Unlike ``atan2`` the
    result is folded into the front half-plane, so a receiver on the -y side of
    an element is seen at the mirrored angle rather than behind it.
    """
    if y == 0.0:
        if x == 0.0:
            raise GeometryError("azimuth undefined at the origin")
        return math.copysign(math.pi / 2.0, x)
    return math.atan(x / y)


def link_distances(tx: Vec3, element: Vec3, rx: Vec3) -> tuple[float, float]:
    d1 = (tx - element).norm()
    d2 = (element - rx).norm()
    if d1 == 0.0 or d2 == 0.0:
        raise GeometryError("element coincides with a terminal")
    return d1, d2


def illumination_ellipse(tx: Vec3, panel_center: Vec3, hpbw: float) -> IlluminationEllipse:
    """Footprint of the Tx main lobe on the panel.

    ``a = d_c sin(hpbw) / sin(phi_t + hpbw)`` and
    ``b = d_c sin(hpbw) / cos(theta_r + hpbw)``, where ``phi_t`` is the planar
    azimuth of the panel center and ``theta_r`` the elevation of the Tx->center
    direction.
    """
    if not 0.0 < hpbw < math.pi / 2.0:
        raise GeometryError(f"hpbw must be in (0, pi/2) rad, got {hpbw}")
    d_c = (panel_center - tx).norm()
    if d_c == 0.0:
        raise GeometryError("Tx coincides with the panel center")
    phi_t = planar_azimuth(panel_center.x, panel_center.y)
    theta_r = direction_angles(tx, panel_center).theta
    den_a = math.sin(phi_t + hpbw)
    den_b = math.cos(theta_r + hpbw)
    if den_a <= 0.0 or den_b <= 0.0:
        raise GrazingIncidence(
            "ellipse degenerate at grazing incidence "
            f"(phi_t={math.degrees(phi_t):.2f} deg, theta_r={math.degrees(theta_r):.2f} deg)"
        )
    num = d_c * math.sin(hpbw)
    a = num / den_a
    b = num / den_b
    return IlluminationEllipse(a, b, math.pi * a * b, d_c)


def effective_count_1d(semi_major: float, spacing: float, n_total: int) -> int:
    if not spacing > 0:
        raise GeometryError("spacing must be positive")
    return min(math.ceil(semi_major / spacing), n_total)


def effective_count_2d(area: float, spacing: float, n_total: int) -> int:
    if not spacing > 0:
        raise GeometryError("spacing must be positive")
    return min(math.ceil(area / (2.0 * spacing * spacing)), n_total)
