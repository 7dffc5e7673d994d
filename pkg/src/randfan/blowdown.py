"""Single-ray blowdowns of the full height-h fan.

Removing one ray rho from the complete fan on all rays of sup-norm <= h
merges its two flanking cones into one, and the merged cone's singularity
index is the blowdown index of rho.  Both flanking cones of the full fan are
smooth, so that index is the unique integer k >= 1 with

    k * u_rho = u_tau + u_omega

for the angular neighbors tau, omega of rho, and it also equals
|wedge(u_tau, u_omega)|.  Everything here computes both forms in exact
integer arithmetic and refuses to return if they disagree.

Norm bands: k * sup_norm(rho) <= 2h holds exactly for every ray (the
neighbor sum has sup-norm at most 2h), while the lower bound
(2 - eps) / (k + 2) * h is asymptotic, with eps the largest normalized gap
between angular neighbors at height h.
"""

from __future__ import annotations

from collections.abc import Mapping
from fractions import Fraction
from functools import lru_cache

import numpy as np

from .errors import InvariantError, ValidationError
from .lattice import RayUniverse, RayVec, enumerate_rays, is_primitive, wedge


class BlowdownTable(Mapping):
    """Blowdown index of every ray of the height-h complete fan.

    Mapping interface: table[ray] -> k, len(table) is the number of rays,
    iteration yields RayVec objects in canonical angular order.  Bulk data
    is exposed as read-only arrays (coords, k_values) aligned with that
    order, plus the measured gap bound epsilon for the height.
    """

    __slots__ = ("_universe", "_k", "epsilon")

    def __init__(self, universe: RayUniverse, k_values: np.ndarray, epsilon: float):
        k_values.flags.writeable = False
        c = universe.coords
        norms = np.maximum(np.abs(c[:, 0]), np.abs(c[:, 1]))
        # the upper band holds exactly for every ray: enforce it, never measure it
        if not bool((k_values * norms <= 2 * universe.h).all()):
            raise InvariantError("a blowdown index violates k * |ray| <= 2h")
        self._universe = universe
        self._k = k_values
        self.epsilon = epsilon

    @property
    def h(self) -> int:
        return self._universe.h

    @property
    def coords(self) -> np.ndarray:
        return self._universe.coords

    @property
    def k_values(self) -> np.ndarray:
        return self._k

    def __len__(self) -> int:
        return len(self._k)

    def __iter__(self):
        return iter(self._universe)

    def __getitem__(self, ray) -> int:
        try:
            i = self._universe.index_of(ray)
        except ValidationError:
            raise KeyError(ray) from None
        return int(self._k[i])

    def __repr__(self) -> str:
        return f"BlowdownTable(h={self.h}, n_rays={len(self)})"

    def count_geq(self, k: int) -> int:
        """Number of rays with blowdown index >= k."""
        if k < 1:
            raise ValidationError(f"index threshold must be >= 1, got {k}")
        return int(np.count_nonzero(self._k >= k))

    def ratio_geq(self, k: int) -> Fraction:
        """Exact fraction of rays with blowdown index >= k."""
        return Fraction(self.count_geq(k), len(self))


def neighbors(h: int, ray) -> tuple[RayVec, RayVec]:
    """Angular predecessor and successor of a ray within the height-h universe."""
    universe = enumerate_rays(h)
    i = universe.index_of(ray)
    n = len(universe)
    return universe[(i - 1) % n], universe[(i + 1) % n]


def blowdown_index(h: int, ray) -> int:
    """Blowdown index of one ray: the k with k * u = u_tau + u_omega.

    Cross-checked against |wedge(tau, omega)|; a mismatch raises rather than
    being silently ignored.
    """
    tau, omega = neighbors(h, ray)
    x, y = ray
    x, y = int(x), int(y)
    sx, sy = tau.x + omega.x, tau.y + omega.y
    k = sx // x if x != 0 else sy // y
    if k < 1 or (k * x, k * y) != (sx, sy):
        raise InvariantError(
            f"neighbor sum ({sx}, {sy}) is not a positive multiple of ({x}, {y})"
        )
    if k != abs(wedge(tau, omega)):
        raise InvariantError("neighbor-sum index disagrees with the neighbor wedge")
    return k


@lru_cache(maxsize=2)
def blowdown_table(h: int) -> BlowdownTable:
    """Blowdown index of every ray at height h, in one vectorized pass.

    Solves k * u = u_tau + u_omega for all rays at once and verifies, for
    every ray, both the componentwise identity and agreement with the
    neighbor wedge |wedge(tau, omega)|.  Results are cached.
    """
    universe = enumerate_rays(h)
    c = universe.coords
    tau = np.roll(c, 1, axis=0)
    omega = np.roll(c, -1, axis=0)
    s = tau + omega
    # divide by whichever coordinate is nonzero (primitive vectors have one)
    safe_x = np.where(c[:, 0] != 0, c[:, 0], 1)
    safe_y = np.where(c[:, 1] != 0, c[:, 1], 1)
    k = np.where(c[:, 0] != 0, s[:, 0] // safe_x, s[:, 1] // safe_y)
    if not bool((k >= 1).all()) or not bool((k[:, None] * c == s).all()):
        raise InvariantError("a neighbor sum is not a positive multiple of its ray")
    cross = np.abs(tau[:, 0] * omega[:, 1] - tau[:, 1] * omega[:, 0])
    if not bool((cross == k).all()):
        raise InvariantError("neighbor-sum indices disagree with neighbor wedges")
    return BlowdownTable(universe, k, epsilon_of(h))


def ratio_geq(h: int, k: int) -> Fraction:
    """Exact fraction of height-h rays with blowdown index >= k."""
    return blowdown_table(h).ratio_geq(k)


def epsilon_of(h: int) -> float:
    """Largest sup-norm gap between normalized angular neighbors at height h.

    Rays are scaled onto the unit sup-norm sphere; the maximum |difference|
    over adjacent pairs shrinks toward 0 as h grows.  This is the measured
    eps carried by the lower norm band.
    """
    c = enumerate_rays(h).coords.astype(np.float64)
    norms = np.maximum(np.abs(c[:, 0]), np.abs(c[:, 1]))
    unit = c / norms[:, None]
    step = np.roll(unit, -1, axis=0) - unit
    return float(np.abs(step).max())


def band_bounds(h: int, k: int, eps: float) -> tuple[float, Fraction]:
    """Norm band (lower, upper) for rays of blowdown index k at height h.

    The upper bound 2h/k is exact (equivalently k * |u| <= 2h in integers);
    the lower bound (2 - eps)/(k + 2) * h is asymptotic and carries the
    measured eps, so callers should allow integer rounding slack against it.
    """
    if k < 1:
        raise ValidationError(f"blowdown index must be >= 1, got {k}")
    if not 0.0 <= eps < 2.0:
        raise ValidationError(f"eps must be in [0, 2), got {eps!r}")
    return (2.0 - eps) / (k + 2) * h, Fraction(2 * h, k)


def triangular(k: int) -> int:
    """k-th triangular number k(k+1)/2."""
    if k < 1:
        raise ValidationError(f"triangular numbers need k >= 1, got {k}")
    return k * (k + 1) // 2


def conjectured_ratio(k: int) -> Fraction:
    """Conjectured limiting fraction of rays with blowdown index >= k: 2/T_k."""
    if k < 2:
        raise ValidationError(f"the limiting ratio is defined for k >= 2, got {k}")
    return Fraction(2, triangular(k))


def smooth_partners(h: int, ray) -> list[RayVec]:
    """All height-h rays spanning a unimodular cone with the given ray.

    These are the universe vectors v with |wedge(ray, v)| = 1; they lie on
    the two lattice lines at distance 1 from the ray's span, which caps each
    side at 2h / sup_norm(ray) + 1 points.  The cap is enforced.
    """
    x, y = ray
    x, y = int(x), int(y)
    if not is_primitive(x, y):
        raise ValidationError(f"({x}, {y}) is not a primitive lattice vector")
    universe = enumerate_rays(h)
    c = universe.coords
    w = x * c[:, 1] - y * c[:, 0]
    cap = 2 * h // max(abs(x), abs(y)) + 1
    for side in (1, -1):
        if int(np.count_nonzero(w == side)) > cap:
            raise InvariantError("smooth partners exceed the per-side line capacity")
    return [RayVec(int(a), int(b)) for a, b in c[np.abs(w) == 1]]
