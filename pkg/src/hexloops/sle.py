"""Numerical chordal SLE(6): driving sampling, trace extraction, transport.

The Loewner flow is discretized with vertical slits: over each time step the
driving value is held constant, for which the elementary inverse map has the
closed form w -> W + sqrt((w - W)^2 - 4 dt) with the square root taken in the
closed upper half plane.  A trace point gamma(t_k) composes these inverse
maps from step k down to step 1, starting at the driving position; the
backward pass is shared, so all requested sample times are produced in one
sweep, vectorized over the pending tips.  Traces can be transported to the
unit disc by the Moebius map sending (0, infinity) to (-i, i), or to a
star-shaped Jordan polygon through a conjugate-function boundary map.
"""

from __future__ import annotations

import cmath
import math
from dataclasses import dataclass
from typing import Callable, Optional, Sequence

import numpy as np


class ConformalMapError(RuntimeError):
    pass


@dataclass
class DrivingFunction:
    times: np.ndarray
    values: np.ndarray
    kappa: float
    seed: Optional[int] = None

    @property
    def dt(self) -> float:
        return float(self.times[1] - self.times[0])

    @property
    def t_max(self) -> float:
        return float(self.times[-1])


def sample_driving(kappa: float, t_max: float, dt: float,
                   seed: int) -> DrivingFunction:
    """Brownian driving with Var W(t) = kappa*t on a uniform grid, W(0) = 0."""
    if dt <= 0 or t_max < dt:
        raise ValueError("need dt > 0 and t_max >= dt")
    n = int(round(t_max / dt))
    rng = np.random.default_rng(seed)
    increments = rng.standard_normal(n) * math.sqrt(kappa * dt)
    values = np.concatenate([[0.0], np.cumsum(increments)])
    times = np.linspace(0.0, n * dt, n + 1)
    return DrivingFunction(times=times, values=values, kappa=kappa, seed=seed)


def zero_driving(t_max: float, dt: float) -> DrivingFunction:
    n = int(round(t_max / dt))
    return DrivingFunction(times=np.linspace(0.0, n * dt, n + 1),
                           values=np.zeros(n + 1), kappa=0.0)


def constant_driving(c: float, t_max: float, dt: float) -> DrivingFunction:
    n = int(round(t_max / dt))
    values = np.full(n + 1, float(c))
    values[0] = 0.0
    return DrivingFunction(times=np.linspace(0.0, n * dt, n + 1),
                           values=values, kappa=0.0)


@dataclass
class HalfPlaneTrace:
    points: np.ndarray            # complex; points[0] = 0
    times: np.ndarray
    dt: float
    t_max: float
    seed: Optional[int] = None
    clamped: int = 0              # tips nudged back to Im >= 0

    def to_json(self) -> dict:
        return {
            "schema": "hexloops/trace/v1",
            "dt": self.dt,
            "t_max": self.t_max,
            "seed": self.seed,
            "points": [[float(p.real), float(p.imag)] for p in self.points],
        }


def _upper_sqrt_vec(w: np.ndarray) -> np.ndarray:
    s = np.sqrt(w.astype(complex))
    flip = s.imag < 0
    s[flip] = -s[flip]
    return s


def trace_from_driving(driving: DrivingFunction,
                       stride: int = 1) -> HalfPlaneTrace:
    """Trace sampled every `stride` steps (always including 0 and t_max)."""
    W = driving.values
    dt = driving.dt
    n = len(W) - 1
    out_idx = list(range(0, n + 1, stride))
    if out_idx[-1] != n:
        out_idx.append(n)
    pos_of = {k: i for i, k in enumerate(out_idx)}
    z = np.zeros(len(out_idx), dtype=complex)
    root = 2.0 * math.sqrt(dt)
    clamped = 0
    lo = len(out_idx)
    for j in range(n, 0, -1):
        if lo < len(out_idx):
            sl = z[lo:]
            s = _upper_sqrt_vec((sl - W[j]) ** 2 - 4.0 * dt)
            sl = W[j] + s
            neg = sl.imag < 0
            if np.any(neg):
                clamped += int(neg.sum())
                sl[neg] = sl[neg].real + 0j
            z[lo:] = sl
        i = pos_of.get(j)
        if i is not None:
            lo = i
            z[lo] = complex(W[j], root)
    z[0] = 0.0
    return HalfPlaneTrace(points=z, times=driving.times[out_idx], dt=dt,
                          t_max=driving.t_max, seed=driving.seed,
                          clamped=clamped)


def tip_at(driving: DrivingFunction) -> complex:
    """gamma(t_max) alone, without computing the rest of the trace."""
    W = driving.values
    dt = driving.dt
    n = len(W) - 1
    z = complex(W[n], 2.0 * math.sqrt(dt))
    for j in range(n - 1, 0, -1):
        s = cmath.sqrt((z - W[j]) ** 2 - 4.0 * dt)
        if s.imag < 0:
            s = -s
        z = W[j] + s
    return z


def map_half_plane_to_disc() -> Callable[[complex], complex]:
    """The Moebius map m(z) = i(z - i)/(z + i): H -> disc, 0 -> -i, inf -> i."""
    def m(z: complex) -> complex:
        if abs(z) > 1e12:
            return 1j
        return 1j * (z - 1j) / (z + 1j)
    return m


def inverse_disc_map(w: complex) -> complex:
    """Inverse of map_half_plane_to_disc (pole at w = i)."""
    if abs(w - 1j) < 1e-14:
        return complex(math.inf, 0.0)
    return (1.0 - 1j * w) / (w - 1j)


def transport_to_disc(trace: HalfPlaneTrace) -> np.ndarray:
    z = trace.points
    return 1j * (z - 1j) / (z + 1j)


@dataclass
class JordanDomainMap:
    """Numerical conformal map from the half-plane onto a Jordan polygon."""

    vertices: np.ndarray              # polygon corners, counterclockwise
    a: complex
    b: complex
    center: complex
    h_coeffs: np.ndarray              # power series of log((F - center)/w)
    mobius_u: float
    mobius_v: float
    mobius_lambda: float

    def disc_to_domain(self, w) -> np.ndarray:
        w = np.asarray(w, dtype=complex)
        h = np.zeros_like(w)
        wp = np.ones_like(w)
        for c in self.h_coeffs:
            h = h + c * wp
            wp = wp * w
        return self.center + w * np.exp(h)

    def halfplane_to_disc(self, z) -> np.ndarray:
        z = np.asarray(z, dtype=complex)
        u, v, lam = self.mobius_u, self.mobius_v, self.mobius_lambda
        bz = (v * z + lam * u) / (z + lam)
        return 1j * (bz - 1j) / (bz + 1j)

    def __call__(self, z) -> np.ndarray:
        return self.disc_to_domain(self.halfplane_to_disc(z))


def _polygon_radius_function(vertices: np.ndarray, center: complex,
                             thetas: np.ndarray) -> np.ndarray:
    """Ray-boundary intersection distances for a star-shaped polygon."""
    n = len(vertices)
    rho = np.full(len(thetas), np.nan)
    dirs = np.cos(thetas) + 1j * np.sin(thetas)
    for i in range(n):
        p = vertices[i] - center
        q = vertices[(i + 1) % n] - center
        e = q - p
        for k in range(len(thetas)):
            d = dirs[k]
            det = e.real * (-d.imag) - (-d.real) * e.imag
            if abs(det) < 1e-14:
                continue
            s = (-p.real * (-d.imag) - (-d.real) * (-p.imag)) / det
            t = (e.real * (-p.imag) - (-p.real) * e.imag) / det
            if -1e-12 <= s <= 1 + 1e-12 and t > 1e-12:
                if not math.isnan(rho[k]) and abs(rho[k] - t) > 1e-9 * (1 + t):
                    raise ConformalMapError(
                        "polygon is not star-shaped about its centroid")
                rho[k] = t
    if np.any(np.isnan(rho)):
        raise ConformalMapError("radius function has gaps; bad polygon")
    return rho


def map_to_jordan_domain(polygon: Sequence[complex], a: complex, b: complex,
                         n_grid: int = 1024, max_iter: int = 400,
                         tol: float = 1e-12) -> JordanDomainMap:
    """Conformal map H -> polygon interior with 0 -> a and infinity -> b.

    The disc-to-polygon factor solves the boundary correspondence of a
    star-shaped domain by conjugate-function iteration on an FFT grid; the
    anchors are then matched with a real Moebius reparametrization of the
    half-plane.  Raises ConformalMapError when the polygon is unsuitable or
    the iteration stalls.
    """
    verts = np.asarray(polygon, dtype=complex)
    if len(verts) < 3:
        raise ValueError("polygon needs at least 3 vertices")
    area2 = float(np.sum(verts.real * np.roll(verts.imag, -1)
                         - np.roll(verts.real, -1) * verts.imag))
    if area2 == 0:
        raise ConformalMapError("degenerate polygon")
    if area2 < 0:
        verts = verts[::-1].copy()
    center = complex(verts.real.mean(), verts.imag.mean())

    phis = np.arange(n_grid) * (2.0 * math.pi / n_grid)
    freqs = np.fft.fftfreq(n_grid, d=1.0 / n_grid)
    conj_mult = -1j * np.sign(freqs)

    def rho_of(thetas: np.ndarray) -> np.ndarray:
        return _polygon_radius_function(verts, center,
                                        np.mod(thetas, 2.0 * math.pi))

    theta = phis.copy()
    delta = math.inf
    for _ in range(max_iter):
        conj = np.real(np.fft.ifft(np.fft.fft(np.log(rho_of(theta)))
                                   * conj_mult))
        new_theta = phis + conj
        delta = float(np.max(np.abs(new_theta - theta)))
        theta = 0.5 * (theta + new_theta)
        if delta < tol:
            break
    if delta >= 1e-8:
        raise ConformalMapError(
            f"boundary correspondence did not converge (residual {delta:.2e})")

    boundary_h = np.log(rho_of(theta)) + 1j * (theta - phis)
    coeffs = np.fft.fft(boundary_h) / n_grid
    h_coeffs = coeffs[: n_grid // 2]

    unwrapped = np.unwrap(theta)
    ext_theta = np.append(unwrapped, unwrapped[0] + 2.0 * math.pi)
    ext_phi = np.append(phis, 2.0 * math.pi)

    def phi_for_angle(target: float) -> float:
        t = unwrapped[0] + ((target - unwrapped[0]) % (2.0 * math.pi))
        return float(np.interp(t, ext_theta, ext_phi))

    theta_a = math.atan2((a - center).imag, (a - center).real)
    theta_b = math.atan2((b - center).imag, (b - center).real)
    alpha = cmath.exp(1j * phi_for_angle(theta_a))
    beta = cmath.exp(1j * phi_for_angle(theta_b))

    def inv_mobius(w: complex) -> float:
        if abs(w - 1j) < 1e-12:
            raise ConformalMapError("anchor at the Moebius pole; perturb it")
        return float(((1.0 - 1j * w) / (w - 1j)).real)

    u = inv_mobius(alpha)
    v = inv_mobius(beta)
    lam = 1.0 if v > u else -1.0

    return JordanDomainMap(vertices=verts, a=a, b=b, center=center,
                           h_coeffs=h_coeffs, mobius_u=u, mobius_v=v,
                           mobius_lambda=lam)
