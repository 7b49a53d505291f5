"""Reeb dynamics on the unit cosphere bundle of R^{2n}.

With the flat metric the Reeb vector field of the standard contact form is
horizontal geodesic flow: xdot = u, udot = 0, so the exact flow is the
straight line x(t) = x + t u with frozen covector.  Pushed to the
invariants this gives, per plane and with w = (p1 + p3)/2 = |u_j|^2,

    p1(t) = p1 + p2 t + w t^2
    p2(t) = p2 + 2 w t
    p3(t) = p3 - p2 t - w t^2
    p4(t) = p4,

an identity for every phase point (not only zero-level ones).  These
closed forms serve as the oracle against which the numerical integrator
is checked; p4 and p1 + p3 are conserved exactly.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .phase import InvariantVector, PhasePoint, invariants


@dataclass(frozen=True, eq=False)
class Trajectory:
    """Sampled flow: row i holds the state at times[i]."""

    times: np.ndarray
    xs: np.ndarray
    us: np.ndarray
    method: str

    def __post_init__(self) -> None:
        t = np.array(self.times, dtype=float)
        xs = np.array(self.xs, dtype=float)
        us = np.array(self.us, dtype=float)
        if t.ndim != 1 or xs.shape != us.shape or xs.shape[0] != t.size:
            raise ValueError("times, xs, us must agree in length")
        if np.any(np.diff(t) <= 0):
            raise ValueError("times must be strictly increasing")
        for arr in (t, xs, us):
            arr.setflags(write=False)
        object.__setattr__(self, "times", t)
        object.__setattr__(self, "xs", xs)
        object.__setattr__(self, "us", us)

    def point(self, i: int) -> PhasePoint:
        return PhasePoint(self.xs[i], self.us[i])

    def __len__(self) -> int:
        return int(self.times.size)


def reeb_field(point: PhasePoint) -> tuple[np.ndarray, np.ndarray]:
    """(xdot, udot) of the Reeb field at the point."""
    return point.u.copy(), np.zeros_like(point.u)


def flow_exact(point: PhasePoint, t: float) -> PhasePoint:
    """Exact time-t Reeb flow: a straight line in the base."""
    return PhasePoint(point.x + float(t) * point.u, point.u)


def flow_invariants_closed(inv: InvariantVector, t: float) -> InvariantVector:
    """Closed-form invariants of the flowed point (exact, per plane)."""
    t = float(t)
    w = 0.5 * (inv.p1 + inv.p3)
    table = np.column_stack([
        inv.p1 + inv.p2 * t + w * t * t,
        inv.p2 + 2.0 * w * t,
        inv.p3 - inv.p2 * t - w * t * t,
        inv.p4.copy(),
    ])
    return InvariantVector(table)


def flow_rk4(point: PhasePoint, t_end: float, step: float) -> Trajectory:
    """Classical fourth-order Runge-Kutta integration of the Reeb field.

    The time grid is uniform with a final partial step landing exactly on
    ``t_end``.  Exists as the independent numerical route against the
    closed-form flow; the two must agree to roundoff.
    """
    t_end = float(t_end)
    step = float(step)
    if t_end <= 0 or step <= 0:
        raise ValueError("need positive t_end and step")
    grid = [0.0]
    while grid[-1] + step < t_end - 1e-15:
        grid.append(grid[-1] + step)
    if t_end - grid[-1] > 1e-15:
        grid.append(t_end)
    times = np.array(grid)

    def field(x: np.ndarray, u: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
        return u, np.zeros_like(u)

    xs = np.empty((times.size, point.x.size))
    us = np.empty_like(xs)
    x, u = point.x.copy(), point.u.copy()
    xs[0], us[0] = x, u
    for i in range(1, times.size):
        h = times[i] - times[i - 1]
        k1x, k1u = field(x, u)
        k2x, k2u = field(x + 0.5 * h * k1x, u + 0.5 * h * k1u)
        k3x, k3u = field(x + 0.5 * h * k2x, u + 0.5 * h * k2u)
        k4x, k4u = field(x + h * k3x, u + h * k3u)
        x = x + (h / 6.0) * (k1x + 2 * k2x + 2 * k3x + k4x)
        u = u + (h / 6.0) * (k1u + 2 * k2u + 2 * k3u + k4u)
        xs[i], us[i] = x, u
    return Trajectory(times=times, xs=xs, us=us, method="rk4")


def trajectory_invariants(traj: Trajectory) -> np.ndarray:
    """Invariant tables along the trajectory, shape (len, n, 4)."""
    out = np.empty((len(traj), traj.xs.shape[1] // 2, 4))
    for i in range(len(traj)):
        out[i] = invariants(traj.point(i)).table
    return out


def conservation_report(traj: Trajectory) -> dict[str, float]:
    """Worst-case drift of the conserved quantities along a trajectory.

    Reports the max deviation of per-plane p4 and p1 + p3 from their
    initial values, and of the cosphere sum from 2.
    """
    tables = trajectory_invariants(traj)
    p4 = tables[:, :, 3]
    mass = tables[:, :, 0] + tables[:, :, 2]
    return {
        "p4_drift": float(np.max(np.abs(p4 - p4[0]))),
        "plane_mass_drift": float(np.max(np.abs(mass - mass[0]))),
        "cosphere_sum_drift": float(np.max(np.abs(mass.sum(axis=1) - 2.0))),
    }
