"""Cosphere phase-space numerics: momentum, invariants, seeded zero-level
sampling, and reduced-space membership.

Points live on the unit cosphere of R^{2n}: a base point ``x`` and a unit
covector ``u``.  Per plane j the four classical invariants are

    p1 = |x_j|^2 + |u_j|^2      p2 = 2 x_j . u_j
    p3 = |u_j|^2 - |x_j|^2      p4 = x_j1 u_j2 - x_j2 u_j1,

subject to p1 >= 0 and p1^2 = p2^2 + p3^2 + 4 p4^2, and the momentum of a
weight matrix A is J_i = sum_j A[i][j] p4_j.  On the zero level the
reduced-space coordinates drop the momentum components, keeping
(p1, p2, p3) per plane in plane order.

The zero-level sampler solves J = 0 exactly in the covector: for fixed x
the momentum is linear, J = M(x) u, so covectors are drawn inside an
orthonormal kernel basis of M(x).  Singular strata are reached by forcing
exact zeros through support patterns, never by thresholding noise.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable, Sequence

import numpy as np
from scipy.linalg import null_space

from .torus import TorusActionSpec, stabilizer_of_support

SUPPORT_TOL = 1e-10
IDENTITY_TOL = 1e-9
MEMBERSHIP_BAND = 1e-8
UNIT_TOL = 1e-12


class PhaseError(ValueError):
    pass


class NotOnZeroLevelError(PhaseError):
    pass


class EmptyKernelError(PhaseError):
    """No admissible covector exists for the drawn base point."""


class RetriesExhaustedError(PhaseError):
    pass


class NoMatchingStratumError(PhaseError):
    pass


class AmbiguousMembershipError(PhaseError):
    """More than one stratum matched: the fixture's pieces are not disjoint."""


@dataclass(frozen=True, eq=False)
class PhasePoint:
    """A point of the unit cosphere bundle of R^{2n}.

    The covector must be normalized: |u| = 1 within 1e-12.  Use
    :meth:`normalized` to build one from raw data.
    """

    x: np.ndarray
    u: np.ndarray

    def __post_init__(self) -> None:
        x = np.array(self.x, dtype=float)
        u = np.array(self.u, dtype=float)
        if x.ndim != 1 or x.shape != u.shape or x.size % 2 or x.size == 0:
            raise PhaseError("x and u must be equal-length even-dimensional vectors")
        if abs(float(np.linalg.norm(u)) - 1.0) > UNIT_TOL:
            raise PhaseError(f"|u| = {np.linalg.norm(u)} is not 1 within {UNIT_TOL}")
        x.setflags(write=False)
        u.setflags(write=False)
        object.__setattr__(self, "x", x)
        object.__setattr__(self, "u", u)

    @classmethod
    def normalized(cls, x: Sequence[float], u: Sequence[float]) -> "PhasePoint":
        u = np.asarray(u, dtype=float)
        norm = float(np.linalg.norm(u))
        if norm == 0.0:
            raise PhaseError("cannot normalize a zero covector")
        return cls(np.asarray(x, dtype=float), u / norm)

    @property
    def n(self) -> int:
        return self.x.size // 2

    def planes(self) -> tuple[np.ndarray, np.ndarray]:
        """(x, u) reshaped to (n, 2): one row per plane."""
        return self.x.reshape(-1, 2), self.u.reshape(-1, 2)


@dataclass(frozen=True, eq=False)
class InvariantVector:
    """Per-plane invariant table of shape (n, 4), columns (p1, p2, p3, p4)."""

    table: np.ndarray

    def __post_init__(self) -> None:
        t = np.array(self.table, dtype=float)
        if t.ndim != 2 or t.shape[1] != 4:
            raise PhaseError("invariant table must have shape (n, 4)")
        t.setflags(write=False)
        object.__setattr__(self, "table", t)

    @property
    def n(self) -> int:
        return self.table.shape[0]

    @property
    def p1(self) -> np.ndarray:
        return self.table[:, 0]

    @property
    def p2(self) -> np.ndarray:
        return self.table[:, 1]

    @property
    def p3(self) -> np.ndarray:
        return self.table[:, 2]

    @property
    def p4(self) -> np.ndarray:
        return self.table[:, 3]

    def hilbert_image(self) -> np.ndarray:
        """(p1, p2, p3) per plane, flattened in plane order."""
        return self.table[:, :3].reshape(-1).copy()

    def cone_residuals(self) -> np.ndarray:
        """Per-plane residual of p1^2 - p2^2 - p3^2 - 4 p4^2 (an identity)."""
        return self.p1**2 - self.p2**2 - self.p3**2 - 4.0 * self.p4**2

    def cosphere_sum(self) -> float:
        """sum of (p1 + p3) over planes; equals 2 on the unit cosphere."""
        return float(np.sum(self.p1 + self.p3))


def invariants(point: PhasePoint) -> InvariantVector:
    """The per-plane Hilbert generators of the phase point."""
    xs, us = point.planes()
    xx = np.sum(xs * xs, axis=1)
    uu = np.sum(us * us, axis=1)
    table = np.column_stack([
        xx + uu,
        2.0 * np.sum(xs * us, axis=1),
        uu - xx,
        xs[:, 0] * us[:, 1] - xs[:, 1] * us[:, 0],
    ])
    return InvariantVector(table)


def momentum(spec: TorusActionSpec, point: PhasePoint) -> np.ndarray:
    """The contact momentum J(x, u) = A p4 of the lifted action."""
    if point.n != spec.n:
        raise PhaseError(f"point has {point.n} planes, spec has {spec.n}")
    weights = np.array(spec.weights, dtype=float)
    return weights @ invariants(point).p4


def hilbert_map(
    spec: TorusActionSpec, point: PhasePoint, tol: float = SUPPORT_TOL
) -> np.ndarray:
    """Reduced-space coordinates of a zero-level point.

    Raises :class:`NotOnZeroLevelError` when |J| exceeds ``tol``; the
    momentum components are dropped from the output.
    """
    j = momentum(spec, point)
    norm = float(np.max(np.abs(j)))
    if norm > tol:
        raise NotOnZeroLevelError(f"|J| = {norm} exceeds {tol}")
    return invariants(point).hilbert_image()


def support_of(point: PhasePoint, tol: float = SUPPORT_TOL) -> tuple[int, ...]:
    """Planes where (x_j, u_j) is nonzero beyond ``tol``."""
    xs, us = point.planes()
    mass = np.sqrt(np.sum(xs * xs, axis=1) + np.sum(us * us, axis=1))
    return tuple(int(j) for j in np.nonzero(mass > tol)[0])


def classify_point(
    spec: TorusActionSpec, point: PhasePoint, tol: float = SUPPORT_TOL
) -> str:
    """Orbit-type label of the point in the lifted action."""
    return stabilizer_of_support(spec, support_of(point, tol)).label


def momentum_matrix(spec: TorusActionSpec, x: np.ndarray) -> np.ndarray:
    """The k x 2n matrix M(x) with J(x, u) = M(x) u (momentum is linear in u)."""
    weights = np.array(spec.weights, dtype=float)
    m = np.zeros((spec.k, 2 * spec.n))
    xs = np.asarray(x, dtype=float).reshape(-1, 2)
    m[:, 0::2] = -weights * xs[:, 1]
    m[:, 1::2] = weights * xs[:, 0]
    return m


def _as_plane_set(pattern: Iterable[int] | None, n: int) -> tuple[int, ...]:
    if pattern is None:
        return tuple(range(n))
    planes = tuple(sorted(set(int(j) for j in pattern)))
    if any(j < 0 or j >= n for j in planes):
        raise PhaseError(f"support pattern {planes} outside 0..{n - 1}")
    return planes


def sample_zero_level(
    spec: TorusActionSpec,
    seed: int,
    count: int,
    support_pattern: Iterable[int] | None = None,
    covector_pattern: Iterable[int] | None = None,
    max_retries: int = 64,
) -> list[PhasePoint]:
    """Draw exact zero-level cosphere points, deterministically from the seed.

    Base coordinates are Gaussian on the planes of ``support_pattern`` and
    exactly zero elsewhere; the covector is drawn in an orthonormal basis
    of ker M(x) restricted to ``covector_pattern`` planes, then normalized,
    so |J| vanishes to machine precision.  Each sample depends only on
    (seed, index), so batches can be evaluated concurrently and merged in
    index order.
    """
    xp = _as_plane_set(support_pattern, spec.n)
    up = _as_plane_set(covector_pattern, spec.n)
    if not up:
        raise EmptyKernelError("empty covector pattern leaves no unit covector")
    ucols = np.array([c for j in up for c in (2 * j, 2 * j + 1)], dtype=int)

    out: list[PhasePoint] = []
    for index in range(count):
        rng = np.random.default_rng([int(seed), int(index)])
        point: PhasePoint | None = None
        for _ in range(max_retries):
            x = np.zeros(2 * spec.n)
            for j in xp:
                x[2 * j : 2 * j + 2] = rng.normal(size=2)
            kernel = null_space(momentum_matrix(spec, x)[:, ucols])
            if kernel.shape[1] == 0:
                continue
            coeff = rng.normal(size=kernel.shape[1])
            u_active = kernel @ coeff
            norm = float(np.linalg.norm(u_active))
            if norm < 1e-8:
                continue
            u = np.zeros(2 * spec.n)
            u[ucols] = u_active / norm
            point = PhasePoint(x, u)
            break
        if point is None:
            raise RetriesExhaustedError(
                f"no admissible covector after {max_retries} draws for sample {index}"
            )
        out.append(point)
    return out


def membership_candidates(
    fixture, image: np.ndarray | InvariantVector, band: float = MEMBERSHIP_BAND
) -> tuple[list[tuple[str, float]], list[tuple[str, str, float]]]:
    """All pieces matching the image at the given band.

    Returns (matches, near_misses): matches as (piece name, worst equality
    residual), near misses as (piece name, violated constraint, value).
    """
    if isinstance(image, InvariantVector):
        image = image.hilbert_image()
    image = np.asarray(image, dtype=float)

    matches: list[tuple[str, float]] = []
    near_misses: list[tuple[str, str, float]] = []
    for piece in fixture.pieces:
        ok = True
        residual = 0.0
        worst: tuple[str, float] | None = None
        for c in piece.constraints:
            val = c.poly(image)
            if c.kind == "eq":
                if abs(val) > band:
                    ok = False
                    worst = (c.text, abs(val))
                    break
                residual = max(residual, abs(val))
            elif c.kind == "gt":
                if val <= band:
                    ok = False
                    worst = (c.text, val)
                    break
            elif c.kind == "lt":
                if val >= -band:
                    ok = False
                    worst = (c.text, val)
                    break
            elif c.kind == "ne":
                if abs(val) <= band:
                    ok = False
                    worst = (c.text, val)
                    break
            else:
                raise PhaseError(f"unknown constraint kind {c.kind!r}")
        if ok:
            matches.append((piece.name, residual))
        elif worst is not None:
            near_misses.append((piece.name, worst[0], worst[1]))
    return matches, near_misses


def check_reduced_membership(
    fixture, image: np.ndarray | InvariantVector, band: float = MEMBERSHIP_BAND
) -> tuple[str, float]:
    """Locate a reduced point inside the fixture's semialgebraic pieces.

    Equalities accept residuals up to ``band``; strict inequalities and
    disequalities demand clearance beyond the same band, so the pieces
    stay complementary.  Returns the unique matching piece name and its
    worst equality residual.  Raises :class:`NoMatchingStratumError` or
    :class:`AmbiguousMembershipError` otherwise.
    """
    matches, near_misses = membership_candidates(fixture, image, band)
    if not matches:
        detail = "; ".join(f"{n}: {t} = {v:.3e}" for n, t, v in near_misses[:4])
        raise NoMatchingStratumError(f"no stratum matches the image ({detail})")
    if len(matches) > 1:
        raise AmbiguousMembershipError(
            f"image matches {[m[0] for m in matches]}: pieces are not disjoint"
        )
    return matches[0]


def k0_project(
    inv: InvariantVector | np.ndarray, offsets: Sequence[float] | None = None
) -> np.ndarray:
    """Project reduced coordinates to the singular base chart.

    Per plane j the image is (p1_j - c_j, 0, c_j - p1_j) where c_j is the
    plane's covector-mass offset, 1 by default (the value for which the
    example charts split the cosphere constraint evenly).  Accepts an
    invariant table or a flattened reduced image.
    """
    if isinstance(inv, InvariantVector):
        p1 = np.array(inv.p1, dtype=float)
    else:
        arr = np.asarray(inv, dtype=float)
        if arr.ndim != 1 or arr.size % 3:
            raise PhaseError("expected a flattened (p1, p2, p3)-per-plane image")
        p1 = arr[0::3].copy()
    n = p1.size
    c = np.ones(n) if offsets is None else np.asarray(offsets, dtype=float)
    if c.shape != (n,):
        raise PhaseError(f"need one offset per plane, got shape {c.shape}")
    out = np.zeros(3 * n)
    out[0::3] = p1 - c
    out[2::3] = c - p1
    return out
