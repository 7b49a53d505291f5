"""Verification batteries over the builtin fixtures.

The sampling battery draws seeded zero-level points (generic plus one
forced-support probe per stratum), then checks the invariant identities,
orbit-type classification, semialgebraic membership, and where the chart
is exact the base projection.  The flow battery compares the closed-form
invariant flow against the exact flow and the Runge-Kutta route, and
drives seam samples into their cosphere-like piece.

Everything is deterministic given the seed; reports are JSON-ready dicts
with sorted keys so repeated runs are byte-identical.
"""

from __future__ import annotations

import numpy as np

from . import phase, reeb, strata, torus
from .fixtures import Fixture, stratum_of
from .phase import (
    IDENTITY_TOL,
    MEMBERSHIP_BAND,
    SUPPORT_TOL,
    check_reduced_membership,
    classify_point,
    hilbert_map,
    invariants,
    k0_project,
    momentum,
    sample_zero_level,
)

PROBE_SEED_STRIDE = 1000003


def _probe_seed(seed: int, probe_index: int) -> int:
    return int(seed) + PROBE_SEED_STRIDE * (probe_index + 1)


def _cone_rel_errors(inv: phase.InvariantVector) -> np.ndarray:
    scale = np.maximum(1.0, inv.p1**2)
    return np.abs(inv.cone_residuals()) / scale


def parent_cc_name(stratum: strata.Stratum) -> str:
    """The cosphere-like piece of the contact stratum containing ``stratum``."""
    label = stratum.parent_contact[len("Contact(") : -1]
    return strata.cc_name(label)


def verify_fixture(
    fixture: Fixture,
    seed: int = 0,
    count: int = 10000,
    band: float = MEMBERSHIP_BAND,
) -> dict:
    """Sampling verification of one fixture; see module docstring.

    The generic probe draws ``count`` samples, the singular probes a tenth
    each (at least 200).  Every sample must sit on the zero level within
    1e-10, satisfy the cosphere and cone identities within 1e-9, classify
    into a starred orbit type, and land in exactly one semialgebraic piece.
    """
    spec = fixture.spec
    poset = torus.build_isotropy_poset(spec)
    starred = strata.starred_lattice(poset)
    result = strata.cl_stratification(poset)
    principal_cc = strata.cc_name(strata.principal_type(poset).label)

    probe_reports = []
    all_passed = True
    for idx, probe in enumerate(fixture.probes):
        n_samples = count if probe.support_pattern is None and probe.covector_pattern is None \
            else max(200, count // 10)
        points = sample_zero_level(
            spec,
            seed=_probe_seed(seed, idx),
            count=n_samples,
            support_pattern=probe.support_pattern,
            covector_pattern=probe.covector_pattern,
        )
        failures: list[str] = []
        max_j = 0.0
        max_cosphere = 0.0
        max_cone = 0.0
        max_residual = 0.0
        class_counts: dict[str, int] = {}
        piece_counts: dict[str, int] = {}
        k0_err = 0.0
        for p in points:
            max_j = max(max_j, float(np.max(np.abs(momentum(spec, p)))))
            inv = invariants(p)
            max_cosphere = max(max_cosphere, abs(inv.cosphere_sum() - 2.0))
            max_cone = max(max_cone, float(np.max(_cone_rel_errors(inv))))
            label = classify_point(spec, p)
            class_counts[label] = class_counts.get(label, 0) + 1
            if label not in starred:
                failures.append(f"classified into unstarred type ({label})")
                continue
            try:
                name, residual = check_reduced_membership(
                    fixture, inv.hilbert_image(), band=band
                )
            except phase.PhaseError as exc:
                failures.append(str(exc))
                continue
            piece_counts[name] = piece_counts.get(name, 0) + 1
            max_residual = max(max_residual, residual)
            if fixture.k0_geometric:
                xs = p.x.reshape(-1, 2)
                t_planes = np.sum(xs * xs, axis=1)
                base = np.zeros(3 * spec.n)
                base[0::3] = t_planes
                base[2::3] = -t_planes
                k0 = k0_project(inv.hilbert_image(), fixture.k0_offsets)
                k0_err = max(k0_err, float(np.max(np.abs(k0 - base))))

        expected = sum(piece_counts.get(name, 0) for name in probe.expect_pieces)
        fraction = expected / len(points) if points else 0.0
        class_fraction = (
            class_counts.get(probe.expect_class, 0) / len(points) if points else 0.0
        )
        checks = {
            "momentum_zero": max_j <= SUPPORT_TOL,
            "cosphere_sum": max_cosphere <= IDENTITY_TOL,
            "cone_identity": max_cone <= IDENTITY_TOL,
            "classification_starred": not any("unstarred" in f for f in failures),
            "membership_total": len(failures) == 0,
            "membership_residual": max_residual < band,
            "expected_pieces": fraction >= probe.min_fraction,
            "expected_class": class_fraction >= probe.min_fraction,
        }
        if fixture.k0_geometric:
            checks["k0_geometric"] = k0_err <= IDENTITY_TOL
        passed = all(checks.values())
        all_passed = all_passed and passed
        probe_reports.append(
            {
                "name": probe.name,
                "count": len(points),
                "max_momentum": max_j,
                "max_cosphere_error": max_cosphere,
                "max_cone_rel_error": max_cone,
                "max_membership_residual": max_residual,
                "k0_max_error": k0_err if fixture.k0_geometric else None,
                "class_counts": dict(sorted(class_counts.items())),
                "piece_counts": dict(sorted(piece_counts.items())),
                "expected_fraction": fraction,
                "checks": checks,
                "failures": failures[:10],
                "passed": passed,
            }
        )

    # pieces may be connected components (CC(e):L etc), so compare strata
    generic = probe_reports[0] if probe_reports else None
    principal_fraction = 0.0
    if generic is not None and generic["count"]:
        principal_fraction = sum(
            v for k, v in generic["piece_counts"].items()
            if stratum_of(k) == principal_cc
        ) / generic["count"]
    principal_ok = principal_fraction >= 0.99
    all_passed = all_passed and principal_ok

    return {
        "fixture": fixture.name,
        "seed": seed,
        "count": count,
        "band": band,
        "starred": sorted(starred),
        "pieces": sorted(p.name for p in fixture.pieces),
        "cl_strata": sorted(s.name for s in result.cl_strata),
        "principal_cc": principal_cc,
        "principal_fraction": principal_fraction,
        "principal_fraction_ok": principal_ok,
        "probes": probe_reports,
        "passed": all_passed,
    }


def flow_checks(
    fixture: Fixture,
    seed: int = 0,
    starts: int = 1000,
    t_grid: tuple[float, ...] = (0.1, 0.5, 1.0, 2.0),
    t_end: float = 2.0,
    step: float = 1e-3,
) -> dict:
    """Reeb-flow verification: closed form vs exact flow vs RK4, plus the
    seam-to-cosphere dynamical check at t = 0.5."""
    spec = fixture.spec
    points = sample_zero_level(spec, seed=seed, count=starts)

    closed_vs_exact = 0.0
    for p in points:
        inv0 = invariants(p)
        for t in t_grid:
            lhs = invariants(reeb.flow_exact(p, t)).table
            rhs = reeb.flow_invariants_closed(inv0, t).table
            closed_vs_exact = max(closed_vs_exact, float(np.max(np.abs(lhs - rhs))))

    traj = reeb.flow_rk4(points[0], t_end=t_end, step=step)
    endpoint = reeb.flow_exact(points[0], t_end)
    rk4_endpoint_err = max(
        float(np.max(np.abs(traj.xs[-1] - endpoint.x))),
        float(np.max(np.abs(traj.us[-1] - endpoint.u))),
    )
    drift = reeb.conservation_report(traj)

    seam_flow_failures: list[str] = []
    seam_probes = [
        (i, pr) for i, pr in enumerate(fixture.probes)
        if all(name.startswith("Seam(") for name in pr.expect_pieces)
    ]
    result = strata.cl_stratification(torus.build_isotropy_poset(spec))
    by_name = {s.name: s for s in result.cl_strata}
    for idx, probe in seam_probes:
        seam_points = sample_zero_level(
            spec,
            seed=_probe_seed(seed, idx) + 17,
            count=200,
            support_pattern=probe.support_pattern,
            covector_pattern=probe.covector_pattern,
        )
        for p in seam_points:
            start_piece, _ = check_reduced_membership(fixture, invariants(p))
            start_stratum = by_name[stratum_of(start_piece)]
            if not start_piece.startswith("Seam("):
                continue
            flowed = reeb.flow_exact(p, 0.5)
            end_piece, _ = check_reduced_membership(fixture, invariants(flowed))
            expected_cc = parent_cc_name(start_stratum)
            if stratum_of(end_piece) != expected_cc:
                seam_flow_failures.append(
                    f"{start_piece} flowed to {end_piece}, expected {expected_cc}"
                )

    checks = {
        "closed_form_matches_exact": closed_vs_exact <= IDENTITY_TOL,
        "rk4_endpoint": rk4_endpoint_err <= IDENTITY_TOL,
        "rk4_drift": max(drift.values()) <= IDENTITY_TOL,
        "seam_flow_lands_in_cc": not seam_flow_failures,
    }
    return {
        "fixture": fixture.name,
        "seed": seed,
        "starts": starts,
        "t_grid": list(t_grid),
        "closed_vs_exact_max": closed_vs_exact,
        "rk4_endpoint_error": rk4_endpoint_err,
        "drift": drift,
        "seam_flow_failures": seam_flow_failures[:10],
        "checks": checks,
        "passed": all(checks.values()),
    }
