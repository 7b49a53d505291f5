"""Command line interface.

Subcommands
-----------
lattice   write DOT renderings of the isotropy lattice and C-L frontier
reduce    print or write the stratification report as JSON
verify    run the sampling battery on a builtin fixture
flow      integrate the Reeb flow from a seeded start, export CSV
examples  run the complete battery on both builtin fixtures

Exit codes: 0 success, 1 verification failure, 2 invalid input, 3 I/O
failure.  Outputs are byte-deterministic for a fixed configuration and
seed (sorted JSON keys, sorted DOT nodes and edges).
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import sys
import tempfile
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from . import checks, phase, reeb, strata, torus
from .fixtures import BUILTIN_FIXTURES, Fixture, get_fixture, stratum_of
from .poset import IsotropyPoset, PosetError, poset_from_json, poset_to_dot, validate
from .torus import ActionSpecError, TorusActionSpec, spec_from_json

EXIT_OK = 0
EXIT_VERIFICATION = 1
EXIT_INVALID = 2
EXIT_IO = 3


@dataclass
class RunConfig:
    command: str
    action: str | None = None
    fixture: str | None = None
    seed: int = 0
    count: int = 10000
    t_end: float = 2.0
    step: float = 1e-3
    out: str | None = None
    tolerance: float = phase.MEMBERSHIP_BAND
    start: str | None = None


class CliInputError(ValueError):
    pass


def _read_json(path: str) -> dict:
    try:
        text = Path(path).read_text()
    except OSError as exc:
        raise OSError(f"cannot read {path}: {exc}") from exc
    try:
        data = json.loads(text)
    except json.JSONDecodeError as exc:
        raise CliInputError(f"{path} is not valid JSON: {exc}") from exc
    if not isinstance(data, dict):
        raise CliInputError(f"{path}: expected a JSON object")
    return data


def _resolve_source(cfg: RunConfig) -> tuple[IsotropyPoset, TorusActionSpec | None]:
    """Load the isotropy data from --fixture or --action (spec or poset JSON)."""
    if (cfg.fixture is None) == (cfg.action is None):
        raise CliInputError("provide exactly one of --fixture or --action")
    if cfg.fixture is not None:
        try:
            fixture = get_fixture(cfg.fixture)
        except KeyError as exc:
            raise CliInputError(str(exc)) from exc
        return torus.build_isotropy_poset(fixture.spec), fixture.spec
    data = _read_json(cfg.action)
    if "weights" in data:
        spec = spec_from_json(data)
        return torus.build_isotropy_poset(spec), spec
    if "types" in data:
        poset = poset_from_json(data)
        report = validate(poset)
        if not report.ok:
            raise CliInputError("invalid isotropy poset: " + "; ".join(report.violations))
        return poset, None
    raise CliInputError(
        f"{cfg.action}: neither an action spec (weights) nor a poset (types)"
    )


def _require_fixture(cfg: RunConfig) -> Fixture:
    if cfg.fixture is None:
        raise CliInputError("this command needs --fixture (builtin example name)")
    try:
        return get_fixture(cfg.fixture)
    except KeyError as exc:
        raise CliInputError(str(exc)) from exc


def _write_text(path: Path, text: str) -> None:
    path.parent.mkdir(parents=True, exist_ok=True)
    path.write_text(text)


def _dump_json(data: dict) -> str:
    return json.dumps(data, indent=2, sort_keys=True) + "\n"


def cmd_lattice(cfg: RunConfig) -> int:
    """Emit isotropy.dot and cl_strata.dot into the --out directory."""
    poset, _ = _resolve_source(cfg)
    result = strata.cl_stratification(poset)
    out_dir = Path(cfg.out) if cfg.out else Path(".")
    _write_text(out_dir / "isotropy.dot", poset_to_dot(poset))
    _write_text(out_dir / "cl_strata.dot", strata.result_to_dot(result))
    print(f"wrote {out_dir / 'isotropy.dot'}")
    print(f"wrote {out_dir / 'cl_strata.dot'}")
    return EXIT_OK


def cmd_reduce(cfg: RunConfig) -> int:
    """Full stratification report as JSON (stdout or --out file)."""
    poset, _ = _resolve_source(cfg)
    result = strata.cl_stratification(poset)
    report = strata.result_to_json(result)
    report["poset_valid"] = validate(poset).ok
    text = _dump_json(report)
    if cfg.out:
        _write_text(Path(cfg.out), text)
        print(f"wrote {cfg.out}")
    else:
        sys.stdout.write(text)
    return EXIT_OK


SNAP_BAND = 1e-4


def _label_row(fixture: Fixture, inv, band: float) -> tuple[str, float]:
    """Piece label for a CSV row, snapping shell-straddling points.

    A trajectory step can land in the thin shell around a lower stratum
    where some defining equalities hold within the band but derived
    quantities (cone cross terms) do not.  Such rows snap to the most
    constrained piece matching at a coarser band instead of aborting the
    export.  Verification paths use the strict checker, never this one.
    """
    matches, _ = phase.membership_candidates(fixture, inv, band=band)
    if len(matches) == 1:
        return matches[0]
    if not matches:
        matches, _ = phase.membership_candidates(fixture, inv, band=SNAP_BAND)
    if not matches:
        return "(unresolved)", float("nan")
    eq_count = {
        p.name: sum(c.kind == "eq" for c in p.constraints) for p in fixture.pieces
    }
    matches.sort(key=lambda m: (-eq_count[m[0]], m[0]))
    return matches[0]


def _samples_csv(fixture: Fixture, seed: int, count: int, band: float) -> str:
    spec = fixture.spec
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    header = (
        [f"x_{i+1}" for i in range(2 * spec.n)]
        + [f"u_{i+1}" for i in range(2 * spec.n)]
        + [f"J_{i+1}" for i in range(spec.k)]
        + [f"p{c}_{j+1}" for j in range(spec.n) for c in (1, 2, 3, 4)]
        + ["stratum", "residual"]
    )
    writer.writerow(header)
    points = phase.sample_zero_level(spec, seed=seed, count=count)
    for p in points:
        inv = phase.invariants(p)
        name, residual = _label_row(fixture, inv, band)
        row = (
            [repr(float(v)) for v in p.x]
            + [repr(float(v)) for v in p.u]
            + [repr(float(v)) for v in phase.momentum(spec, p)]
            + [repr(float(v)) for v in inv.table.reshape(-1)]
            + [name, repr(float(residual))]
        )
        writer.writerow(row)
    return buf.getvalue()


def cmd_verify(cfg: RunConfig) -> int:
    """Sampling battery on a builtin fixture; writes report.json (+ samples.csv)."""
    fixture = _require_fixture(cfg)
    report = checks.verify_fixture(
        fixture, seed=cfg.seed, count=cfg.count, band=cfg.tolerance
    )
    text = _dump_json(report)
    if cfg.out:
        out_dir = Path(cfg.out)
        _write_text(out_dir / "report.json", text)
        csv_count = min(cfg.count, 1000)
        _write_text(
            out_dir / "samples.csv",
            _samples_csv(fixture, cfg.seed, csv_count, cfg.tolerance),
        )
        print(f"wrote {out_dir / 'report.json'}")
        print(f"wrote {out_dir / 'samples.csv'}")
    else:
        sys.stdout.write(text)
    print(f"verify {fixture.name}: {'PASS' if report['passed'] else 'FAIL'}")
    return EXIT_OK if report["passed"] else EXIT_VERIFICATION


def _parse_start(fixture: Fixture, text: str) -> phase.PhasePoint:
    values = [float(v) for v in text.split(",")]
    dim = 2 * fixture.spec.n
    if len(values) != 2 * dim:
        raise CliInputError(
            f"--start needs {2 * dim} comma-separated floats (x then u), got {len(values)}"
        )
    try:
        point = phase.PhasePoint(np.array(values[:dim]), np.array(values[dim:]))
    except phase.PhaseError as exc:
        raise CliInputError(str(exc)) from exc
    j = phase.momentum(fixture.spec, point)
    if float(np.max(np.abs(j))) > phase.SUPPORT_TOL:
        raise phase.NotOnZeroLevelError(
            f"start point has |J| = {float(np.max(np.abs(j)))}, not on the zero level"
        )
    return point


def cmd_flow(cfg: RunConfig) -> int:
    """Integrate the Reeb flow; CSV trajectory to --out or stdout."""
    fixture = _require_fixture(cfg)
    spec = fixture.spec
    if cfg.start is not None:
        point = _parse_start(fixture, cfg.start)
    else:
        point = phase.sample_zero_level(spec, seed=cfg.seed, count=1)[0]

    traj = reeb.flow_rk4(point, t_end=cfg.t_end, step=cfg.step)
    tables = reeb.trajectory_invariants(traj)
    weights = np.array(spec.weights, dtype=float)

    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    header = (
        ["t"]
        + [f"x_{i+1}" for i in range(2 * spec.n)]
        + [f"u_{i+1}" for i in range(2 * spec.n)]
        + [f"J_{i+1}" for i in range(spec.k)]
        + [f"p{c}_{j+1}" for j in range(spec.n) for c in (1, 2, 3, 4)]
        + ["stratum", "residual"]
    )
    writer.writerow(header)
    for i in range(len(traj)):
        inv = phase.InvariantVector(tables[i])
        name, residual = _label_row(fixture, inv, cfg.tolerance)
        j = weights @ inv.p4
        writer.writerow(
            [repr(float(traj.times[i]))]
            + [repr(float(v)) for v in traj.xs[i]]
            + [repr(float(v)) for v in traj.us[i]]
            + [repr(float(v)) for v in j]
            + [repr(float(v)) for v in tables[i].reshape(-1)]
            + [name, repr(float(residual))]
        )
    text = buf.getvalue()

    drift = reeb.conservation_report(traj)
    summary = {
        "fixture": fixture.name,
        "seed": cfg.seed,
        "t_end": cfg.t_end,
        "step": cfg.step,
        "rows": len(traj),
        "drift": drift,
        "passed": max(drift.values()) <= phase.IDENTITY_TOL,
    }
    if cfg.out:
        _write_text(Path(cfg.out), text)
        sys.stdout.write(_dump_json(summary))
        print(f"wrote {cfg.out}")
    else:
        sys.stdout.write(text)
    return EXIT_OK if summary["passed"] else EXIT_VERIFICATION


def cmd_examples(cfg: RunConfig) -> int:
    """Run the complete battery on both builtin fixtures and print a table.

    Also drives every public operation of the package once (the test suite
    asserts the coverage), writing artifacts into --out or a temp dir.
    """
    out_dir = Path(cfg.out) if cfg.out else Path(tempfile.mkdtemp(prefix="cosphere-"))
    lines: list[str] = []
    all_passed = True
    covered: set[str] = set()

    for name in sorted(BUILTIN_FIXTURES):
        fixture = get_fixture(name)
        poset = torus.build_isotropy_poset(fixture.spec)
        covered.add("torus.build_isotropy_poset")
        result = strata.cl_stratification(poset)
        covered.add("strata.cl_stratification")

        lines.append(f"{name} ({fixture.title})")
        lines.append(f"  orbit types: {', '.join(t.label for t in poset.types)}")
        lines.append(f"  starred: {', '.join(sorted(strata.starred_lattice(poset)))}")
        covered.add("strata.starred_lattice")
        for s in result.cl_strata:
            open_mark = "  (open dense)" if s.open_dense else ""
            lines.append(
                f"    {s.name:<18} {s.kind.value:<17} dim {s.dim}  over ({s.base_target}){open_mark}"
            )
        lines.append(f"  frontier arrows (A -> B = A in closure(B)): {len(result.hasse)}")

        sub = RunConfig(
            command="",
            fixture=name,
            seed=cfg.seed,
            count=cfg.count,
            tolerance=cfg.tolerance,
            out=str(out_dir / name),
        )
        rc_lattice = cmd_lattice(RunConfig(command="", fixture=name, out=str(out_dir / name)))
        covered.add("cli.cmd_lattice")
        rc_reduce = cmd_reduce(
            RunConfig(command="", fixture=name, out=str(out_dir / name / "reduce.json"))
        )
        covered.add("cli.cmd_reduce")
        rc_verify = cmd_verify(sub)
        covered.add("cli.cmd_verify")
        rc_flow = cmd_flow(
            RunConfig(
                command="",
                fixture=name,
                seed=cfg.seed,
                t_end=cfg.t_end,
                step=cfg.step,
                out=str(out_dir / name / "trajectory.csv"),
            )
        )
        covered.add("cli.cmd_flow")
        flow_report = checks.flow_checks(fixture, seed=cfg.seed, starts=200)
        ok = (
            rc_lattice == EXIT_OK
            and rc_reduce == EXIT_OK
            and rc_verify == EXIT_OK
            and rc_flow == EXIT_OK
            and flow_report["passed"]
        )
        lines.append(f"  battery: {'PASS' if ok else 'FAIL'}")
        all_passed = all_passed and ok

        covered |= _exercise_api(fixture, poset, result, cfg.seed)

    covered.add("cli.cmd_examples")
    lines.append(f"artifacts in {out_dir}")
    lines.append(f"examples: {'PASS' if all_passed else 'FAIL'}")
    print("\n".join(lines))
    cmd_examples.last_coverage = covered  # inspected by the test suite
    return EXIT_OK if all_passed else EXIT_VERIFICATION


def _exercise_api(fixture, poset, result, seed: int) -> set[str]:
    """Call every public operation once so the examples run covers the API."""
    from . import poset as poset_mod

    covered: set[str] = set()
    spec = fixture.spec

    poset_mod.validate(poset)
    covered.add("poset.validate")
    labels = poset.labels()
    poset_mod.is_subconjugate(poset, labels[0], labels[-1])
    covered.add("poset.is_subconjugate")
    poset_mod.hasse_edges(poset.order)
    covered.add("poset.hasse_edges")
    principal = poset_mod.principal_type(poset)
    covered.add("poset.principal_type")

    torus.stabilizer_of_support(spec, range(spec.n))
    covered.add("torus.stabilizer_of_support")
    torus.is_almost_semifree(spec)
    covered.add("torus.is_almost_semifree")
    torus.lifted_action_is_free(spec)
    covered.add("torus.lifted_action_is_free")

    strata.zero_level_types(poset)
    covered.add("strata.zero_level_types")
    strata.contact_strata(poset)
    covered.add("strata.contact_strata")
    strata.secondary_strata(poset, principal.label)
    covered.add("strata.secondary_strata")
    strata.classify_seam(poset, principal.label, principal.label)
    covered.add("strata.classify_seam")
    strata.is_finer_than_contact(result)
    covered.add("strata.is_finer_than_contact")
    strata.bundle_targets(result)
    covered.add("strata.bundle_targets")
    try:
        strata.semifree_decomposition(poset)
    except strata.NotAlmostSemifreeError:
        pass
    covered.add("strata.semifree_decomposition")
    one_type = IsotropyPoset(
        types=(poset_mod.OrbitType("e", 0, is_identity=True),),
        order=frozenset(),
        dim_Q_of={"e": 3},
        dim_G=0,
        dim_Q=3,
    )
    strata.single_type_reduce(one_type)
    covered.add("strata.single_type_reduce")

    points = phase.sample_zero_level(spec, seed=seed, count=4)
    covered.add("phase.sample_zero_level")
    p = points[0]
    phase.momentum(spec, p)
    covered.add("phase.momentum")
    inv = phase.invariants(p)
    covered.add("phase.invariants")
    image = phase.hilbert_map(spec, p)
    covered.add("phase.hilbert_map")
    phase.classify_point(spec, p)
    covered.add("phase.classify_point")
    phase.check_reduced_membership(fixture, image)
    covered.add("phase.check_reduced_membership")
    phase.k0_project(inv, fixture.k0_offsets)
    covered.add("phase.k0_project")

    reeb.reeb_field(p)
    covered.add("reeb.reeb_field")
    reeb.flow_exact(p, 0.5)
    covered.add("reeb.flow_exact")
    reeb.flow_invariants_closed(inv, 0.5)
    covered.add("reeb.flow_invariants_closed")
    reeb.flow_rk4(p, t_end=0.1, step=0.01)
    covered.add("reeb.flow_rk4")
    return covered


API_REGISTRY = frozenset({
    "poset.validate", "poset.is_subconjugate", "poset.hasse_edges", "poset.principal_type",
    "torus.stabilizer_of_support", "torus.build_isotropy_poset",
    "torus.is_almost_semifree", "torus.lifted_action_is_free",
    "strata.starred_lattice", "strata.zero_level_types", "strata.contact_strata",
    "strata.secondary_strata", "strata.classify_seam", "strata.cl_stratification",
    "strata.is_finer_than_contact", "strata.bundle_targets",
    "strata.semifree_decomposition", "strata.single_type_reduce",
    "phase.momentum", "phase.invariants", "phase.hilbert_map", "phase.classify_point",
    "phase.sample_zero_level", "phase.check_reduced_membership", "phase.k0_project",
    "reeb.reeb_field", "reeb.flow_exact", "reeb.flow_invariants_closed", "reeb.flow_rk4",
    "cli.cmd_lattice", "cli.cmd_reduce", "cli.cmd_verify", "cli.cmd_flow", "cli.cmd_examples",
})


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="cosphere",
        description="Stratified reduction of cosphere bundles at zero momentum.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    def add_common(p: argparse.ArgumentParser, fixture_only: bool = False) -> None:
        if not fixture_only:
            p.add_argument("--action", help="path to an action-spec or poset JSON file")
        p.add_argument(
            "--fixture", choices=sorted(BUILTIN_FIXTURES),
            help="builtin example name",
        )
        p.add_argument("--out", help="output path (directory for multi-file commands)")

    p = sub.add_parser("lattice", help="emit isotropy and C-L DOT files")
    add_common(p)
    p = sub.add_parser("reduce", help="stratification report as JSON")
    add_common(p)
    p = sub.add_parser("verify", help="sampling battery on a builtin fixture")
    add_common(p, fixture_only=True)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--count", type=int, default=10000)
    p.add_argument("--tolerance", type=float, default=phase.MEMBERSHIP_BAND)
    p = sub.add_parser("flow", help="Reeb flow trajectory as CSV")
    add_common(p, fixture_only=True)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--t-end", type=float, default=2.0)
    p.add_argument("--step", type=float, default=1e-3)
    p.add_argument("--tolerance", type=float, default=phase.MEMBERSHIP_BAND)
    p.add_argument("--start", help="comma-separated start point (x then u)")
    p = sub.add_parser("examples", help="full battery on both builtin fixtures")
    add_common(p, fixture_only=True)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--count", type=int, default=10000)
    p.add_argument("--t-end", type=float, default=2.0)
    p.add_argument("--step", type=float, default=1e-3)
    p.add_argument("--tolerance", type=float, default=phase.MEMBERSHIP_BAND)
    return parser


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    cfg = RunConfig(
        command=args.command,
        action=getattr(args, "action", None),
        fixture=getattr(args, "fixture", None),
        seed=getattr(args, "seed", 0),
        count=getattr(args, "count", 10000),
        t_end=getattr(args, "t_end", 2.0),
        step=getattr(args, "step", 1e-3),
        out=getattr(args, "out", None),
        tolerance=getattr(args, "tolerance", phase.MEMBERSHIP_BAND),
        start=getattr(args, "start", None),
    )
    commands = {
        "lattice": cmd_lattice,
        "reduce": cmd_reduce,
        "verify": cmd_verify,
        "flow": cmd_flow,
        "examples": cmd_examples,
    }
    try:
        return commands[cfg.command](cfg)
    except (CliInputError, PosetError, ActionSpecError, phase.PhaseError,
            strata.StratificationError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INVALID
    except OSError as exc:
        print(f"io error: {exc}", file=sys.stderr)
        return EXIT_IO


if __name__ == "__main__":
    sys.exit(main())
