"""Linear torus actions on R^{2n} and their isotropy lattices.

A k-torus acts on R^{2n} = (R^2)^n by rotating the j-th plane with the
integer weight vector a_j (column j of the k x n weight matrix): the
character of the j-th plane is theta |-> a_j . theta.  The stabilizer of a
point with plane support S is the joint kernel

    Ann(Lambda_S) = {theta in T^k : a_j . theta in Z for all j in S},

so it is determined by the sublattice Lambda_S of Z^k spanned by the
support's weight columns.  Two supports give the same stabilizer exactly
when those column lattices coincide, and containment of stabilizers is
reverse containment of lattices.  Both questions are decided exactly with
Hermite normal forms over Z (sympy); nothing here is floating point.
"""

from __future__ import annotations

import itertools
import warnings
from dataclasses import dataclass
from functools import lru_cache
from typing import Iterable, Sequence

from sympy import Matrix
from sympy.matrices.normalforms import hermite_normal_form, invariant_factors

from .poset import IsotropyPoset, OrbitType
from .poset import principal_type as poset_principal_type

MAX_WEIGHT = 16
MAX_PLANES = 12


class ActionSpecError(ValueError):
    pass


class EqualDimensionAssumptionViolated(RuntimeError):
    """A stabilizer class covers orbit-type cells of different top dimension."""


class EqualDimensionWarning(UserWarning):
    pass


@dataclass(frozen=True)
class TorusActionSpec:
    """Weight data of a T^k action on R^{2n}; rows index torus circles."""

    k: int
    n: int
    weights: tuple[tuple[int, ...], ...]

    def __post_init__(self) -> None:
        object.__setattr__(
            self, "weights", tuple(tuple(int(a) for a in row) for row in self.weights)
        )
        if self.k < 1 or self.n < 1:
            raise ActionSpecError("need k >= 1 torus factors and n >= 1 planes")
        if self.n > MAX_PLANES:
            raise ActionSpecError(
                f"n = {self.n} planes: support enumeration is 2^n, capped at {MAX_PLANES}"
            )
        if len(self.weights) != self.k or any(len(r) != self.n for r in self.weights):
            raise ActionSpecError("weight matrix must be k rows by n columns")
        for row in self.weights:
            for a in row:
                if abs(a) > MAX_WEIGHT:
                    raise ActionSpecError(f"|weight| = {abs(a)} exceeds {MAX_WEIGHT}")
        for j in range(self.n):
            if all(row[j] == 0 for row in self.weights):
                raise ActionSpecError(f"plane {j} has a zero weight column (inactive plane)")

    def column(self, j: int) -> tuple[int, ...]:
        return tuple(self.weights[i][j] for i in range(self.k))


def spec_to_json(spec: TorusActionSpec) -> dict:
    return {"k": spec.k, "n": spec.n, "weights": [list(r) for r in spec.weights]}


def spec_from_json(data: dict) -> TorusActionSpec:
    try:
        return TorusActionSpec(
            k=int(data["k"]),
            n=int(data["n"]),
            weights=tuple(tuple(int(a) for a in row) for row in data["weights"]),
        )
    except (KeyError, TypeError) as exc:
        raise ActionSpecError(f"malformed action spec JSON: {exc}") from exc


# -- exact lattice algebra ---------------------------------------------------

def _lattice_hnf(columns: Sequence[tuple[int, ...]], k: int) -> tuple[tuple[int, ...], ...]:
    """Canonical basis (HNF columns) of the sublattice of Z^k the columns span."""
    cols = [c for c in columns if any(c)]
    if not cols:
        return ()
    m = Matrix([[c[i] for c in cols] for i in range(k)])
    h = hermite_normal_form(m)
    return tuple(tuple(int(h[i, j]) for i in range(k)) for j in range(h.cols))


def _lattice_contains(
    basis: tuple[tuple[int, ...], ...], vectors: Iterable[tuple[int, ...]], k: int
) -> bool:
    """Whether every vector lies in the lattice with the given canonical basis."""
    vecs = [v for v in vectors if any(v)]
    if not vecs:
        return True
    joined = _lattice_hnf(tuple(basis) + tuple(vecs), k)
    return joined == basis


def _nontrivial_divisors(columns: Sequence[tuple[int, ...]], k: int) -> tuple[int, ...]:
    cols = [c for c in columns if any(c)]
    if not cols:
        return ()
    m = Matrix([[c[i] for c in cols] for i in range(k)])
    return tuple(int(d) for d in invariant_factors(m) if int(d) not in (0, 1))


def _snf_chain(columns: Sequence[tuple[int, ...]], k: int) -> tuple[int, ...]:
    """Nonzero invariant factor chain d_1 | d_2 | ... of the column matrix."""
    cols = [c for c in columns if any(c)]
    if not cols:
        return ()
    m = Matrix([[c[i] for c in cols] for i in range(k)])
    return tuple(int(d) for d in invariant_factors(m) if int(d) != 0)


def class_label(k: int, basis: tuple[tuple[int, ...], ...]) -> str:
    """Deterministic subgroup name for the stabilizer Ann of a lattice.

    Lattices spanned by multiples of coordinate axes annihilate to products
    of circle-factor subgroups and get the classical names (e, S^1, Zm,
    T^k, and x-products).  Anything else falls back to a character-kernel
    label built from the canonical basis, which is still injective on
    subgroups.
    """
    if not basis:
        return "S^1" if k == 1 else f"T^{k}"
    axis: dict[int, int] = {}
    diagonal = True
    for col in basis:
        nz = [(i, v) for i, v in enumerate(col) if v != 0]
        if len(nz) != 1 or nz[0][0] in axis:
            diagonal = False
            break
        axis[nz[0][0]] = abs(nz[0][1])
    if diagonal:
        factors = []
        for i in range(k):
            c = axis.get(i, 0)
            factors.append("S^1" if c == 0 else ("e" if c == 1 else f"Z{c}"))
        if all(f == "e" for f in factors):
            return "e"
        return factors[0] if k == 1 else "×".join(factors)
    gens = ";".join(",".join(str(v) for v in col) for col in basis)
    return f"ker[{gens}]"


@dataclass(frozen=True)
class SupportStabilizer:
    """Stabilizer data of the points whose nonzero planes are ``support``."""

    support: tuple[int, ...]
    dim_stab: int
    finite_invariants: tuple[int, ...]
    lattice_basis: tuple[tuple[int, ...], ...]
    label: str


def stabilizer_of_support(spec: TorusActionSpec, support: Iterable[int]) -> SupportStabilizer:
    """Exact stabilizer of the support-S cell; planes are indexed from 0.

    ``dim_stab`` is k minus the rank of the support's weight columns;
    ``finite_invariants`` are the nontrivial elementary divisors of that
    submatrix (the component group of the stabilizer is their product of
    cyclic factors).  Empty support gives the full torus.
    """
    s = tuple(sorted(set(int(j) for j in support)))
    for j in s:
        if j < 0 or j >= spec.n:
            raise ActionSpecError(f"plane index {j} outside 0..{spec.n - 1}")
    return _stabilizer_cached(spec.weights, spec.k, s)


@lru_cache(maxsize=65536)
def _stabilizer_cached(
    weights: tuple[tuple[int, ...], ...], k: int, s: tuple[int, ...]
) -> SupportStabilizer:
    # per-sample classification hits the same few supports over and over
    cols = [tuple(row[j] for row in weights) for j in s]
    basis = _lattice_hnf(cols, k)
    return SupportStabilizer(
        support=s,
        dim_stab=k - len(basis),
        finite_invariants=_nontrivial_divisors(cols, k),
        lattice_basis=basis,
        label=class_label(k, basis),
    )


def _support_classes(
    spec: TorusActionSpec,
) -> dict[tuple[tuple[int, ...], ...], list[tuple[int, ...]]]:
    classes: dict[tuple[tuple[int, ...], ...], list[tuple[int, ...]]] = {}
    for r in range(spec.n + 1):
        for s in itertools.combinations(range(spec.n), r):
            basis = _lattice_hnf([spec.column(j) for j in s], spec.k)
            classes.setdefault(basis, []).append(s)
    return classes


def build_isotropy_poset(
    spec: TorusActionSpec, on_mixed_dims: str = "warn"
) -> IsotropyPoset:
    """Isotropy lattice of the lifted action, from exhaustive support classes.

    Each stabilizer class contributes one orbit type; dim_Q_of is twice the
    size of the class's largest support (the orbit-type manifold is the
    union of its support cells, and the union of two same-class supports is
    again in the class, so there is a unique top cell).  ``on_mixed_dims``
    ("warn" or "raise") governs the response if inclusion-maximal supports
    of one class ever disagree in size; for these linear actions that is
    impossible, but the guard is kept for defense.
    """
    if on_mixed_dims not in ("warn", "raise"):
        raise ActionSpecError(f"on_mixed_dims must be 'warn' or 'raise', got {on_mixed_dims!r}")
    classes = _support_classes(spec)

    types: list[OrbitType] = []
    dim_q_of: dict[str, int] = {}
    info: dict[str, tuple[tuple[int, ...], ...]] = {}
    for basis, supports in classes.items():
        label = class_label(spec.k, basis)
        maximal = [
            s for s in supports
            if not any(s != t and set(s) <= set(t) for t in supports)
        ]
        sizes = {len(s) for s in maximal}
        if len(sizes) > 1:
            msg = (
                f"stabilizer class {label!r} has inclusion-maximal supports of sizes "
                f"{sorted(sizes)}: orbit-type cells are not equidimensional"
            )
            if on_mixed_dims == "raise":
                raise EqualDimensionAssumptionViolated(msg)
            warnings.warn(msg, EqualDimensionWarning)
        divisors = _nontrivial_divisors([spec.column(j) for j in supports[-1]], spec.k)
        dim_stab = spec.k - len(basis)
        types.append(
            OrbitType(
                label=label,
                dim_H=dim_stab,
                is_identity=(dim_stab == 0 and not divisors),
                finite_tag=",".join(str(d) for d in divisors) or None,
            )
        )
        dim_q_of[label] = 2 * max(sizes)
        info[label] = basis

    # (L) < (H) iff the subgroup L is strictly contained in H, i.e. the
    # lattice of H is strictly contained in the lattice of L
    order: set[tuple[str, str]] = set()
    labels = sorted(info)
    for la, lb in itertools.permutations(labels, 2):
        ba, bb = info[la], info[lb]
        if ba != bb and _lattice_contains(ba, bb, spec.k):
            order.add((la, lb))

    types.sort(key=lambda t: (t.dim_H, t.label))
    return IsotropyPoset(
        types=tuple(types),
        order=frozenset(order),
        dim_Q_of=dim_q_of,
        dim_G=spec.k,
        dim_Q=2 * spec.n,
    )


def is_almost_semifree(spec: TorusActionSpec) -> tuple[bool, tuple[str, ...]]:
    """Test the three almost-semifree conditions; diagnostics name failures.

    (a) the principal stabilizer is trivial; (b) every orbit type of
    non-maximal orbit dimension is a union of isolated orbits,
    dim Q_(H) = dim G - dim H; (c) each nontrivial stabilizer acts freely
    on the nonzero directions of g/h.  The adjoint action of a torus is
    trivial, so (c) holds exactly when every nontrivial stabilizer has the
    full Lie algebra, dim_stab = k.
    """
    poset = build_isotropy_poset(spec)
    diagnostics: list[str] = []

    # the class of the full weight lattice stabilizes generic points, so the
    # built poset always has a unique minimum
    principal = poset_principal_type(poset)
    if not principal.is_identity:
        diagnostics.append(
            f"(a) principal stabilizer is ({principal.label}), not the trivial group"
        )

    max_orbit_dim = max(spec.k - t.dim_H for t in poset.types)
    for t in poset.types:
        orbit_dim = spec.k - t.dim_H
        if orbit_dim < max_orbit_dim and poset.dim_Q_of[t.label] != orbit_dim:
            diagnostics.append(
                f"(b) orbit type ({t.label}) has dim Q_(H) = {poset.dim_Q_of[t.label]} "
                f"> {orbit_dim} = dim G - dim H, so it is not a union of isolated orbits"
            )
    for t in poset.types:
        if not t.is_identity and t.dim_H < spec.k:
            diagnostics.append(
                f"(c) stabilizer ({t.label}) has dim {t.dim_H} < k = {spec.k}; it acts "
                "trivially, hence not freely, on the nonzero directions of g/h"
            )
    return (not diagnostics, tuple(diagnostics))


def lifted_action_is_free(spec: TorusActionSpec) -> bool:
    """Freeness of the lifted action away from the zero section.

    For abelian groups this is equivalent to the action being almost
    semifree, so this is a thin wrapper over :func:`is_almost_semifree`.
    """
    return is_almost_semifree(spec)[0]
