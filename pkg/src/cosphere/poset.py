"""Finite isotropy lattices: orbit-type posets under strict subconjugation.

An isotropy lattice records the conjugacy classes of stabilizer subgroups
occurring in a proper group action, partially ordered by subconjugation:
``(L) < (H)`` when L is conjugate to a proper subgroup of H.  The order is
supplied by the caller (or by the torus-action builder in
:mod:`cosphere.torus`); it is never inferred from group data here.

The supplied order pairs are treated as generators and stored transitively
closed, so ``is_subconjugate`` is a set lookup.  Cyclic input survives
construction but is reported by :func:`validate` (the closure of a cycle
contains reflexive pairs).
"""

from __future__ import annotations

from collections import defaultdict
from dataclasses import dataclass
from typing import Iterable, Mapping

MAX_TYPES = 64


class PosetError(ValueError):
    pass


class UnknownLabelError(PosetError):
    pass


class CyclicRelationError(PosetError):
    pass


class NoUniqueMinimumError(PosetError):
    """No unique minimal orbit type: quotient disconnected or input invalid."""


def transitive_closure(pairs: Iterable[tuple[str, str]]) -> frozenset[tuple[str, str]]:
    """Transitive closure of a finite relation given as ordered pairs."""
    succ: dict[str, set[str]] = defaultdict(set)
    for a, b in pairs:
        succ[a].add(b)
    closed: set[tuple[str, str]] = set()
    for a in list(succ):
        seen: set[str] = set()
        stack = list(succ[a])
        while stack:
            b = stack.pop()
            if b in seen:
                continue
            seen.add(b)
            closed.add((a, b))
            stack.extend(succ.get(b, ()))
    return frozenset(closed)


def hasse_edges(pairs: Iterable[tuple[str, str]]) -> frozenset[tuple[str, str]]:
    """Transitive reduction (covering relations) of a finite strict order.

    Accepts any generating set of pairs; raises :class:`CyclicRelationError`
    if the generated relation is not a strict order.  Re-taking the
    transitive closure of the result recovers the closure of the input.
    """
    closed = transitive_closure(pairs)
    for a, b in closed:
        if a == b:
            raise CyclicRelationError(f"relation has a cycle through {a!r}")
    succ: dict[str, set[str]] = defaultdict(set)
    for a, b in closed:
        succ[a].add(b)
    return frozenset(
        (a, b)
        for a, b in closed
        if not any(b in succ[c] for c in succ[a])
    )


@dataclass(frozen=True)
class OrbitType:
    """One conjugacy class (H) of stabilizer subgroups.

    ``finite_tag`` distinguishes finite data of classes with equal identity
    component (for tori: the nontrivial elementary divisors); it is what
    permits a strict subconjugation between equal-dimensional classes.
    """

    label: str
    dim_H: int
    is_identity: bool = False
    finite_tag: str | None = None


@dataclass(frozen=True, eq=True)
class IsotropyPoset:
    """Orbit types of an action together with the strict subconjugation order.

    ``order`` holds pairs ``(a, b)`` meaning ``(a) < (b)``; it is stored as
    the transitive closure of whatever generators were passed in.
    ``dim_Q_of`` maps each label to the dimension of its orbit-type manifold
    Q_(H) (all components are assumed equidimensional; ``validate`` records
    the assumption).
    """

    types: tuple[OrbitType, ...]
    order: frozenset[tuple[str, str]]
    dim_Q_of: Mapping[str, int]
    dim_G: int
    dim_Q: int

    def __post_init__(self) -> None:
        object.__setattr__(self, "types", tuple(self.types))
        object.__setattr__(
            self, "order", transitive_closure(tuple((a, b) for a, b in self.order))
        )
        object.__setattr__(self, "dim_Q_of", dict(self.dim_Q_of))

    def labels(self) -> tuple[str, ...]:
        return tuple(t.label for t in self.types)

    def get_type(self, label: str) -> OrbitType:
        for t in self.types:
            if t.label == label:
                return t
        raise UnknownLabelError(f"no orbit type labelled {label!r}")


@dataclass(frozen=True)
class ValidationReport:
    violations: tuple[str, ...] = ()
    notes: tuple[str, ...] = ()

    @property
    def ok(self) -> bool:
        return not self.violations


def validate(poset: IsotropyPoset) -> ValidationReport:
    """Check the isotropy-lattice invariants; pure and idempotent.

    Returns a report listing every violated invariant (empty list means the
    poset is valid).  Notes record standing assumptions that cannot be
    checked from combinatorial data alone.
    """
    bad: list[str] = []
    labels = [t.label for t in poset.types]
    if not labels:
        bad.append("type list is empty")
    if len(labels) > MAX_TYPES:
        bad.append(f"{len(labels)} orbit types exceeds the cap of {MAX_TYPES}")
    if len(set(labels)) != len(labels):
        bad.append("orbit type labels are not unique")
    if poset.dim_G < 0 or poset.dim_Q < 0:
        bad.append("dim_G and dim_Q must be nonnegative")

    known = set(labels)
    by_label = {t.label: t for t in poset.types}
    for a, b in sorted(poset.order):
        if a not in known or b not in known:
            bad.append(f"order pair ({a!r}, {b!r}) references an unknown label")
    if sum(t.is_identity for t in poset.types) > 1:
        bad.append("more than one orbit type is flagged as the identity class")

    for t in poset.types:
        if t.dim_H < 0 or t.dim_H > poset.dim_G:
            bad.append(f"type {t.label!r}: dim_H = {t.dim_H} outside [0, dim_G]")
        if t.is_identity and (t.dim_H != 0 or t.finite_tag is not None):
            bad.append(f"type {t.label!r}: identity class must have dim 0 and no finite tag")
        if t.label not in poset.dim_Q_of:
            bad.append(f"type {t.label!r}: missing dim_Q_of entry")
            continue
        d = poset.dim_Q_of[t.label]
        if d < 0 or d > poset.dim_Q:
            bad.append(f"type {t.label!r}: dim_Q_of = {d} outside [0, dim_Q]")
        # each orbit of type (H) has dimension dim_G - dim_H and sits inside Q_(H)
        if d < poset.dim_G - t.dim_H:
            bad.append(
                f"type {t.label!r}: dim_Q_of = {d} below the orbit dimension "
                f"{poset.dim_G - t.dim_H}"
            )
    for extra in sorted(set(poset.dim_Q_of) - known):
        bad.append(f"dim_Q_of entry {extra!r} matches no orbit type")

    # strict order: closure is built in, so failures here mean cycles
    for a, b in sorted(poset.order):
        if a == b:
            bad.append(f"order is not irreflexive: ({a!r}, {a!r})")
        elif (b, a) in poset.order:
            if a < b:
                bad.append(f"order is not antisymmetric: {a!r} and {b!r}")
        elif a in known and b in known:
            ta, tb = by_label[a], by_label[b]
            if ta.dim_H > tb.dim_H:
                bad.append(
                    f"({a!r}) < ({b!r}) but dim {ta.dim_H} > {tb.dim_H}: "
                    "a subgroup cannot exceed the ambient dimension"
                )
            elif ta.dim_H == tb.dim_H and ta.finite_tag == tb.finite_tag:
                bad.append(
                    f"({a!r}) < ({b!r}) with equal dimension and equal finite tag: "
                    "strict subconjugation needs distinct finite data"
                )

    notes = (
        "components of each orbit-type manifold are assumed equidimensional; "
        "dim_Q_of records that common dimension",
    )
    return ValidationReport(tuple(bad), notes)


def is_subconjugate(poset: IsotropyPoset, a: str, b: str) -> bool:
    """True iff ``(a) < (b)`` in the stored strict order."""
    known = set(poset.labels())
    for lab in (a, b):
        if lab not in known:
            raise UnknownLabelError(f"no orbit type labelled {lab!r}")
    return (a, b) in poset.order


def principal_type(poset: IsotropyPoset) -> OrbitType:
    """The unique minimal orbit type (principal orbits).

    Raises :class:`NoUniqueMinimumError` when minimality is not unique,
    which signals a disconnected quotient or invalid input.
    """
    have_something_below = {b for _, b in poset.order}
    minimal = [t for t in poset.types if t.label not in have_something_below]
    if len(minimal) != 1:
        raise NoUniqueMinimumError(
            f"expected exactly one minimal orbit type, found "
            f"{sorted(t.label for t in minimal)}"
        )
    return minimal[0]


def poset_to_json(poset: IsotropyPoset) -> dict:
    """JSON-ready dict with the fixed field names used by the CLI."""
    types = []
    for t in poset.types:
        entry: dict = {
            "label": t.label,
            "dim_H": t.dim_H,
            "dim_Q_of": poset.dim_Q_of.get(t.label),
        }
        if t.finite_tag is not None:
            entry["finite_tag"] = t.finite_tag
        types.append(entry)
    return {
        "dim_Q": poset.dim_Q,
        "dim_G": poset.dim_G,
        "types": types,
        "order": sorted([a, b] for a, b in poset.order),
    }


def poset_from_json(data: dict) -> IsotropyPoset:
    """Inverse of :func:`poset_to_json`.

    ``is_identity`` is not serialized: an untagged zero-dimensional type is
    taken to be the trivial class, so finite nontrivial stabilizers must
    carry a ``finite_tag``.
    """
    try:
        types = tuple(
            OrbitType(
                label=str(t["label"]),
                dim_H=int(t["dim_H"]),
                is_identity=(int(t["dim_H"]) == 0 and t.get("finite_tag") is None),
                finite_tag=(None if t.get("finite_tag") is None else str(t["finite_tag"])),
            )
            for t in data["types"]
        )
        dim_q_of = {str(t["label"]): int(t["dim_Q_of"]) for t in data["types"]}
        order = frozenset((str(a), str(b)) for a, b in data["order"])
        return IsotropyPoset(
            types=types,
            order=order,
            dim_Q_of=dim_q_of,
            dim_G=int(data["dim_G"]),
            dim_Q=int(data["dim_Q"]),
        )
    except (KeyError, TypeError, ValueError) as exc:
        raise PosetError(f"malformed isotropy poset JSON: {exc}") from exc


def poset_to_dot(poset: IsotropyPoset) -> str:
    """DOT rendering of the isotropy lattice (edges are covering relations).

    Edge a -> b means (a) < (b); node order is sorted for determinism.
    """
    lines = ["digraph isotropy {", '  rankdir="BT";']
    for t in sorted(poset.types, key=lambda t: t.label):
        d = poset.dim_Q_of.get(t.label, "?")
        lines.append(
            f'  "{t.label}" [label="({t.label})\\ndim H = {t.dim_H}, '
            f'dim Q_(H) = {d}"];'
        )
    for a, b in sorted(hasse_edges(poset.order)):
        lines.append(f'  "{a}" -> "{b}";')
    lines.append("}")
    return "\n".join(lines) + "\n"
