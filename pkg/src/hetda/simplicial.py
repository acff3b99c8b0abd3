"""Filtered simplicial complexes, boundary matrices and persistence diagrams.

A filtration is an ordered list of simplices (faces always before
cofaces) with non-decreasing scale values; position 0 holds the empty
simplex so that vertices get the boundary column [1, 0, ..., 0] and the
pairing logic stays uniform.  The pairing that involves the empty-simplex
row is suppressed from the diagrams; the killing vertex is reported as an
essential class instead (birth with no finite death).
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field

import numpy as np


__all__ = [
    "Simplex",
    "Filtration",
    "BoundaryMatrix",
    "PersistenceDiagram",
    "ValidationReport",
    "InvalidFiltrationError",
    "NotReducedError",
    "validate_filtration",
    "build_boundary_matrix",
    "extract_diagrams",
    "diagrams_to_dict",
    "load_filtration",
    "save_filtration",
    "load_matrix",
    "save_matrix",
]


class InvalidFiltrationError(ValueError):
    pass


class NotReducedError(ValueError):
    pass


@dataclass(frozen=True)
class Simplex:
    """A finite set of vertex ids; the empty tuple is the empty simplex."""

    vertices: tuple[int, ...]

    def __post_init__(self):
        verts = tuple(int(v) for v in self.vertices)
        if any(v < 0 for v in verts):
            raise ValueError("vertex ids must be non-negative")
        if list(verts) != sorted(set(verts)):
            raise ValueError("vertices must be strictly sorted and duplicate-free")
        object.__setattr__(self, "vertices", verts)

    @property
    def dimension(self) -> int:
        return len(self.vertices) - 1

    def boundary_faces(self) -> list["Simplex"]:
        """Codimension-1 faces; a vertex's sole boundary face is the empty simplex."""
        if not self.vertices:
            return []
        return [
            Simplex(self.vertices[:i] + self.vertices[i + 1 :])
            for i in range(len(self.vertices))
        ]

    def __repr__(self) -> str:  # pragma: no cover
        return f"Simplex{self.vertices!r}"


@dataclass
class Filtration:
    simplices: list[Simplex]
    scales: list[float]

    def __post_init__(self):
        self.simplices = [
            s if isinstance(s, Simplex) else Simplex(tuple(s)) for s in self.simplices
        ]
        self.scales = [float(x) for x in self.scales]
        if len(self.simplices) != len(self.scales):
            raise ValueError("simplices and scales must have equal length")

    def __len__(self) -> int:
        return len(self.simplices)

    def dims(self) -> list[int]:
        return [s.dimension for s in self.simplices]

    def to_dict(self) -> dict:
        return {
            "simplices": [list(s.vertices) for s in self.simplices],
            "scales": list(self.scales),
        }

    @classmethod
    def from_dict(cls, data: dict) -> "Filtration":
        return cls(
            simplices=[Simplex(tuple(v)) for v in data["simplices"]],
            scales=list(data["scales"]),
        )


@dataclass
class ValidationReport:
    ok: bool
    index: int | None = None
    reason: str | None = None

    def __bool__(self) -> bool:
        return self.ok


def validate_filtration(f: Filtration) -> ValidationReport:
    """Check the filtration invariants; report the first violation, never raise."""
    if len(f) == 0:
        return ValidationReport(False, 0, "filtration is empty")
    if f.simplices[0].vertices != ():
        return ValidationReport(False, 0, "position 0 must hold the empty simplex")
    seen: dict[tuple[int, ...], int] = {}
    for j, simplex in enumerate(f.simplices):
        if simplex.vertices in seen:
            return ValidationReport(False, j, f"duplicate simplex {simplex.vertices}")
        for face in simplex.boundary_faces():
            if face.vertices not in seen:
                return ValidationReport(
                    False, j, f"face {face.vertices} missing before {simplex.vertices}"
                )
        if j > 0 and f.scales[j] < f.scales[j - 1]:
            return ValidationReport(False, j, "scales must be non-decreasing")
        seen[simplex.vertices] = j
    return ValidationReport(True)


@dataclass
class BoundaryMatrix:
    """Square 0/1 matrix with optional per-column dimensions and scales."""

    entries: np.ndarray
    dims: list[int] | None = None
    scales: list[float] | None = None

    def __post_init__(self):
        self.entries = np.asarray(self.entries, dtype=np.uint8)
        if self.entries.ndim != 2 or self.entries.shape[0] != self.entries.shape[1]:
            raise ValueError("entries must form a square matrix")

    @property
    def n(self) -> int:
        return self.entries.shape[0]


def build_boundary_matrix(f: Filtration) -> BoundaryMatrix:
    """Entries[i][j] = 1 iff simplex i is a codimension-1 face of simplex j."""
    report = validate_filtration(f)
    if not report:
        raise InvalidFiltrationError(f"index {report.index}: {report.reason}")
    n = len(f)
    index = {s.vertices: i for i, s in enumerate(f.simplices)}
    entries = np.zeros((n, n), dtype=np.uint8)
    for j, simplex in enumerate(f.simplices):
        for face in simplex.boundary_faces():
            entries[index[face.vertices], j] = 1
    return BoundaryMatrix(entries=entries, dims=f.dims(), scales=list(f.scales))


@dataclass
class PersistenceDiagram:
    """Finite (birth, death) pairs of one homology dimension, plus the births
    of classes that never die."""

    dimension: int
    points: list[tuple[float, float]] = field(default_factory=list)
    essential: list[float] = field(default_factory=list)


def extract_diagrams(reduced, dims, scales) -> list[PersistenceDiagram]:
    """Read persistence pairs off a reduced matrix.

    A nonzero column j with lowest 1 in row i yields the point
    (scales[i], scales[j]) in dimension dims[i].  Pairings into the
    empty-simplex row and zero columns whose row never becomes a low are
    reported as essential classes.  Pairs with equal birth and death
    scales are dropped.
    """
    r = np.asarray(reduced)
    n = r.shape[0]
    if dims is None or scales is None:
        raise ValueError("extract_diagrams needs per-column dims and scales")
    lows: dict[int, int] = {}
    for j in range(n):
        nz = np.flatnonzero(r[:, j])
        if nz.size == 0:
            continue
        i = int(nz[-1])
        if i in lows:
            raise NotReducedError(f"columns {lows[i]} and {j} share lowest 1 at row {i}")
        lows[i] = j

    by_dim: dict[int, PersistenceDiagram] = {}

    def diagram(dim: int) -> PersistenceDiagram:
        if dim not in by_dim:
            by_dim[dim] = PersistenceDiagram(dimension=dim)
        return by_dim[dim]

    for i, j in sorted(lows.items()):
        if dims[i] < 0:
            # the empty-simplex pairing: report the killer as an undying class
            diagram(dims[j]).essential.append(scales[j])
            continue
        birth, death = scales[i], scales[j]
        if birth < death:
            diagram(dims[i]).points.append((birth, death))
    for j in range(n):
        if not r[:, j].any() and j not in lows:
            diagram(dims[j]).essential.append(scales[j])
    out = [by_dim[dim] for dim in sorted(by_dim)]
    for dgm in out:
        dgm.points.sort()
        dgm.essential.sort()
    return out


def diagrams_to_dict(diagrams: list[PersistenceDiagram]) -> dict:
    """JSON form: finite pairs under "dims", undying births under "essential"."""
    dims = {}
    essential = {}
    for dgm in diagrams:
        key = str(dgm.dimension)
        if dgm.points:
            dims[key] = [[b, d] for b, d in dgm.points]
        if dgm.essential:
            essential[key] = list(dgm.essential)
    return {"dims": dims, "essential": essential}


# ---------------------------------------------------------------------------
# file I/O


def load_filtration(path) -> Filtration:
    with open(path) as fh:
        return Filtration.from_dict(json.load(fh))


def save_filtration(f: Filtration, path) -> None:
    with open(path, "w") as fh:
        json.dump(f.to_dict(), fh, indent=2, sort_keys=True)
        fh.write("\n")


def load_matrix(path) -> BoundaryMatrix:
    """Read a matrix file: JSON with a "matrix" key, or n lines of 0/1."""
    with open(path) as fh:
        text = fh.read()
    stripped = text.lstrip()
    if stripped.startswith("{"):
        data = json.loads(text)
        return BoundaryMatrix(
            entries=np.asarray(data["matrix"], dtype=np.uint8),
            dims=data.get("dims"),
            scales=data.get("scales"),
        )
    rows = [
        [int(tok) for tok in line.split()] for line in text.splitlines() if line.strip()
    ]
    return BoundaryMatrix(entries=np.asarray(rows, dtype=np.uint8))


def save_matrix(matrix, path, *, fmt: str = "text", dims=None, scales=None) -> None:
    """Write a matrix as plain text (default) or as the JSON form."""
    entries = np.asarray(getattr(matrix, "entries", matrix))
    if fmt == "text":
        lines = [" ".join(str(int(x)) for x in row) for row in entries]
        payload = "\n".join(lines) + "\n"
        with open(path, "w") as fh:
            fh.write(payload)
        return
    if fmt == "json":
        data: dict = {"n": int(entries.shape[0]), "matrix": entries.astype(int).tolist()}
        if isinstance(matrix, BoundaryMatrix):
            dims = matrix.dims if dims is None else dims
            scales = matrix.scales if scales is None else scales
        if dims is not None:
            data["dims"] = list(dims)
        if scales is not None:
            data["scales"] = list(scales)
        with open(path, "w") as fh:
            json.dump(data, fh, indent=2, sort_keys=True)
            fh.write("\n")
        return
    raise ValueError(f"unknown matrix format: {fmt!r}")
