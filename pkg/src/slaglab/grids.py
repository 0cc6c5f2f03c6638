"""Rectangular grids, sampled fields and the grid file format.

Grid files are plain text::

    # n=2 res=65,65 bounds=0:1,0:1 mask=none
    <one row per node, row-major (last axis fastest), one column per component>

``mask`` is ``none`` or ``annulus:r2min,r2max`` (the set r2min <= |x|^2 <=
r2max; a disk has r2min = 0).  A JSON equivalent with keys ``n``, ``res``,
``bounds``, ``mask`` and ``values`` is read and written for ``.json`` paths.
"""

from __future__ import annotations

import io
import json
import re
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from .errors import DomainError

__all__ = [
    "GridDomain",
    "AnnulusMask",
    "ScalarFieldGrid",
    "VectorFieldGrid",
    "write_grid",
    "read_grid",
]

MIN_RESOLUTION = 5


@dataclass(frozen=True)
class GridDomain:
    """Uniform tensor grid over a box in R^n (n = 2 or 3)."""

    bounds: tuple
    resolution: tuple

    def __post_init__(self):
        bounds = tuple((float(lo), float(hi)) for lo, hi in self.bounds)
        res = tuple(int(r) for r in self.resolution)
        if len(bounds) != len(res):
            raise DomainError("bounds and resolution disagree on dimension")
        if len(res) not in (2, 3):
            raise DomainError(f"grids support n = 2 or 3, got n={len(res)}")
        if min(res) < MIN_RESOLUTION:
            raise DomainError(f"resolution must be >= {MIN_RESOLUTION} per axis, got {res}")
        if any(not hi > lo for lo, hi in bounds):
            raise DomainError(f"empty interval in bounds {bounds}")
        object.__setattr__(self, "bounds", bounds)
        object.__setattr__(self, "resolution", res)

    @classmethod
    def box(cls, bounds, resolution) -> "GridDomain":
        """``resolution`` may be an int, applied to every axis."""
        if np.isscalar(resolution):
            resolution = (int(resolution),) * len(bounds)
        return cls(tuple(bounds), tuple(resolution))

    @property
    def n(self) -> int:
        return len(self.resolution)

    @property
    def spacing(self) -> tuple:
        return tuple((hi - lo) / (r - 1) for (lo, hi), r in zip(self.bounds, self.resolution))

    @property
    def measure(self) -> float:
        return float(np.prod([hi - lo for lo, hi in self.bounds]))

    @property
    def perimeter(self) -> float:
        """Boundary measure of the box (perimeter for n = 2, surface area for n = 3)."""
        lengths = [hi - lo for lo, hi in self.bounds]
        total = 0.0
        for i in range(self.n):
            total += 2 * np.prod([l for j, l in enumerate(lengths) if j != i])
        return float(total)

    @property
    def center(self) -> np.ndarray:
        return np.array([(lo + hi) / 2 for lo, hi in self.bounds])

    def axes(self) -> list:
        return [np.linspace(lo, hi, r) for (lo, hi), r in zip(self.bounds, self.resolution)]

    def mesh(self) -> tuple:
        return tuple(np.meshgrid(*self.axes(), indexing="ij"))

    def points(self) -> np.ndarray:
        """Node coordinates, shape ``(*resolution, n)``."""
        return np.stack(self.mesh(), axis=-1)

    def interior(self, margin: int = 1) -> "GridDomain":
        """Sub-grid with ``margin`` nodes stripped from every side."""
        axes = self.axes()
        bounds = [(ax[margin], ax[-1 - margin]) for ax in axes]
        return GridDomain(tuple(bounds), tuple(r - 2 * margin for r in self.resolution))

    def boundary_mask(self) -> np.ndarray:
        mask = np.zeros(self.resolution, dtype=bool)
        for axis in range(self.n):
            idx = [slice(None)] * self.n
            idx[axis] = 0
            mask[tuple(idx)] = True
            idx[axis] = -1
            mask[tuple(idx)] = True
        return mask

    def refine(self) -> "GridDomain":
        """Dyadic refinement: halve the spacing on every axis."""
        return GridDomain(self.bounds, tuple(2 * r - 1 for r in self.resolution))

    def header(self, mask: "AnnulusMask | None" = None) -> str:
        res = ",".join(str(r) for r in self.resolution)
        bnd = ",".join(f"{lo!r}:{hi!r}" for lo, hi in self.bounds)
        mtxt = "none" if mask is None else f"annulus:{mask.r2min!r},{mask.r2max!r}"
        return f"n={self.n} res={res} bounds={bnd} mask={mtxt}"


@dataclass(frozen=True)
class AnnulusMask:
    """Region ``r2min <= |x|^2 <= r2max``; ``r2min = 0`` gives a closed disk."""

    r2min: float
    r2max: float

    def __post_init__(self):
        if not (0.0 <= self.r2min < self.r2max):
            raise DomainError(f"invalid annulus {self.r2min}, {self.r2max}")

    def contains(self, points: np.ndarray) -> np.ndarray:
        r2 = np.sum(np.asarray(points) ** 2, axis=-1)
        return (r2 >= self.r2min) & (r2 <= self.r2max)

    def cell_coverage(self, domain: GridDomain, subsamples: int = 4) -> np.ndarray:
        """Fraction of each grid cell inside the region, by midpoint subsampling.

        Returns an array of shape ``resolution - 1`` along each axis.
        """
        frac = (np.arange(subsamples) + 0.5) / subsamples
        cell_axes = []
        for ax in domain.axes():
            h = ax[1] - ax[0]
            cell_axes.append((ax[:-1, None] + h * frac[None, :]).ravel())
        pts = np.stack(np.meshgrid(*cell_axes, indexing="ij"), axis=-1)
        inside = self.contains(pts).astype(float)
        shape = []
        for r in domain.resolution:
            shape.extend([r - 1, subsamples])
        inside = inside.reshape(shape)
        return inside.mean(axis=tuple(range(1, 2 * domain.n, 2)))

    @property
    def area(self) -> float:
        """Exact area of the planar region."""
        return float(np.pi * (self.r2max - self.r2min))


@dataclass(frozen=True, eq=False)
class ScalarFieldGrid:
    """A potential sampled at the nodes of ``domain``."""

    domain: GridDomain
    values: np.ndarray
    mask: AnnulusMask | None = None

    def __post_init__(self):
        values = np.asarray(self.values, dtype=float)
        if values.shape != self.domain.resolution:
            raise DomainError(f"values shape {values.shape} != grid {self.domain.resolution}")
        if not np.all(np.isfinite(values)):
            raise DomainError("scalar field has non-finite values")
        object.__setattr__(self, "values", values)

    @classmethod
    def from_function(cls, domain: GridDomain, func, mask=None) -> "ScalarFieldGrid":
        """Sample ``func(*coords)`` (coordinate arrays in ``ij`` layout)."""
        return cls(domain, np.broadcast_to(func(*domain.mesh()), domain.resolution), mask)

    @property
    def n_components(self) -> int:
        return 1


@dataclass(frozen=True, eq=False)
class VectorFieldGrid:
    """A map ``F: Omega -> R^n`` sampled at the nodes; ``values[..., j] = F_j``."""

    domain: GridDomain
    values: np.ndarray
    mask: AnnulusMask | None = None

    def __post_init__(self):
        values = np.asarray(self.values, dtype=float)
        expected = self.domain.resolution + (self.domain.n,)
        if values.shape != expected:
            raise DomainError(f"values shape {values.shape} != {expected}")
        if not np.all(np.isfinite(values)):
            raise DomainError("vector field has non-finite values")
        object.__setattr__(self, "values", values)

    @classmethod
    def from_function(cls, domain: GridDomain, func, mask=None) -> "VectorFieldGrid":
        """``func(*coords)`` returns a sequence of ``n`` component arrays."""
        comps = [np.broadcast_to(c, domain.resolution) for c in func(*domain.mesh())]
        return cls(domain, np.stack(comps, axis=-1), mask)

    @property
    def n_components(self) -> int:
        return self.domain.n


# --------------------------------------------------------------------------
# serialisation
# --------------------------------------------------------------------------

_HEADER = re.compile(
    r"#\s*n=(?P<n>\d+)\s+res=(?P<res>[\d,]+)\s+bounds=(?P<bounds>\S+)\s+mask=(?P<mask>\S+)"
)


def _parse_mask(text):
    if text in (None, "none"):
        return None
    kind, _, args = text.partition(":")
    if kind != "annulus":
        raise DomainError(f"unknown mask {text!r}")
    r2min, r2max = (float(v) for v in args.split(","))
    return AnnulusMask(r2min, r2max)


def write_grid(path, field) -> Path:
    """Write a scalar or vector field as CSV (default) or JSON (``.json``)."""
    path = Path(path)
    dom = field.domain
    flat = field.values.reshape(-1, field.n_components)
    if path.suffix == ".json":
        mask = None if field.mask is None else {"annulus": [field.mask.r2min, field.mask.r2max]}
        obj = {
            "n": dom.n,
            "res": list(dom.resolution),
            "bounds": [list(b) for b in dom.bounds],
            "mask": mask,
            "values": flat.tolist() if field.n_components > 1 else flat[:, 0].tolist(),
        }
        path.write_text(json.dumps(obj))
        return path
    buf = io.StringIO()
    np.savetxt(buf, flat, fmt="%.17g", delimiter=",", header=dom.header(field.mask), comments="# ")
    path.write_text(buf.getvalue())
    return path


def read_grid(path):
    """Read a grid file; returns :class:`ScalarFieldGrid` or :class:`VectorFieldGrid`."""
    path = Path(path)
    if path.suffix == ".json":
        obj = json.loads(path.read_text())
        dom = GridDomain(tuple(tuple(b) for b in obj["bounds"]), tuple(obj["res"]))
        m = obj.get("mask")
        mask = None if not m else AnnulusMask(*m["annulus"])
        values = np.asarray(obj["values"], dtype=float)
    else:
        text = path.read_text()
        first = text.splitlines()[0]
        match = _HEADER.match(first)
        if match is None:
            raise DomainError(f"{path}: missing or malformed grid header")
        res = tuple(int(r) for r in match["res"].split(","))
        bounds = tuple(tuple(float(v) for v in b.split(":")) for b in match["bounds"].split(","))
        dom = GridDomain(bounds, res)
        if int(match["n"]) != dom.n:
            raise DomainError(f"{path}: header n disagrees with res")
        mask = _parse_mask(match["mask"])
        values = np.loadtxt(io.StringIO(text), delimiter=",", comments="#", ndmin=2)
    npts = int(np.prod(dom.resolution))
    values = values.reshape(npts, -1)
    if values.shape[1] == 1:
        return ScalarFieldGrid(dom, values[:, 0].reshape(dom.resolution), mask)
    if values.shape[1] == dom.n:
        return VectorFieldGrid(dom, values.reshape(dom.resolution + (dom.n,)), mask)
    raise DomainError(f"{path}: {values.shape[1]} columns, expected 1 or {dom.n}")
