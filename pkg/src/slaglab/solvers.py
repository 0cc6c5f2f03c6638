"""Dirichlet solvers on rectangular grids.

* :func:`solve_poisson` solves ``Laplace_h u = -2a`` (the linear member of the
  family for ``n = 2`` and ``c = 0``) with the five-point stencil.
* :func:`solve_monge_ampere` solves ``det D_h^2 u = c`` for convex ``u``.
* :func:`solve_family` solves ``F^t(D_h^2 u) = c`` for space-like ``u``.

Both nonlinear solvers run damped Newton iterations with the exact Jacobian
of the central-difference discretisation.  A step is halved until every
nodal Hessian stays admissible and the sup-norm residual decreases.
"""

from __future__ import annotations

import itertools
import re
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np
import scipy.sparse as sp
from scipy.sparse.linalg import spsolve

from .equation_family import (
    ADMISSIBILITY_MARGIN,
    FamilyPoint,
    check_admissible,
    eigen_term,
    eigen_term_derivative,
)
from .errors import (
    ConvergenceError,
    DomainError,
    LeftAdmissibleRegionError,
    PreconditionError,
)
from .grids import GridDomain, ScalarFieldGrid, read_grid

__all__ = [
    "BoundaryData",
    "SolverConfig",
    "SolveResult",
    "hessian_operators",
    "quadratic_fit",
    "transfinite_interpolation",
    "solve_poisson",
    "solve_monge_ampere",
    "solve_family",
]


# --------------------------------------------------------------------------
# inputs
# --------------------------------------------------------------------------


@dataclass(frozen=True, eq=False)
class BoundaryData:
    """Dirichlet trace stored on the full grid; only boundary nodes are read.

    ``source`` records where the data came from, e.g. ``"expr:expcos"`` or
    ``"file:bc.csv"``.
    """

    domain: GridDomain
    values: np.ndarray
    source: str = "array"

    def __post_init__(self):
        values = np.asarray(self.values, dtype=float)
        if values.shape != self.domain.resolution:
            raise DomainError(f"trace shape {values.shape} != grid {self.domain.resolution}")
        if not np.all(np.isfinite(values[self.domain.boundary_mask()])):
            raise DomainError("boundary data has non-finite values")
        object.__setattr__(self, "values", values)

    @classmethod
    def from_function(cls, domain: GridDomain, func, source: str = "expr") -> "BoundaryData":
        vals = np.broadcast_to(func(*domain.mesh()), domain.resolution).astype(float)
        return cls(domain, vals, source)

    @classmethod
    def from_field(cls, u: ScalarFieldGrid, source: str = "field") -> "BoundaryData":
        return cls(u.domain, u.values, source)

    @classmethod
    def from_file(cls, path) -> "BoundaryData":
        """Read a grid file holding either every node or only the boundary
        nodes (row-major order)."""
        path = Path(path)
        text = path.read_text()
        first = text.splitlines()[0] if text else ""
        match = re.match(r"#\s*n=\d+\s+res=(?P<res>[\d,]+)\s+bounds=(?P<bounds>\S+)", first)
        if match is None or path.suffix == ".json":
            u = read_grid(path)
            return cls(u.domain, u.values, f"file:{path.name}")
        res = tuple(int(r) for r in match["res"].split(","))
        bounds = tuple(tuple(float(v) for v in b.split(":")) for b in match["bounds"].split(","))
        dom = GridDomain(bounds, res)
        flat = np.loadtxt(path, delimiter=",", comments="#", ndmin=1).ravel()
        mask = dom.boundary_mask()
        vals = np.zeros(res)
        if flat.size == vals.size:
            vals = flat.reshape(res)
        elif flat.size == int(mask.sum()):
            vals[mask] = flat
        else:
            raise DomainError(f"{path}: {flat.size} values fit neither the grid nor its boundary")
        return cls(dom, vals, f"file:{path.name}")

    def write(self, path) -> Path:
        """Write the boundary node values only, with a grid header."""
        path = Path(path)
        flat = self.values[self.domain.boundary_mask()]
        np.savetxt(path, flat, fmt="%.17g", header=self.domain.header(), comments="# ")
        return path


@dataclass
class SolverConfig:
    """Newton controls.

    ``initial_guess`` is ``None`` (transfinite interpolation of the boundary
    data, exact for quadratics), ``"quadratic"`` (least-squares quadratic fit,
    overwritten by the data on the boundary), a :class:`ScalarFieldGrid`, or a
    grid file path.
    """

    max_iter: int = 50
    tol: float = 1e-10
    max_halvings: int = 30
    initial_guess: object = None

    def __post_init__(self):
        if not self.tol > 0:
            raise DomainError("tolerance must be positive")
        if self.max_iter < 1:
            raise DomainError("max_iter must be >= 1")
        if self.max_halvings < 0:
            raise DomainError("max_halvings must be >= 0")


@dataclass(eq=False)
class SolveResult:
    """Solution with its residual certificate.

    ``regime`` maps ``spacelike``, ``convex`` and ``concave`` to boolean
    arrays over the interior nodes.
    """

    u: ScalarFieldGrid
    residual: float
    iterations: int
    history: list = field(default_factory=list)
    regime: dict = field(default_factory=dict, repr=False)
    equation: str = ""

    def to_dict(self) -> dict:
        return {
            "equation": self.equation,
            "residual": self.residual,
            "iterations": self.iterations,
            "history": list(self.history),
            "regime_counts": {k: int(np.sum(v)) for k, v in self.regime.items()},
            "interior_nodes": int(next(iter(self.regime.values())).size) if self.regime else 0,
        }


# --------------------------------------------------------------------------
# discrete operators
# --------------------------------------------------------------------------


class _Layout:
    def __init__(self, domain: GridDomain):
        self.domain = domain
        res = np.array(domain.resolution)
        self.strides = np.array([int(np.prod(res[i + 1:])) for i in range(len(res))])
        self.boundary = domain.boundary_mask().ravel()
        self.interior = np.flatnonzero(~self.boundary)
        self.bnodes = np.flatnonzero(self.boundary)
        self.size = int(np.prod(res))


def hessian_operators(domain: GridDomain):
    """Sparse matrices ``D[i][j]`` with ``(D[i][j] @ u.ravel())`` the central
    difference ``d^2 u / dx_i dx_j`` at the interior nodes (row-major).

    The stencils coincide with :func:`slaglab.graph_geometry.hessian_field`.
    """
    lay = _Layout(domain)
    n, h = domain.n, domain.spacing
    rows = np.arange(lay.interior.size)
    ops = [[None] * n for _ in range(n)]

    def build(entries):
        r, c, v = [], [], []
        for offset, coef in entries:
            r.append(rows)
            c.append(lay.interior + int(np.dot(offset, lay.strides)))
            v.append(np.full(rows.size, coef))
        return sp.csr_matrix((np.concatenate(v), (np.concatenate(r), np.concatenate(c))),
                             shape=(rows.size, lay.size))

    for i in range(n):
        e = np.zeros(n, int)
        e[i] = 1
        ops[i][i] = build([(e, 1 / h[i] ** 2), (0 * e, -2 / h[i] ** 2), (-e, 1 / h[i] ** 2)])
        for j in range(i + 1, n):
            f = np.zeros(n, int)
            f[j] = 1
            w = 1 / (4 * h[i] * h[j])
            ops[i][j] = ops[j][i] = build([(e + f, w), (e - f, -w), (-e + f, -w), (-e - f, w)])
    return ops


def quadratic_fit(bc: BoundaryData) -> ScalarFieldGrid:
    """Least-squares quadratic polynomial through the boundary data."""
    dom = bc.domain
    mask = dom.boundary_mask()
    coords = [c for c in dom.mesh()]
    n = dom.n
    cols = [np.ones(dom.resolution)] + coords
    for i in range(n):
        for j in range(i, n):
            cols.append(coords[i] * coords[j])
    A = np.stack([c[mask] for c in cols], axis=1)
    coef, *_ = np.linalg.lstsq(A, bc.values[mask], rcond=None)
    return ScalarFieldGrid(dom, sum(k * c for k, c in zip(coef, cols)))


def _laplacian(domain):
    ops = hessian_operators(domain)
    return sum(ops[i][i] for i in range(domain.n)).tocsc()


def _dirichlet_solve(L, lay, boundary_values, rhs, refinements=2):
    """Solve ``L u = rhs`` on interior nodes with iterative refinement."""
    full = np.where(lay.boundary, boundary_values.ravel(), 0.0)
    A = L[:, lay.interior].tocsc()
    full[lay.interior] = spsolve(A, rhs - L[:, lay.bnodes] @ full[lay.bnodes])
    for _ in range(refinements):
        full[lay.interior] += spsolve(A, rhs - L @ full)
    return full


def transfinite_interpolation(bc: BoundaryData) -> ScalarFieldGrid:
    """Boolean sum of linear interpolations between opposite faces.

    Matches the boundary data exactly and reproduces quadratic polynomials;
    its second differences are blends of those of the data along the faces,
    so convexity of smooth data carries over to the interior.
    """
    f = bc.values
    n = f.ndim
    out = np.zeros_like(f)
    for k in range(1, n + 1):
        for axes in itertools.combinations(range(n), k):
            g = f
            for ax in axes:
                shape = [1] * n
                shape[ax] = f.shape[ax]
                s = np.linspace(0.0, 1.0, f.shape[ax]).reshape(shape)
                g = (1 - s) * np.take(g, [0], axis=ax) + s * np.take(g, [-1], axis=ax)
            out = out + (-1) ** (k + 1) * g
    return ScalarFieldGrid(bc.domain, out)


def _initial_guess(bc: BoundaryData, cfg: SolverConfig) -> np.ndarray:
    guess = cfg.initial_guess
    if guess is None:
        u0 = transfinite_interpolation(bc).values
    elif isinstance(guess, str) and guess == "quadratic":
        u0 = quadratic_fit(bc).values
    elif isinstance(guess, ScalarFieldGrid):
        u0 = guess.values
    else:
        u0 = read_grid(guess).values
    if u0.shape != bc.domain.resolution:
        raise PreconditionError("initial guess does not match the grid")
    u0 = np.array(u0, dtype=float)
    mask = bc.domain.boundary_mask()
    u0[mask] = bc.values[mask]
    return u0


# --------------------------------------------------------------------------
# Poisson
# --------------------------------------------------------------------------


def solve_poisson(domain: GridDomain, a: float, bc: BoundaryData) -> SolveResult:
    """Five-point solve of ``Laplace_h u = -2a`` with Dirichlet data."""
    if domain.n != 2:
        raise PreconditionError("solve_poisson is two-dimensional")
    if bc.domain != domain:
        raise PreconditionError("boundary data lives on a different grid")
    lay = _Layout(domain)
    L = _laplacian(domain)
    full = _dirichlet_solve(L, lay, bc.values, np.full(lay.interior.size, -2.0 * a))
    resid = float(np.max(np.abs(L @ full + 2.0 * a)))
    u = ScalarFieldGrid(domain, full.reshape(domain.resolution))
    return SolveResult(u, resid, 1, [resid], {}, "poisson")


# --------------------------------------------------------------------------
# Newton
# --------------------------------------------------------------------------


def _hessians(ops, full):
    n = len(ops)
    H = np.empty((ops[0][0].shape[0], n, n))
    for i in range(n):
        for j in range(i, n):
            H[:, i, j] = H[:, j, i] = ops[i][j] @ full
    return H


def _newton(domain, bc, cfg, residual, linearise, admissible, name):
    """Damped Newton on the interior unknowns.

    ``residual(H) -> r``, ``linearise(H) -> M`` with ``dr = sum M_ij dH_ij``,
    ``admissible(H) -> bool``.
    """
    if bc.domain != domain:
        raise PreconditionError("boundary data lives on a different grid")
    lay = _Layout(domain)
    ops = hessian_operators(domain)
    ops_int = [[op[:, lay.interior] for op in row] for row in ops]
    full = _initial_guess(bc, cfg).ravel()
    H = _hessians(ops, full)
    if not admissible(H):
        raise PreconditionError(f"initial guess is not admissible for {name}")
    r = residual(H)
    res = float(np.max(np.abs(r)))
    history = [res]
    n = domain.n
    it = 0
    while res > cfg.tol:
        if it >= cfg.max_iter:
            raise ConvergenceError(
                f"{name}: no convergence in {cfg.max_iter} iterations (residual {res:.3e})", res, history)
        M = linearise(H)
        J = sp.csr_matrix((lay.interior.size, lay.interior.size))
        for i in range(n):
            for j in range(n):
                J = J + sp.diags(M[:, i, j]) @ ops_int[i][j]
        delta = spsolve(J.tocsc(), -r)
        step = 1.0
        accepted = False
        any_admissible = False
        for _ in range(cfg.max_halvings + 1):
            trial = full.copy()
            trial[lay.interior] += step * delta
            Ht = _hessians(ops, trial)
            if admissible(Ht):
                any_admissible = True
                rt = residual(Ht)
                rest = float(np.max(np.abs(rt)))
                if rest < res:
                    accepted = True
                    break
            step *= 0.5
        if not accepted:
            if not any_admissible:
                raise LeftAdmissibleRegionError(
                    f"{name}: every damped step leaves the admissible region", res, history)
            raise ConvergenceError(f"{name}: line search stalled at residual {res:.3e}", res, history)
        full, H, r, res = trial, Ht, rt, rest
        history.append(res)
        it += 1
    return ScalarFieldGrid(domain, full.reshape(domain.resolution)), H, res, it, history


def _interior_shape(domain):
    return tuple(r - 2 for r in domain.resolution)


def solve_monge_ampere(domain: GridDomain, c: float, bc: BoundaryData,
                       cfg: SolverConfig | None = None) -> SolveResult:
    """Convex solution of ``det D_h^2 u = c``.

    Raises
    ------
    PreconditionError
        If the initial guess is not convex at every interior node.
    LeftAdmissibleRegionError
        If no damped step keeps all nodal Hessians positive definite.
    ConvergenceError
        If the iteration budget is exhausted.
    """
    if not c > 0:
        raise DomainError(f"c must be positive, got {c!r}")
    cfg = cfg or SolverConfig()

    def residual(H):
        return np.linalg.det(H) - c

    def linearise(H):
        # d det = tr(adj(H) dH); adj(H) = det(H) H^{-1} for convex H
        return np.linalg.det(H)[:, None, None] * np.swapaxes(np.linalg.inv(H), -1, -2)

    def admissible(H):
        return bool(np.all(np.linalg.eigvalsh(H)[:, 0] > ADMISSIBILITY_MARGIN))

    u, H, res, it, hist = _newton(domain, bc, cfg, residual, linearise, admissible, "monge-ampere")
    lam = np.linalg.eigvalsh(H)
    shape = _interior_shape(domain)
    regime = {"convex": np.all(lam > 0, axis=-1).reshape(shape)}
    return SolveResult(u, res, it, hist, regime, "monge-ampere")


def solve_family(domain: GridDomain, t: float, c: float, bc: BoundaryData,
                 cfg: SolverConfig | None = None) -> SolveResult:
    """Space-like solution of ``F^t(D_h^2 u) = c``.

    The Jacobian of ``H -> sum phi(lam_k(H))`` is ``V diag(phi'(lam)) V^T``.

    Raises
    ------
    PreconditionError
        If the initial guess is not space-like (or outside the domain of the
        operator) at some interior node.
    LeftAdmissibleRegionError
        If no damped step keeps every node admissible.
    ConvergenceError
        If the iteration budget is exhausted.
    """
    point = FamilyPoint(t, c)
    mc = point.constants
    cfg = cfg or SolverConfig()

    def spacelike(lam):
        return mc.sin_t * (1.0 + lam * lam) + 2.0 * mc.cos_t * lam

    def admissible(H):
        lam = np.linalg.eigvalsh(H)
        if not np.all(spacelike(lam) > ADMISSIBILITY_MARGIN):
            return False
        try:
            check_admissible(lam, point)
        except DomainError:
            return False
        return True

    def residual(H):
        return np.sum(eigen_term(np.linalg.eigvalsh(H), point), axis=-1) - c

    def linearise(H):
        lam, V = np.linalg.eigh(H)
        d = eigen_term_derivative(lam, point)
        return np.einsum("mik,mk,mjk->mij", V, d, V)

    u, H, res, it, hist = _newton(domain, bc, cfg, residual, linearise, admissible, f"family(t={t:g})")
    lam = np.linalg.eigvalsh(H)
    shape = _interior_shape(domain)
    regime = {
        "spacelike": np.all(spacelike(lam) > ADMISSIBILITY_MARGIN, axis=-1).reshape(shape),
        "convex": np.all(lam < -mc.a, axis=-1).reshape(shape),
        "concave": np.all(lam > -mc.a, axis=-1).reshape(shape),
    }
    return SolveResult(u, res, it, hist, regime, "family")
