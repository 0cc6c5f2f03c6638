"""Oriented n-planes in R^n x R^n, the metric family g_t and calibration forms.

Planes are stored either as a graph matrix ``Q`` (the plane spanned by
``e_i + sum_j Q[i, j] f_j`` where ``e``/``f`` are the x/y coordinate vectors)
or as an ordered basis of ``n`` row vectors in R^{2n}.  Every metric-dependent
operation takes an explicit :class:`MetricSpec`; ``dxdy`` and ``g_0 = 2 dxdy``
are deliberately different objects.
"""

from __future__ import annotations

import itertools
import json
import math
from dataclasses import dataclass
from typing import NamedTuple

import numpy as np

from .errors import DomainError, NotSpacelikeError, PreconditionError

__all__ = [
    "DEFAULT_TOL",
    "MetricConstants",
    "MetricSpec",
    "TangentPlane",
    "metric_constants",
    "induced_gram",
    "plane_volume",
    "is_lagrangian",
    "is_spacelike",
    "orthonormal_basis",
    "phi_c",
    "dz",
    "alpha_theta",
    "beta_theta",
    "SymDetBound",
    "sym_det_bound",
    "pk_decomposition",
    "pfaffian",
    "pseudo_phase",
    "graph_grams",
    "graph_volumes",
    "graph_phi_c",
]

DEFAULT_TOL = 1e-9
QUARTER_PI = math.pi / 4
_REGIME_ATOL = 1e-14


def _clean(x: float) -> float:
    # cos(pi/2) and friends come out as ~6e-17; snap them to zero
    return 0.0 if abs(x) < 4 * np.finfo(float).eps else x


# --------------------------------------------------------------------------
# constants of the family
# --------------------------------------------------------------------------


@dataclass(frozen=True)
class MetricConstants:
    """Scalars derived from the family parameter ``t``.

    ``a = cot t``, ``b = sqrt|cot^2 t - 1|``; ``sigma``/``tau`` are the
    coefficients of the Lewy rotation; ``C_t = arctan(tau/sigma) -
    arctan(a/b)``.  At ``t = 0`` both ``a`` and ``b`` are ``inf``.
    """

    t: float
    a: float
    b: float
    sigma: float
    tau: float
    C_t: float
    regime: str  # "pseudo" | "degenerate" | "euclidean"

    @property
    def sin_t(self) -> float:
        return _clean(math.sin(self.t))

    @property
    def cos_t(self) -> float:
        return _clean(math.cos(self.t))


def _regime(t: float) -> str:
    if abs(t - QUARTER_PI) <= _REGIME_ATOL:
        return "degenerate"
    return "pseudo" if t < QUARTER_PI else "euclidean"


def metric_constants(t: float) -> MetricConstants:
    """Compute :class:`MetricConstants` for ``t`` in ``[0, pi/2]``.

    Raises
    ------
    DomainError
        If ``t`` lies outside ``[0, pi/2]``.
    """
    t = float(t)
    if not (0.0 <= t <= math.pi / 2) or not math.isfinite(t):
        raise DomainError(f"t={t!r} outside [0, pi/2]")
    regime = _regime(t)
    if regime == "degenerate":
        t = QUARTER_PI
    c, s = _clean(math.cos(t)), _clean(math.sin(t))
    if s == 0.0:
        t = 0.0
    root_sum = math.sqrt(c + s)
    root_diff = 0.0 if regime == "degenerate" else math.sqrt(abs(c - s))
    sigma = (root_sum + root_diff) / 2
    tau = (root_sum - root_diff) / 2
    if t == 0.0:
        a = b = math.inf
        ratio_angle = QUARTER_PI  # lim a/b = 1
    else:
        a = c / s
        if regime == "degenerate":
            a, b = 1.0, 0.0
        else:
            # |cot^2 - 1| = |cos 2t| / sin^2 t, stable near pi/4
            b = math.sqrt(abs(math.cos(2 * t))) / s
        ratio_angle = math.atan2(a, b)
    C_t = math.atan2(tau, sigma) - ratio_angle
    return MetricConstants(t=t, a=a, b=b, sigma=sigma, tau=tau, C_t=C_t, regime=regime)


# --------------------------------------------------------------------------
# metrics
# --------------------------------------------------------------------------


@dataclass(frozen=True)
class MetricSpec:
    """A constant symmetric bilinear form on R^n x R^n.

    ``kind`` is ``"dxdy"``, ``"family"`` (with parameter ``t``) or
    ``"euclidean"``.
    """

    kind: str
    t: float | None = None

    def __post_init__(self):
        if self.kind not in ("dxdy", "family", "euclidean"):
            raise DomainError(f"unknown metric kind {self.kind!r}")
        if self.kind == "family":
            metric_constants(self.t)  # validates t

    @classmethod
    def dxdy(cls) -> "MetricSpec":
        return cls("dxdy")

    @classmethod
    def family(cls, t: float) -> "MetricSpec":
        return cls("family", float(t))

    @classmethod
    def euclidean(cls) -> "MetricSpec":
        return cls("euclidean")

    def blocks(self) -> tuple[float, float]:
        """Return ``(d, o)`` such that the matrix is ``[[d I, o I], [o I, d I]]``."""
        if self.kind == "dxdy":
            return 0.0, 0.5
        if self.kind == "euclidean":
            return 1.0, 0.0
        return _clean(math.sin(self.t)), _clean(math.cos(self.t))

    def matrix(self, n: int) -> np.ndarray:
        d, o = self.blocks()
        eye = np.eye(n)
        return np.block([[d * eye, o * eye], [o * eye, d * eye]])

    def __str__(self) -> str:
        return f"family({self.t:g})" if self.kind == "family" else self.kind


# --------------------------------------------------------------------------
# planes
# --------------------------------------------------------------------------


@dataclass(frozen=True, eq=False)
class TangentPlane:
    """Oriented n-plane in R^{2n}, by graph matrix or by ordered basis."""

    n: int
    rep: str
    data: np.ndarray

    def __post_init__(self):
        data = np.array(self.data, dtype=float)
        if self.rep == "graph":
            data = data.reshape(self.n, self.n)
        elif self.rep == "basis":
            data = data.reshape(self.n, 2 * self.n)
            gram = data @ data.T
            scale = np.prod(np.sum(data**2, axis=1))
            if scale == 0 or np.linalg.det(gram) <= 1e-12 * scale:
                raise PreconditionError("basis vectors are linearly dependent")
        else:
            raise DomainError(f"unknown plane representation {self.rep!r}")
        if not np.all(np.isfinite(data)):
            raise DomainError("plane data must be finite")
        object.__setattr__(self, "data", data)

    @classmethod
    def graph(cls, Q) -> "TangentPlane":
        Q = np.atleast_2d(np.asarray(Q, dtype=float))
        return cls(Q.shape[0], "graph", Q)

    @classmethod
    def basis(cls, B) -> "TangentPlane":
        B = np.atleast_2d(np.asarray(B, dtype=float))
        return cls(B.shape[0], "basis", B)

    def basis_matrix(self) -> np.ndarray:
        """Rows are the oriented basis vectors in R^{2n}."""
        if self.rep == "graph":
            return np.hstack([np.eye(self.n), self.data])
        return self.data

    def to_json(self) -> str:
        return json.dumps({"n": self.n, "rep": self.rep, "data": self.data.ravel().tolist()})

    @classmethod
    def from_json(cls, text: str) -> "TangentPlane":
        obj = json.loads(text)
        return cls(int(obj["n"]), obj["rep"], np.asarray(obj["data"], dtype=float))


# vectorised graph-plane kernels, shared with the sweep drivers -----------


def graph_grams(Q: np.ndarray, metric: MetricSpec) -> np.ndarray:
    """Induced Gram matrices for a stack of graph matrices ``Q[..., n, n]``.

    Evaluates the bilinear form on ``[I, Q]`` directly; the block structure
    of the metric reduces it to ``d (I + Q Q^T) + o (Q + Q^T)``.
    """
    Q = np.asarray(Q, dtype=float)
    d, o = metric.blocks()
    Qt = np.swapaxes(Q, -1, -2)
    eye = np.eye(Q.shape[-1])
    return d * (eye + Q @ Qt) + o * (Q + Qt)


def graph_volumes(Q: np.ndarray, metric: MetricSpec, tol: float = DEFAULT_TOL) -> np.ndarray:
    """``sqrt(det Gram)`` for a stack of graph planes; raises if any is not space-like."""
    G = graph_grams(Q, metric)
    lam_min = np.linalg.eigvalsh(G)[..., 0]
    if np.any(lam_min <= tol):
        worst = float(np.min(lam_min))
        raise NotSpacelikeError(
            f"plane not space-like under {metric} (min Gram eigenvalue {worst:.3e})",
            min_eigenvalue=worst,
        )
    return np.sqrt(np.linalg.det(G))


def graph_phi_c(Q: np.ndarray, c: float) -> np.ndarray:
    """``(c + det Q / c) / 2`` for a stack of graph matrices."""
    if not c > 0:
        raise DomainError(f"calibration level c must be positive, got {c!r}")
    return 0.5 * (c + np.linalg.det(Q) / c)


def induced_gram(plane: TangentPlane, metric: MetricSpec) -> np.ndarray:
    """Gram matrix ``g(xi_i, xi_j)`` of the plane's basis under ``metric``."""
    B = plane.basis_matrix()
    G = B @ metric.matrix(plane.n) @ B.T
    return 0.5 * (G + G.T)


def is_spacelike(plane: TangentPlane, metric: MetricSpec, tol: float = DEFAULT_TOL) -> bool:
    return bool(np.linalg.eigvalsh(induced_gram(plane, metric))[0] > tol)


def plane_volume(plane: TangentPlane, metric: MetricSpec, tol: float = DEFAULT_TOL) -> float:
    """Volume of the parallelepiped spanned by the basis, ``sqrt(det Gram)``.

    Raises
    ------
    NotSpacelikeError
        When the Gram matrix has an eigenvalue ``<= tol``; degenerate planes
        are classified as not space-like.
    """
    G = induced_gram(plane, metric)
    lam_min = float(np.linalg.eigvalsh(G)[0])
    if lam_min <= tol:
        raise NotSpacelikeError(
            f"plane not space-like under {metric} (min Gram eigenvalue {lam_min:.3e})",
            min_eigenvalue=lam_min,
        )
    return float(math.sqrt(np.linalg.det(G)))


def is_lagrangian(plane: TangentPlane, tol: float = DEFAULT_TOL) -> bool:
    """Whether the standard symplectic form vanishes on the plane."""
    if plane.rep == "graph":
        Q = plane.data
        return bool(np.max(np.abs(Q - Q.T)) <= tol)
    B = plane.data
    n = plane.n
    X, Y = B[:, :n], B[:, n:]
    omega = X @ Y.T - Y @ X.T
    return bool(np.max(np.abs(omega)) <= tol)


def orthonormal_basis(plane: TangentPlane, metric: MetricSpec, tol: float = DEFAULT_TOL) -> np.ndarray:
    """Orientation-preserving orthonormal basis of the plane under ``metric``.

    Gram-Schmidt, pivoting on the largest remaining squared norm.  The metric
    must be positive definite on the plane.
    """
    B = plane.basis_matrix()
    M = metric.matrix(plane.n)
    work = [row.copy() for row in B]
    out = []
    for _ in range(plane.n):
        norms = [float(v @ M @ v) for v in work]
        k = int(np.argmax(norms))
        if norms[k] <= tol:
            raise NotSpacelikeError(
                f"cannot orthonormalise: plane not space-like under {metric}",
                min_eigenvalue=norms[k],
            )
        e = work.pop(k) / math.sqrt(norms[k])
        work = [v - (v @ M @ e) * e for v in work]
        out.append(e)
    E = np.array(out)
    if np.linalg.det(B @ M @ E.T) < 0:
        E[-1] *= -1.0
    return E


# --------------------------------------------------------------------------
# calibration forms
# --------------------------------------------------------------------------


def phi_c(plane: TangentPlane, c: float) -> float:
    """The form ``(c dx_1..dx_n + dy_1..dy_n / c) / 2`` evaluated on the plane's basis.

    The value is signed; a non-positive result means the plane is not
    oriented with respect to the form.
    """
    if not c > 0:
        raise DomainError(f"calibration level c must be positive, got {c!r}")
    if plane.rep == "graph":
        return float(0.5 * (c + np.linalg.det(plane.data) / c))
    n = plane.n
    B = plane.data
    return float(0.5 * (c * np.linalg.det(B[:, :n]) + np.linalg.det(B[:, n:]) / c))


def dz(plane: TangentPlane, metric: MetricSpec | None = None) -> complex:
    """``dz_1 ^ ... ^ dz_n`` on an orthonormal oriented basis of the plane."""
    metric = metric or MetricSpec.euclidean()
    E = orthonormal_basis(plane, metric)
    n = plane.n
    return complex(np.linalg.det(E[:, :n] + 1j * E[:, n:]))


def alpha_theta(plane: TangentPlane, theta: float, metric: MetricSpec | None = None) -> float:
    """``Re(exp(-i theta) dz)`` on the normalised plane."""
    return float((np.exp(-1j * theta) * dz(plane, metric)).real)


def beta_theta(plane: TangentPlane, theta: float, metric: MetricSpec | None = None) -> float:
    """``Im(exp(-i theta) dz)`` on the normalised plane."""
    return float((np.exp(-1j * theta) * dz(plane, metric)).imag)


# --------------------------------------------------------------------------
# determinant inequality
# --------------------------------------------------------------------------


class SymDetBound(NamedTuple):
    det_q: float
    det_sym: float
    gap: float


def _split(Q: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    Q = np.asarray(Q, dtype=float)
    if Q.ndim != 2 or Q.shape[0] != Q.shape[1]:
        raise DomainError("Q must be a square matrix")
    S = 0.5 * (Q + Q.T)
    try:
        np.linalg.cholesky(S)
    except np.linalg.LinAlgError:
        raise PreconditionError("symmetric part of Q is not positive definite") from None
    return S, 0.5 * (Q - Q.T)


def sym_det_bound(Q) -> SymDetBound:
    """``det Q`` against ``det((Q + Q^T)/2)`` for ``Q`` with positive symmetric part."""
    S, _ = _split(Q)
    det_q = float(np.linalg.det(np.asarray(Q, dtype=float)))
    det_sym = float(np.linalg.det(S))
    return SymDetBound(det_q, det_sym, det_q - det_sym)


def pfaffian(A: np.ndarray) -> float:
    """Pfaffian of an antisymmetric matrix by expansion along the first row."""
    m = A.shape[0]
    if m == 0:
        return 1.0
    if m % 2:
        return 0.0
    if m == 2:
        return float(A[0, 1])
    total = 0.0
    rest = np.arange(1, m)
    for idx, j in enumerate(rest):
        if A[0, j] == 0.0:
            continue
        keep = np.delete(rest, idx)
        total += (-1) ** idx * A[0, j] * pfaffian(A[np.ix_(keep, keep)])
    return total


PK_MAX_DIM = 6


def pk_decomposition(Q) -> np.ndarray:
    """Split ``det Q`` by the number of symmetric-part eigenvalues per term.

    In the eigenbasis of ``S = (Q + Q^T)/2`` the matrix reads ``diag(lam) + A``
    with ``A`` antisymmetric, and

        det Q = sum_S prod_{i in S} lam_i * det A[S^c, S^c].

    Entry ``k`` of the result collects the subsets of size ``k``.  The
    complementary determinants are evaluated as squared Pfaffians (odd sizes
    vanish), so every entry except the last is nonnegative by construction.
    """
    S, A = _split(Q)
    n = S.shape[0]
    if n > PK_MAX_DIM:
        raise DomainError(f"pk_decomposition is limited to n <= {PK_MAX_DIM}, got n={n}")
    lam, V = np.linalg.eigh(S)
    A = V.T @ A @ V
    A = 0.5 * (A - A.T)
    P = np.zeros(n + 1)
    idx = range(n)
    for k in range(n + 1):
        if (n - k) % 2:
            continue
        for subset in itertools.combinations(idx, k):
            comp = [i for i in idx if i not in subset]
            P[k] += np.prod(lam[list(subset)]) * pfaffian(A[np.ix_(comp, comp)]) ** 2
    return P


# --------------------------------------------------------------------------
# homogeneous-space map
# --------------------------------------------------------------------------


def pseudo_phase(plane: TangentPlane, tol: float = DEFAULT_TOL) -> tuple[float, float]:
    """``(det A, det B)`` of a dxdy-orthonormal basis ``(A | B)`` of a space-like
    Lagrangian plane; the pair lies on ``{s t = 1}``."""
    if not is_lagrangian(plane, tol):
        raise PreconditionError("pseudo_phase needs a Lagrangian plane")
    metric = MetricSpec.dxdy()
    if not is_spacelike(plane, metric, tol):
        raise PreconditionError("pseudo_phase needs a plane space-like under dxdy")
    E = orthonormal_basis(plane, metric, tol)
    n = plane.n
    return float(np.linalg.det(E[:, :n])), float(np.linalg.det(E[:, n:]))
