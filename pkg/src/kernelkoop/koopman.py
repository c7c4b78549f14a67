"""Kernel estimators of the composition operator g -> g ∘ f from trajectory data.

Two estimators are provided.  The pullback interpolant fits coefficients
against the kernel matrix of the advanced centers f(Xi) and evaluates as a
function of the advanced state; it interpolates the training outputs
exactly.  The projected estimator composes two orthogonal projections onto
the span of kernel sections at the centers and evaluates as a function of
the current state.  With the kernel-section basis and as many basis
functions as samples, the projected estimator coincides with the
least-squares (dynamic mode decomposition style) operator fit, which is
also implemented here for cross-checking.
"""

from __future__ import annotations

import enum
import warnings
from dataclasses import dataclass
from typing import Sequence

import numpy as np
from scipy.spatial.distance import pdist

from .errors import DegenerateInputError, InvalidArgumentError
from .kernels import KernelSpec, PointSet, kernel_matrix
from .linsys import SolveReport, solve_spd


def _as_column_points(arr) -> np.ndarray:
    """Coerce an array of m points to shape (m, d); 1-D input means d = 1."""
    a = np.asarray(arr, dtype=float)
    if a.ndim == 1:
        a = a[:, None]
    return a


@dataclass
class TrajectoryDataset:
    """Ordered samples (k_i, x_{k_i}, x_{k_i+1}, y_{k_i+1}) from one trajectory.

    Both the sampled states and their advanced states are stored, so the
    estimators never need the (unknown) dynamics map itself.  Outputs are
    measurements of the (unknown) observable at the advanced states.
    """

    k: np.ndarray
    x: np.ndarray
    x_next: np.ndarray
    y_next: np.ndarray

    def __post_init__(self) -> None:
        self.k = np.asarray(self.k, dtype=int)
        self.x = _as_column_points(self.x)
        self.x_next = _as_column_points(self.x_next)
        y = np.asarray(self.y_next, dtype=float)
        if y.ndim == 1:
            y = y[:, None]
        self.y_next = y
        m = self.k.shape[0]
        if self.x.shape[0] != m or self.x_next.shape[0] != m or self.y_next.shape[0] != m:
            raise InvalidArgumentError("record arrays must have equal length")
        if self.x.shape != self.x_next.shape:
            raise InvalidArgumentError("x and x_next must share dimension")
        if m == 0:
            raise DegenerateInputError("dataset is empty")

    def __len__(self) -> int:
        return self.k.shape[0]

    @property
    def state_dim(self) -> int:
        return self.x.shape[1]

    @property
    def output_dim(self) -> int:
        return self.y_next.shape[1]

    @classmethod
    def from_records(cls, records: Sequence[tuple]) -> "TrajectoryDataset":
        """Build from an iterable of (k, x, x_next, y_next) tuples."""
        if not records:
            raise DegenerateInputError("dataset is empty")
        k, x, x_next, y_next = zip(*records)
        return cls(np.array(k), np.array(x), np.array(x_next), np.array(y_next))


class EstimateMode(enum.Enum):
    PULLBACK = "pullback"
    PROJECTED = "projected"


@dataclass
class KoopmanEstimate:
    """A fitted kernel expansion sum_i alpha_i K(c_i, .) per output component.

    In PULLBACK mode the expansion centers c_i are the advanced centers and
    the estimate is a function of the advanced state; in PROJECTED mode the
    centers are the sample states themselves.
    """

    mode: EstimateMode
    centers: PointSet
    advanced_centers: PointSet
    alpha: np.ndarray
    kernel: KernelSpec
    diagnostics: SolveReport

    def __post_init__(self) -> None:
        self.alpha = np.asarray(self.alpha, dtype=float)
        if self.alpha.ndim == 1:
            self.alpha = self.alpha[:, None]
        m = len(self.centers)
        if len(self.advanced_centers) != m or self.alpha.shape[0] != m:
            raise InvalidArgumentError(
                "centers, advanced centers and coefficient rows must agree"
            )

    @property
    def output_dim(self) -> int:
        return self.alpha.shape[1]

    def predict(self, x) -> np.ndarray:
        return predict(self, x)


@dataclass
class EdmdOperator:
    """Least-squares operator matrix A with its basis-defining center set."""

    A: np.ndarray
    basis_centers: PointSet | None = None
    kernel: KernelSpec | None = None
    residual: float = 0.0
    rank: int = 0
    rank_deficient: bool = False


def _center_rows(dataset: TrajectoryDataset, centers: PointSet) -> np.ndarray:
    """Positions of the subselected centers inside the dataset, via time index."""
    if centers.indices is None:
        raise InvalidArgumentError("centers must carry trajectory indices")
    lookup = {int(t): i for i, t in enumerate(dataset.k)}
    rows = []
    for t in centers.indices:
        try:
            rows.append(lookup[int(t)])
        except KeyError:
            raise InvalidArgumentError(
                f"center time index {int(t)} not present in dataset"
            ) from None
    rows = np.array(rows, dtype=int)
    if not np.array_equal(dataset.x[rows], centers.points):
        raise InvalidArgumentError("center coordinates disagree with dataset states")
    return rows


def fit_pullback(
    dataset: TrajectoryDataset,
    centers: PointSet,
    kernel: KernelSpec,
    jitter_policy: str | float = "none",
) -> KoopmanEstimate:
    """Interpolate outputs against the kernel matrix of the advanced centers.

    Coefficients solve K(f(Xi), f(Xi)) alpha = [y at advanced centers].
    The fitted estimate reproduces every training output exactly (up to
    solver tolerance) when evaluated at the advanced centers.
    """
    rows = _center_rows(dataset, centers)
    advanced = PointSet(dataset.x_next[rows].copy(), indices=dataset.k[rows])
    targets = dataset.y_next[rows]
    mindist = _min_pairwise(advanced.points)
    if mindist == 0.0:
        raise DegenerateInputError(
            "advanced centers must be pairwise distinct for the pullback fit"
        )
    K = kernel_matrix(kernel, advanced, advanced)
    report = solve_spd(K, targets, jitter_policy)
    return KoopmanEstimate(
        mode=EstimateMode.PULLBACK,
        centers=centers,
        advanced_centers=advanced,
        alpha=report.coefficients,
        kernel=kernel,
        diagnostics=report,
    )


def fit_umf(
    dataset: TrajectoryDataset,
    centers: PointSet,
    kernel: KernelSpec,
    g_at_centers: np.ndarray | None = None,
    jitter_policy: str | float = "none",
) -> KoopmanEstimate:
    """Projected estimator: project g, compose with the sampled dynamics, project again.

    With K = K(Xi, Xi) and C = K(Xi, f(Xi)), the coefficients for each
    output component are alpha = K^-1 C^T K^-1 g(Xi), computed as two SPD
    solves.  ``g_at_centers`` supplies g evaluated at the centers; when
    omitted, the observable values are looked up from the dataset outputs
    (the record advanced into each center carries its measurement).
    """
    rows = _center_rows(dataset, centers)
    advanced = PointSet(dataset.x_next[rows].copy(), indices=dataset.k[rows])
    if g_at_centers is None:
        g = _outputs_at_centers(dataset, centers)
    else:
        g = np.asarray(g_at_centers, dtype=float)
        if g.ndim == 1:
            g = g[:, None]
        if g.shape[0] != len(centers):
            raise InvalidArgumentError(
                f"g_at_centers must have {len(centers)} rows, got {g.shape[0]}"
            )
    K = kernel_matrix(kernel, centers, centers)
    C = kernel_matrix(kernel, centers, advanced)
    first = solve_spd(K, g, jitter_policy)
    second = solve_spd(K, C.T @ first.coefficients, jitter_policy)
    report = SolveReport(
        coefficients=second.coefficients,
        condition_number=first.condition_number,
        min_eigenvalue=first.min_eigenvalue,
        jitter_used=max(first.jitter_used, second.jitter_used),
    )
    return KoopmanEstimate(
        mode=EstimateMode.PROJECTED,
        centers=centers,
        advanced_centers=advanced,
        alpha=report.coefficients,
        kernel=kernel,
        diagnostics=report,
    )


def _outputs_at_centers(dataset: TrajectoryDataset, centers: PointSet) -> np.ndarray:
    """Observable values at the centers themselves: y at time k_i is the
    output attached to the record advanced from time k_i - 1."""
    lookup = {int(t): i for i, t in enumerate(dataset.k)}
    values = []
    for t in centers.indices:
        prev = lookup.get(int(t) - 1)
        if prev is None:
            raise DegenerateInputError(
                f"no output measurement available at time {int(t)}: "
                f"record {int(t) - 1} is missing (pass g_at_centers explicitly)"
            )
        values.append(dataset.y_next[prev])
    return np.array(values)


def _min_pairwise(points: np.ndarray) -> float:
    if points.shape[0] < 2:
        return float("inf")
    return float(pdist(points).min())


def predict(estimate: KoopmanEstimate, x) -> np.ndarray:
    """Evaluate the fitted expansion at one query point or a batch.

    A 1-D input returns the output vector; an (m, d) batch returns (m, n).
    PULLBACK estimates expect the advanced state as the query point.
    """
    pts = np.asarray(x, dtype=float)
    single = pts.ndim == 1
    if single:
        pts = pts[None, :]
    base = (
        estimate.advanced_centers
        if estimate.mode is EstimateMode.PULLBACK
        else estimate.centers
    )
    if pts.shape[1] != base.dim:
        raise InvalidArgumentError(
            f"query dimension {pts.shape[1]} does not match centers ({base.dim})"
        )
    out = kernel_matrix(estimate.kernel, pts, base.points) @ estimate.alpha
    return out[0] if single else out


def empirical_risk(targets, predictions) -> float:
    """Mean squared Euclidean output error over a sample batch."""
    t = np.asarray(targets, dtype=float)
    p = np.asarray(predictions, dtype=float)
    if t.shape != p.shape:
        raise InvalidArgumentError(f"shape mismatch: {t.shape} vs {p.shape}")
    if t.size == 0:
        raise DegenerateInputError("empirical risk of an empty sample list")
    if t.ndim == 1:
        t = t[:, None]
        p = p[:, None]
    return float(np.mean(np.sum((t - p) ** 2, axis=1)))


def kernel_sections(kernel: KernelSpec, centers: PointSet, points) -> np.ndarray:
    """Basis-evaluation matrix: entry (i, j) is K(c_i, p_j)."""
    pts = np.asarray(points, dtype=float)
    if pts.ndim == 1:
        pts = pts[None, :]
    return kernel_matrix(kernel, centers.points, pts)


def edmd_fit(
    psi_x: np.ndarray,
    psi_x_plus: np.ndarray,
    basis_centers: PointSet | None = None,
    kernel: KernelSpec | None = None,
) -> EdmdOperator:
    """Least-squares fit of A minimizing ||A Psi(X) - Psi(X+)||_F.

    Solved through a rank-revealing factorization, so rank-deficient
    basis-evaluation matrices yield the minimum-norm solution with a
    warning instead of failing like the normal-equations closed form.
    """
    Px = np.asarray(psi_x, dtype=float)
    Pp = np.asarray(psi_x_plus, dtype=float)
    if Px.ndim != 2 or Px.shape != Pp.shape:
        raise InvalidArgumentError(
            f"basis evaluation matrices must share shape, got {Px.shape} and {Pp.shape}"
        )
    n_basis = Px.shape[0]
    solution, _, rank, _ = np.linalg.lstsq(Px.T, Pp.T, rcond=None)
    A = solution.T
    rank = int(rank)
    deficient = rank < n_basis
    if deficient:
        warnings.warn(
            f"basis evaluation matrix has rank {rank} < {n_basis}; "
            "returning the minimum-norm least-squares operator",
            RuntimeWarning,
            stacklevel=2,
        )
    residual = float(np.linalg.norm(A @ Px - Pp, "fro"))
    return EdmdOperator(
        A=A,
        basis_centers=basis_centers,
        kernel=kernel,
        residual=residual,
        rank=rank,
        rank_deficient=deficient,
    )


def edmd_apply(op: EdmdOperator, g_coeffs, x) -> float:
    """Evaluate (A-advanced g)(x) = g_coeffs^T A psi(x) in the kernel-section basis."""
    if op.basis_centers is None or op.kernel is None:
        raise InvalidArgumentError(
            "operator carries no kernel-section basis; fit with basis_centers and kernel"
        )
    coeffs = np.asarray(g_coeffs, dtype=float).ravel()
    if coeffs.shape[0] != op.A.shape[0]:
        raise InvalidArgumentError(
            f"g_coeffs must have length {op.A.shape[0]}, got {coeffs.shape[0]}"
        )
    psi = kernel_sections(op.kernel, op.basis_centers, x)[:, 0]
    return float(coeffs @ op.A @ psi)
