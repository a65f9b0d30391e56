"""Discretization and application of the kernel integral operator.

The operator acts on functions vanishing at the origin:

    (K h)(s) = - integral_0^r g(s, t) h(t) t^-2 dt,   0 < s <= r.

Two independent routes are provided.

``apply_operator`` exploits the separable form of the kernel: the
integration is split exactly at t = s (the kernel's derivative kink), so
each side has a smooth integrand and composite Gauss-Legendre panels
converge fast; panel counts double until the result is stable to the
requested tolerance.

``nystrom_matrix`` builds the dense collocation matrix
``A[i, j] = -g(s_i, t_j) w_j / t_j**2`` on one shared grid.  The matrix
cannot split at the kink per row, so its accuracy is limited by the panel
resolution (observed O(N^-2) in the total node count); grids are cheap, so
the spectral certificate below simply uses a fine one.

``min_singular_value`` returns the smallest singular value of I - A with its
right singular vector: a scale-invariant measure of how close the discrete
homogeneous equation h = K h is to having a nontrivial solution, plus the
candidate solution itself.  ``DEFAULT_SPECTRAL_PANELS`` / ``_NODES`` /
``_GRADING`` define the grid on which the certificate thresholds of the
verification suite are calibrated: 128 uniform panels x 12 nodes push the
kink-limited discretization error near the singular radius to ~5e-7,
comfortably below the 1e-6 collapse threshold, while one SVD stays around a
second.  Uniform panels beat origin-graded ones here because the kink error
lives in mid-interval panels, not at the origin.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from functools import lru_cache
from typing import Callable

import numpy as np

from .kernel import KernelSpec, UnsupportedOrderError
from .report import ScanReport
from .riccati import eval_irregular, eval_regular

__all__ = [
    "ConvergenceError",
    "QuadratureGrid",
    "NystromOperator",
    "SpectralResult",
    "DEFAULT_SPECTRAL_PANELS",
    "DEFAULT_SPECTRAL_NODES",
    "DEFAULT_SPECTRAL_GRADING",
    "build_grid",
    "spectral_grid",
    "nystrom_matrix",
    "apply_operator",
    "min_singular_value",
    "dump_matrix",
    "sweep",
]

# Grid on which the sigma_min collapse threshold (1e-6) is calibrated.
DEFAULT_SPECTRAL_PANELS = 128
DEFAULT_SPECTRAL_NODES = 12
DEFAULT_SPECTRAL_GRADING = 1.0

# Absolute tolerance target per sub-integral in apply_operator.
DEFAULT_QUAD_TOL = 1e-10

_MAX_DOUBLINGS = 14


class ConvergenceError(RuntimeError):
    """Raised when panel doubling fails to reach the requested tolerance."""


@dataclass(frozen=True, eq=False)
class QuadratureGrid:
    """Composite Gauss-Legendre grid on (0, r].

    ``panel_bounds`` holds the ordered panel boundaries (first 0, last r);
    ``nodes`` and ``weights`` are the concatenated per-panel Gauss points.
    """

    r: float
    panel_bounds: tuple[float, ...]
    nodes: np.ndarray
    weights: np.ndarray
    grading: float

    def __post_init__(self):
        if len(self.nodes) != len(self.weights):
            raise ValueError("nodes and weights must have equal length")
        if np.any(self.weights <= 0.0):
            raise ValueError("weights must be positive")
        if np.any(self.nodes <= 0.0) or np.any(self.nodes >= self.r):
            raise ValueError("nodes must lie strictly inside (0, r)")
        if np.any(np.diff(self.nodes) <= 0.0):
            raise ValueError("nodes must be strictly increasing")
        if abs(float(np.sum(self.weights)) - self.r) > 1e-12 * self.r:
            raise ValueError("weights must sum to r")

    @property
    def panels(self) -> tuple[tuple[float, float], ...]:
        return tuple(zip(self.panel_bounds[:-1], self.panel_bounds[1:]))

    @property
    def size(self) -> int:
        return len(self.nodes)


@dataclass(frozen=True, eq=False)
class NystromOperator:
    """Dense collocation matrix A[i, j] = -g(s_i, t_j) w_j / t_j^2."""

    grid: QuadratureGrid
    matrix: np.ndarray
    spec: KernelSpec


@dataclass(frozen=True, eq=False)
class SpectralResult:
    """Smallest singular value of I - A with its unit right singular vector."""

    sigma_min: float
    null_vector: np.ndarray
    r: float


@lru_cache(maxsize=32)
def _gauss_rule(n: int):
    x, w = np.polynomial.legendre.leggauss(n)
    return x, w


def _panel_nodes(bounds: np.ndarray, nodes_per_panel: int):
    x, w = _gauss_rule(nodes_per_panel)
    mid = 0.5 * (bounds[1:] + bounds[:-1])
    half = 0.5 * (bounds[1:] - bounds[:-1])
    nodes = (mid[:, None] + half[:, None] * x[None, :]).ravel()
    weights = (half[:, None] * w[None, :]).ravel()
    return nodes, weights


def build_grid(
    r,
    panels_count: int = 8,
    nodes_per_panel: int = 12,
    split_at=None,
    grading: float = 2.0,
) -> QuadratureGrid:
    """Build a composite Gauss-Legendre grid on (0, r].

    Panels are graded toward the origin: boundary i sits at
    ``r * (i / panels)**grading`` (grading 1 gives uniform panels).  If
    ``split_at`` is given, it is inserted as an extra panel boundary, so the
    grid can resolve a known kink exactly.
    """
    r = float(r)
    if not math.isfinite(r) or r <= 0.0:
        raise ValueError(f"radius must be positive and finite, got {r!r}")
    if panels_count < 1:
        raise ValueError("panels_count must be >= 1")
    if nodes_per_panel < 2:
        raise ValueError("nodes_per_panel must be >= 2")
    if grading < 1.0:
        raise ValueError("grading exponent must be >= 1")
    bounds = r * (np.arange(panels_count + 1) / panels_count) ** grading
    if split_at is not None:
        split_at = float(split_at)
        if not 0.0 < split_at < r:
            raise ValueError(f"split_at must lie in (0, r), got {split_at!r}")
        if not np.any(np.abs(bounds - split_at) <= 1e-14 * r):
            bounds = np.sort(np.append(bounds, split_at))
    nodes, weights = _panel_nodes(bounds, nodes_per_panel)
    return QuadratureGrid(
        r=r,
        panel_bounds=tuple(float(b) for b in bounds),
        nodes=nodes,
        weights=weights,
        grading=float(grading),
    )


def spectral_grid(r) -> QuadratureGrid:
    """Default grid for singular-value certificates (see module docstring)."""
    return build_grid(
        r,
        panels_count=DEFAULT_SPECTRAL_PANELS,
        nodes_per_panel=DEFAULT_SPECTRAL_NODES,
        grading=DEFAULT_SPECTRAL_GRADING,
    )


def _family_tables(spec: KernelSpec, points: np.ndarray):
    """u_m and v_m sampled at the given points, per order in S."""
    tables = []
    for m, g in zip(spec.sets.s_orders, spec.gamma):
        order = int(m)
        u = np.array([eval_regular(order, t).value for t in points])
        v = np.array([eval_irregular(order, t).value for t in points])
        tables.append((g, u, v))
    return tables


def nystrom_matrix(spec: KernelSpec, grid: QuadratureGrid) -> NystromOperator:
    """Assemble the dense Nystrom matrix on the grid's nodes.

    Collocation points coincide with the quadrature nodes.  The degenerate
    form of the kernel keeps assembly at O(N) function evaluations plus
    O(N^2) arithmetic.
    """
    if not spec.sets.integer_orders:
        raise UnsupportedOrderError(
            "Nystrom assembly needs nonnegative integer orders in S"
        )
    x = grid.nodes
    g_matrix = np.zeros((len(x), len(x)))
    for g, u, v in _family_tables(spec, x):
        # rows are collocation s_i, columns integration t_j; nodes ascending,
        # so i >= j means t_j <= s_i and the u(min) v(max) split is triangular
        g_matrix += g * (
            np.tril(np.outer(v, u)) + np.triu(np.outer(u, v), k=1)
        )
    a_matrix = -g_matrix * (grid.weights / grid.nodes**2)[None, :]
    if not np.all(np.isfinite(a_matrix)):
        raise ValueError("Nystrom matrix contains non-finite entries")
    return NystromOperator(grid=grid, matrix=a_matrix, spec=spec)


def min_singular_value(op: NystromOperator) -> SpectralResult:
    """Smallest singular value of I - A and its right singular vector.

    A near-zero value certifies a nontrivial discrete solution of h = K h;
    the singular vector is the candidate solution sampled at the grid nodes
    (unit Euclidean norm, sign as returned by the SVD).
    """
    matrix = np.eye(op.grid.size) - op.matrix
    _, singular_values, v_rows = np.linalg.svd(matrix)
    return SpectralResult(
        sigma_min=float(singular_values[-1]),
        null_vector=v_rows[-1].copy(),
        r=op.grid.r,
    )


def dump_matrix(op: NystromOperator, path) -> None:
    """Write the dense matrix as CSV (debugging aid; one row per line)."""
    from .report import fmt_float

    lines = [
        ",".join(fmt_float(entry) for entry in row) for row in op.matrix
    ]
    with open(path, "w") as handle:
        handle.write("\n".join(lines) + "\n")


def _integrate_fixed(
    f: Callable[[float], float], bounds: np.ndarray, nodes_per_panel: int
) -> float:
    nodes, weights = _panel_nodes(bounds, nodes_per_panel)
    values = np.array([f(t) for t in nodes])
    return float(np.dot(weights, values))


def _graded_bounds(a: float, b: float, panels: int, grading: float) -> np.ndarray:
    frac = (np.arange(panels + 1) / panels) ** grading
    return a + (b - a) * frac


def _integrate_adaptive(
    f: Callable[[float], float],
    a: float,
    b: float,
    tol: float,
    grading: float,
    nodes_per_panel: int,
    start_panels: int,
) -> float:
    if b <= a:
        return 0.0
    panels = start_panels
    previous = None
    for _ in range(_MAX_DOUBLINGS):
        value = _integrate_fixed(f, _graded_bounds(a, b, panels, grading), nodes_per_panel)
        if previous is not None and abs(value - previous) <= tol:
            return value
        previous = value
        panels *= 2
    raise ConvergenceError(
        f"integral on [{a:g}, {b:g}] did not stabilize to {tol:.1e} "
        f"within {panels // 2} panels"
    )


def apply_operator(
    spec: KernelSpec,
    r,
    h: Callable[[float], float],
    s,
    tol: float = DEFAULT_QUAD_TOL,
    panels: int | None = None,
    nodes_per_panel: int = 16,
) -> float:
    """Apply the integral operator to a function h at the point s.

    Uses the separable kernel split at t = s, so both sub-integrals are
    smooth:

        (K h)(s) = - sum_m gamma_m [ v_m(s) I_m^<(s) + u_m(s) I_m^>(s) ],
        I_m^< = integral_0^s u_m(t) h(t) t^-2 dt,
        I_m^> = integral_s^r v_m(t) h(t) t^-2 dt.

    h must vanish at the origin at least linearly so that h(t) t^-2 stays
    integrable.  With ``panels=None`` each sub-integral doubles its panel
    count until consecutive values differ by at most ``tol`` (absolute);
    a fixed ``panels`` skips the adaptivity (used by convergence studies).

    Raises
    ------
    ConvergenceError
        If doubling exhausts its budget before reaching ``tol``.
    """
    if not spec.sets.integer_orders:
        raise UnsupportedOrderError("operator application needs integer orders in S")
    r = float(r)
    s = float(s)
    if not math.isfinite(r) or r <= 0.0:
        raise ValueError(f"radius must be positive and finite, got {r!r}")
    if not 0.0 < s <= r:
        raise ValueError(f"evaluation point must lie in (0, r], got {s!r}")

    total = 0.0
    for m, g in zip(spec.sets.s_orders, spec.gamma):
        order = int(m)

        def left_integrand(t, _order=order):
            return eval_regular(_order, t).value * h(t) / (t * t)

        def right_integrand(t, _order=order):
            return eval_irregular(_order, t).value * h(t) / (t * t)

        if panels is not None:
            left = _integrate_fixed(
                left_integrand, _graded_bounds(0.0, s, panels, 2.0), nodes_per_panel
            )
            right = (
                _integrate_fixed(
                    right_integrand, _graded_bounds(s, r, panels, 1.0), nodes_per_panel
                )
                if s < r
                else 0.0
            )
        else:
            left = _integrate_adaptive(
                left_integrand, 0.0, s, tol, grading=2.0,
                nodes_per_panel=nodes_per_panel, start_panels=2,
            )
            right = (
                _integrate_adaptive(
                    right_integrand, s, r, tol, grading=1.0,
                    nodes_per_panel=nodes_per_panel, start_panels=2,
                )
                if s < r
                else 0.0
            )
        total += g * (
            eval_irregular(order, s).value * left + eval_regular(order, s).value * right
        )
    return -total


def sweep(
    spec: KernelSpec,
    r_min,
    r_max,
    steps: int,
    panels_count: int = 8,
    nodes_per_panel: int = 12,
    grading: float = 2.0,
    refine: bool = False,
) -> ScanReport:
    """Tabulate sigma_min(I - A) over a range of radii.

    With ``refine=True`` every radius is redone at doubled panel count and
    the absolute change is recorded in the ``refinement_delta`` column
    (otherwise the column is empty).  Per-point failures are recorded in
    ``report.failures`` instead of aborting the sweep.
    """
    r_min = float(r_min)
    r_max = float(r_max)
    if not 0.0 < r_min < r_max:
        raise ValueError(f"need 0 < r_min < r_max, got {r_min!r}, {r_max!r}")
    if steps < 2:
        raise ValueError("steps must be >= 2")
    rows = []
    failures = []
    for r in np.linspace(r_min, r_max, steps):
        r = float(r)
        try:
            grid = build_grid(r, panels_count, nodes_per_panel, grading=grading)
            sigma = min_singular_value(nystrom_matrix(spec, grid)).sigma_min
            delta = None
            if refine:
                fine = build_grid(r, 2 * panels_count, nodes_per_panel, grading=grading)
                sigma_fine = min_singular_value(nystrom_matrix(spec, fine)).sigma_min
                delta = abs(sigma_fine - sigma)
            rows.append((r, sigma, delta))
        except Exception as exc:  # per-point failures must not kill the scan
            failures.append((r, str(exc)))
    return ScanReport(
        columns=("r", "sigma_min", "refinement_delta"),
        rows=rows,
        failures=failures,
    )
