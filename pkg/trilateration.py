#!/usr/bin/env python3
"""
Trilateration: position from distances to three or more fixed anchors.

The circle equations (x - x_i)^2 + (y - y_i)^2 = d_i^2 are linearized by
subtracting the first one from the others and solved through the normal
equations. The linear solution then seeds a Gauss-Newton refinement of
sum_i (|p - c_i|^2 - d_i^2)^2, which is what matters once noisy distances make
the circles miss each other; near a minimum the refinement takes full Newton
steps. A second start taken from a coarse grid over the anchor area keeps the
refinement out of a mirror-image local minimum.
"""
import logging
from typing import Sequence, Tuple

import numpy as np

from core import Position, PositionEstimate
from errors import GeometryError, InputError

logger = logging.getLogger(__name__)

MAX_CONDITION = 1e12
STEP_TOLERANCE = 1e-10      # m
MAX_ITERATIONS = 50
COARSE_GRID_POINTS = 41

Anchor = Tuple[Position, float]


def circle_residuals(point: np.ndarray, centers: np.ndarray, distances: np.ndarray) -> np.ndarray:
    """|p - c_i|^2 - d_i^2 for every anchor."""
    diff = point - centers
    return np.einsum("ij,ij->i", diff, diff) - distances ** 2


def residual_sum(point: np.ndarray, centers: np.ndarray, distances: np.ndarray) -> float:
    r = circle_residuals(point, centers, distances)
    return float(r @ r)


def residual_grid(xs: np.ndarray, ys: np.ndarray, centers: np.ndarray,
                  distances: np.ndarray) -> np.ndarray:
    """Residual sum evaluated on the grid xs x ys; result shape (len(ys), len(xs))."""
    gx, gy = np.meshgrid(xs, ys)
    total = np.zeros_like(gx)
    for (cx, cy), d in zip(centers, distances):
        r = (gx - cx) ** 2 + (gy - cy) ** 2 - d ** 2
        total += r * r
    return total


def _validate(anchors: Sequence[Anchor]) -> Tuple[np.ndarray, np.ndarray]:
    if len(anchors) < 3:
        raise InputError(f"trilateration needs at least 3 anchors, got {len(anchors)}")
    centers = np.array([[p.x, p.y] for p, _ in anchors], dtype=float)
    distances = np.array([d for _, d in anchors], dtype=float)
    if not np.all(np.isfinite(distances)):
        raise InputError(f"distances must be finite, got {distances.tolist()}")
    if np.any(distances <= 0):
        raise InputError(f"distances must be positive, got {distances.tolist()}")
    return centers, distances


def linearized_solution(centers: np.ndarray, distances: np.ndarray) -> np.ndarray:
    """
    Least-squares solution of the linear system obtained by subtracting the
    first circle equation from the others.

    Raises:
        GeometryError: when the normal matrix is singular (collinear anchors)
    """
    a = 2.0 * (centers[1:] - centers[0])
    b = (np.sum(centers[1:] ** 2, axis=1) - np.sum(centers[0] ** 2)
         - distances[1:] ** 2 + distances[0] ** 2)
    normal = a.T @ a
    cond = np.linalg.cond(normal)
    if not np.isfinite(cond) or cond > MAX_CONDITION:
        raise GeometryError(f"anchors are collinear (normal matrix condition number {cond:.3g})")
    return np.linalg.solve(normal, a.T @ b)


def gauss_newton(start: np.ndarray, centers: np.ndarray, distances: np.ndarray,
                 max_iterations: int = MAX_ITERATIONS,
                 tolerance: float = STEP_TOLERANCE) -> Tuple[np.ndarray, int]:
    """
    Gauss-Newton on the squared circle residuals with step halving.

    The second-order term 2 sum(r_i) I is added to J^T J whenever the sum stays
    positive definite, which turns the step into a full Newton step. Otherwise
    (far from a minimum, or inside every circle) the plain J^T J step is taken.

    Returns:
        (point, iterations)
    """
    point = np.array(start, dtype=float)
    cost = residual_sum(point, centers, distances)
    identity = np.eye(point.size)
    iterations = 0
    for iterations in range(1, max_iterations + 1):
        r = circle_residuals(point, centers, distances)
        jac = 2.0 * (point - centers)
        normal = jac.T @ jac
        hessian = normal + 2.0 * float(r.sum()) * identity
        matrix = hessian if np.linalg.eigvalsh(hessian)[0] > 0 else normal
        try:
            step = np.linalg.solve(matrix, -jac.T @ r)
        except np.linalg.LinAlgError:
            step = np.linalg.lstsq(jac, -r, rcond=None)[0]

        # Halve until the objective does not increase
        scale = 1.0
        for _ in range(40):
            candidate = point + scale * step
            candidate_cost = residual_sum(candidate, centers, distances)
            if candidate_cost <= cost:
                break
            scale *= 0.5
        else:
            break

        moved = float(np.linalg.norm(scale * step))
        point, cost = candidate, candidate_cost
        if moved < tolerance:
            break
    return point, iterations


def _coarse_start(centers: np.ndarray, distances: np.ndarray) -> np.ndarray:
    margin = float(np.max(distances))
    lo = centers.min(axis=0) - margin
    hi = centers.max(axis=0) + margin
    xs = np.linspace(lo[0], hi[0], COARSE_GRID_POINTS)
    ys = np.linspace(lo[1], hi[1], COARSE_GRID_POINTS)
    grid = residual_grid(xs, ys, centers, distances)
    iy, ix = np.unravel_index(int(np.argmin(grid)), grid.shape)
    return np.array([xs[ix], ys[iy]])


def trilaterate(anchors: Sequence[Anchor], timestamp: int = 0,
                method_tag: str = "trilateration") -> PositionEstimate:
    """
    Solve for the target position from (anchor position, distance) pairs.

    Args:
        anchors: at least three (Position, distance in meters) pairs, not all collinear
        timestamp: echoed into the estimate
        method_tag: echoed into the estimate

    Returns:
        PositionEstimate whose residual is the sum of squared circle residuals

    Raises:
        InputError: fewer than 3 anchors or non-positive distances
        GeometryError: collinear anchors
    """
    centers, distances = _validate(anchors)
    linear = linearized_solution(centers, distances)

    best_point, best_iterations = gauss_newton(linear, centers, distances)
    best_cost = residual_sum(best_point, centers, distances)

    if best_cost > 1e-12:
        point, iterations = gauss_newton(_coarse_start(centers, distances), centers, distances)
        cost = residual_sum(point, centers, distances)
        if cost < best_cost:
            best_point, best_iterations, best_cost = point, iterations, cost

    logger.debug(f"trilaterate: {best_point.tolist()} residual={best_cost:.3g} "
                 f"iterations={best_iterations}")
    return PositionEstimate(
        timestamp=timestamp,
        position=Position(float(best_point[0]), float(best_point[1])),
        residual=best_cost,
        method_tag=method_tag,
        iterations=best_iterations,
    )
