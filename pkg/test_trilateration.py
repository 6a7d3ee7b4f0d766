#!/usr/bin/env python3
"""
Tests for the trilateration solver.

Inconsistent distances are checked against brute-force residual grids: the
solver must never do worse than the best grid point. The slow oracle scans the
whole region where a better point could lie at 1 mm, block by block.
"""
import math

import numpy as np
import pytest

from core import Position
from errors import GeometryError, InputError
from trilateration import (MAX_ITERATIONS, circle_residuals, residual_grid, residual_sum,
                           trilaterate)

TRIANGLE = [Position(0.0, 0.0), Position(4.0, 0.0), Position(0.0, 3.0)]


def _anchors(points, distances):
    return list(zip(points, distances))


def _true_distances(points, target):
    return [math.hypot(target.x - p.x, target.y - p.y) for p in points]


def _centers(points):
    return np.array([[p.x, p.y] for p in points])


def _grid_minimum(centers, distances, x_range, y_range, step):
    """Smallest residual sum on a regular grid, scanned row block by row block."""
    xs = np.arange(x_range[0], x_range[1] + step / 2, step)
    ys = np.arange(y_range[0], y_range[1] + step / 2, step)
    best, best_point = math.inf, None
    for start in range(0, len(ys), 250):
        block = ys[start:start + 250]
        grid = residual_grid(xs, block, centers, distances)
        iy, ix = np.unravel_index(int(np.argmin(grid)), grid.shape)
        if grid[iy, ix] < best:
            best, best_point = float(grid[iy, ix]), (xs[ix], block[iy])
    return best, best_point


def _sublevel_box(centers, distances, level):
    """
    Box holding every point whose residual sum is at most `level`.

    Each squared residual is bounded by the sum, so |p - c_i|^2 <= d_i^2 + sqrt(level)
    for every anchor; the box is the intersection of those discs' bounding boxes.
    """
    radii = np.sqrt(distances ** 2 + math.sqrt(level))
    lo = np.max(centers - radii[:, None], axis=0)
    hi = np.min(centers + radii[:, None], axis=0)
    return lo, hi


def _random_instance(rng):
    """Three anchors spanning at least 0.5 m^2 and distances off by about 30 %."""
    while True:
        points = [Position(*rng.uniform(0.0, 5.0, size=2)) for _ in range(3)]
        centers = _centers(points)
        u, v = centers[1] - centers[0], centers[2] - centers[0]
        if abs(u[0] * v[1] - u[1] * v[0]) >= 0.5:
            break
    target = Position(*rng.uniform(0.0, 5.0, size=2))
    noise = 1.0 + 0.3 * rng.standard_normal(3)
    distances = np.maximum(np.array(_true_distances(points, target)) * noise, 0.05)
    return points, distances


def test_exact_distances_recover_the_point():
    anchors = _anchors(TRIANGLE, [math.sqrt(2), math.sqrt(10), math.sqrt(5)])
    estimate = trilaterate(anchors, timestamp=42, method_tag="raw")
    assert estimate.position.x == pytest.approx(1.0, abs=1e-9)
    assert estimate.position.y == pytest.approx(1.0, abs=1e-9)
    assert estimate.residual <= 1e-9
    assert estimate.timestamp == 42 and estimate.method_tag == "raw"


def test_exactness_over_random_targets():
    rng = np.random.default_rng(7)
    for _ in range(200):
        target = Position(*rng.uniform([0.0, 0.0], [4.0, 3.0]))
        estimate = trilaterate(_anchors(TRIANGLE, _true_distances(TRIANGLE, target)))
        assert math.hypot(estimate.position.x - target.x, estimate.position.y - target.y) < 1e-6


def test_inconsistent_distances_match_millimetre_grid():
    """Every circle of radius 0.1 m misses the others."""
    centers = _centers(TRIANGLE)
    distances = np.array([0.1, 0.1, 0.1])
    estimate = trilaterate(_anchors(TRIANGLE, distances))
    grid_best, _ = _grid_minimum(centers, distances, (-1.0, 5.0), (-1.0, 4.0), 0.001)
    assert estimate.residual <= grid_best + 1e-6
    assert estimate.residual == pytest.approx(
        residual_sum(np.array(estimate.position.as_tuple()), centers, distances))


def test_inconsistent_instances_converge_to_a_minimum():
    """Large residuals: stationary point with a positive semi-definite Hessian, inside the cap."""
    rng = np.random.default_rng(2024)
    cases = [_random_instance(rng) for _ in range(30)]
    target = Position(1.0, 1.0)
    for scale in (0.5, 1.6):
        cases.append((TRIANGLE, np.array(_true_distances(TRIANGLE, target)) * scale))

    for points, distances in cases:
        centers = _centers(points)
        estimate = trilaterate(_anchors(points, distances))
        assert estimate.iterations < MAX_ITERATIONS

        p = np.array(estimate.position.as_tuple())
        r = circle_residuals(p, centers, distances)
        jac = 2.0 * (p - centers)
        gradient = jac.T @ r
        assert np.linalg.norm(gradient) <= 1e-6 * max(1.0, np.linalg.norm(jac) * np.linalg.norm(r))
        hessian = jac.T @ jac + 2.0 * r.sum() * np.eye(2)
        assert np.linalg.eigvalsh(hessian)[0] >= -1e-9 * max(1.0, np.abs(hessian).max())


@pytest.mark.slow
def test_inconsistent_instances_against_grid_oracle():
    """
    Every 1 mm grid point that could beat the solver is scanned: points outside
    the sublevel box have a larger residual sum by construction.
    """
    rng = np.random.default_rng(2024)
    for _ in range(100):
        points, distances = _random_instance(rng)
        centers = _centers(points)

        estimate = trilaterate(_anchors(points, distances))

        lo, hi = _sublevel_box(centers, distances, estimate.residual)
        assert np.all(lo <= hi)
        grid_best, _ = _grid_minimum(centers, distances, (lo[0], hi[0]), (lo[1], hi[1]), 0.001)
        assert estimate.residual <= grid_best + 1e-6


def test_rigid_motion_equivariance():
    rng = np.random.default_rng(11)
    target = Position(1.3, 0.8)
    distances = np.array(_true_distances(TRIANGLE, target)) * np.array([1.05, 0.97, 1.02])
    base = trilaterate(_anchors(TRIANGLE, distances)).position

    for _ in range(10):
        angle = rng.uniform(0.0, 2 * math.pi)
        shift = rng.uniform(-10.0, 10.0, size=2)
        rotation = np.array([[math.cos(angle), -math.sin(angle)], [math.sin(angle), math.cos(angle)]])

        def move(p):
            return Position(*(rotation @ np.array(p.as_tuple()) + shift))

        moved = trilaterate(_anchors([move(p) for p in TRIANGLE], distances)).position
        expected = move(base)
        assert math.hypot(moved.x - expected.x, moved.y - expected.y) < 1e-6


def test_more_than_three_anchors():
    points = TRIANGLE + [Position(4.0, 3.0)]
    target = Position(2.2, 1.1)
    estimate = trilaterate(_anchors(points, _true_distances(points, target)))
    assert estimate.position.x == pytest.approx(2.2, abs=1e-6)
    assert estimate.position.y == pytest.approx(1.1, abs=1e-6)


def test_collinear_anchors_raise_geometry_error():
    points = [Position(0.0, 0.0), Position(1.0, 0.0), Position(2.0, 0.0)]
    with pytest.raises(GeometryError):
        trilaterate(_anchors(points, [1.0, 1.0, 1.0]))


def test_invalid_anchor_input():
    with pytest.raises(InputError):
        trilaterate(_anchors(TRIANGLE[:2], [1.0, 1.0]))
    with pytest.raises(InputError):
        trilaterate(_anchors(TRIANGLE, [1.0, 0.0, 1.0]))
    with pytest.raises(InputError):
        trilaterate(_anchors(TRIANGLE, [1.0, math.inf, 1.0]))
