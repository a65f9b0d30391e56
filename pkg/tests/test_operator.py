"""Tests for the quadrature grids, Nystrom matrix, and spectral machinery."""

import math

import numpy as np
import pytest

import rbkernel.operator as op_module
from rbkernel import (
    ConvergenceError,
    NystromOperator,
    QuadratureGrid,
    apply_operator,
    build_grid,
    eval_regular,
    min_singular_value,
    nystrom_matrix,
    spectral_grid,
    sweep,
)

# (K u_2)(0.5) at r = 1 equals u_2(0.5) + p(1) u_0(0.5); 40-digit oracle value
J_R1_S_HALF = -0.062715474113685405

# -g(0.5, 0.5) * 1.0 / 0.25 = 6 sin(0.5) (-cos 0.5) * 4 = -12 sin(1)
A00_SINGLE_NODE = -10.097651817694758


def u2(t):
    return eval_regular(2, t).value


class TestBuildGrid:
    def test_single_panel_two_nodes(self):
        grid = build_grid(1.0, panels_count=1, nodes_per_panel=2)
        offset = 0.5 / math.sqrt(3.0)
        assert grid.nodes == pytest.approx([0.5 - offset, 0.5 + offset], rel=1e-15)
        assert grid.weights == pytest.approx([0.5, 0.5], rel=1e-15)

    def test_weights_sum_to_radius(self):
        grid = build_grid(1.0, panels_count=4, nodes_per_panel=8)
        assert abs(float(np.sum(grid.weights)) - 1.0) <= 1e-14

    def test_split_point_becomes_boundary(self):
        grid = build_grid(2.44, panels_count=8, nodes_per_panel=12, split_at=1.0)
        assert any(abs(b - 1.0) <= 1e-14 for b in grid.panel_bounds)

    def test_grading_clusters_toward_origin(self):
        grid = build_grid(1.0, panels_count=4, nodes_per_panel=4, grading=2.0)
        widths = np.diff(grid.panel_bounds)
        assert np.all(np.diff(widths) > 0)  # panels widen away from 0

    def test_errors(self):
        with pytest.raises(ValueError):
            build_grid(0.0)
        with pytest.raises(ValueError):
            build_grid(-2.0)
        with pytest.raises(ValueError):
            build_grid(1.0, split_at=1.5)
        with pytest.raises(ValueError):
            build_grid(1.0, panels_count=0)
        with pytest.raises(ValueError):
            build_grid(1.0, nodes_per_panel=1)
        with pytest.raises(ValueError):
            build_grid(1.0, grading=0.5)

    def test_manual_grid_validation(self):
        with pytest.raises(ValueError, match="sum"):
            QuadratureGrid(
                r=1.0,
                panel_bounds=(0.0, 1.0),
                nodes=np.array([0.5]),
                weights=np.array([0.9]),
                grading=1.0,
            )
        with pytest.raises(ValueError, match="positive"):
            QuadratureGrid(
                r=1.0,
                panel_bounds=(0.0, 1.0),
                nodes=np.array([0.3, 0.7]),
                weights=np.array([1.5, -0.5]),
                grading=1.0,
            )


class TestNystromMatrix:
    def test_single_node_entry(self, reference_spec):
        grid = QuadratureGrid(
            r=1.0,
            panel_bounds=(0.0, 1.0),
            nodes=np.array([0.5]),
            weights=np.array([1.0]),
            grading=1.0,
        )
        op = nystrom_matrix(reference_spec, grid)
        assert op.matrix[0, 0] == pytest.approx(A00_SINGLE_NODE, rel=1e-13)
        # same number from the defining formula
        direct = 6.0 * math.sin(0.5) * (-math.cos(0.5)) * 1.0 / 0.25
        assert op.matrix[0, 0] == pytest.approx(direct, rel=1e-15)

    def test_entries_finite(self, reference_spec):
        grid = build_grid(2.5, panels_count=6, nodes_per_panel=10)
        op = nystrom_matrix(reference_spec, grid)
        assert np.all(np.isfinite(op.matrix))

    def test_weighted_symmetry(self, reference_spec):
        grid = build_grid(1.7, panels_count=4, nodes_per_panel=6)
        a = nystrom_matrix(reference_spec, grid).matrix
        t = grid.nodes
        w = grid.weights
        lhs = a * (t**2 / w)[None, :]
        assert np.allclose(lhs, lhs.T, rtol=1e-12, atol=1e-14)


class TestApplyOperator:
    def test_identity_value_at_reference_point(self, reference_spec):
        j = apply_operator(reference_spec, 1.0, u2, 0.5)
        assert j == pytest.approx(J_R1_S_HALF, abs=1e-10)

    def test_zero_function_maps_to_zero(self, reference_spec):
        for s in (0.2, 0.7, 1.0):
            assert apply_operator(reference_spec, 1.0, lambda t: 0.0, s) == 0.0

    def test_fixed_point_at_root(self, reference_spec, root_r):
        for s in np.linspace(0.2, root_r, 7):
            s = float(s)
            assert apply_operator(reference_spec, root_r, u2, s) == pytest.approx(
                u2(s), abs=1e-9
            )

    def test_identity_consistency_across_radii(self, reference_spec, root_r):
        # the integration-by-parts identity holds for every radius
        from rbkernel import p_explicit

        for r in (0.5, 1.0, 2.0, root_r, 3.0):
            p_r = p_explicit(r).value
            worst = max(
                abs(
                    apply_operator(reference_spec, r, u2, float(s))
                    - u2(float(s))
                    - p_r * math.sin(float(s))
                )
                for s in np.linspace(r / 20, r, 20)
            )
            assert worst <= 1e-8, r

    def test_panel_doubling_stability(self, reference_spec):
        coarse = apply_operator(reference_spec, 1.0, u2, 0.6, panels=32)
        fine = apply_operator(reference_spec, 1.0, u2, 0.6, panels=64)
        assert abs(fine - coarse) <= 1e-9

    def test_agrees_with_nystrom_and_refines(self, reference_spec):
        gaps = []
        for panels in (8, 16):
            grid = build_grid(1.0, panels_count=panels, nodes_per_panel=12)
            a = nystrom_matrix(reference_spec, grid).matrix
            samples = np.array([u2(t) for t in grid.nodes])
            lhs = a @ samples
            gap = max(
                abs(lhs[i] - apply_operator(reference_spec, 1.0, u2, float(s)))
                for i, s in list(enumerate(grid.nodes))[:: len(grid.nodes) // 12]
            )
            gaps.append(gap)
        assert gaps[0] <= 1e-4  # kink-limited error of the shared-grid matrix
        assert gaps[1] <= 0.5 * gaps[0]

    def test_domain_errors(self, reference_spec):
        with pytest.raises(ValueError):
            apply_operator(reference_spec, 1.0, u2, 0.0)
        with pytest.raises(ValueError):
            apply_operator(reference_spec, 1.0, u2, 1.5)
        with pytest.raises(ValueError):
            apply_operator(reference_spec, -1.0, u2, 0.5)

    def test_nonconvergence_reported(self, reference_spec):
        # a pathological integrand (noise) can never stabilize to 1e-10
        rng = np.random.default_rng(5)
        with pytest.raises(ConvergenceError):
            apply_operator(
                reference_spec, 1.0, lambda t: float(rng.standard_normal()), 0.5
            )


class TestMinSingularValue:
    def test_zero_matrix_limit(self, reference_spec):
        grid = build_grid(1.0, panels_count=2, nodes_per_panel=4)
        op = NystromOperator(grid=grid, matrix=np.zeros((grid.size, grid.size)),
                             spec=reference_spec)
        result = min_singular_value(op)
        assert result.sigma_min == pytest.approx(1.0, abs=1e-14)
        assert np.linalg.norm(result.null_vector) == pytest.approx(1.0, rel=1e-12)

    def test_small_radius_well_conditioned(self, reference_spec):
        grid = build_grid(0.5, panels_count=8, nodes_per_panel=12)
        result = min_singular_value(nystrom_matrix(reference_spec, grid))
        assert result.sigma_min >= 0.5

    def test_certificate_invariant(self, reference_spec):
        grid = build_grid(2.0, panels_count=8, nodes_per_panel=12)
        op = nystrom_matrix(reference_spec, grid)
        result = min_singular_value(op)
        residual = np.linalg.norm(
            (np.eye(grid.size) - op.matrix) @ result.null_vector
        )
        assert residual <= result.sigma_min * (1.0 + 1e-8) + 1e-15

    def test_collapse_at_root(self, reference_spec, root_r):
        grid = spectral_grid(root_r)
        result = min_singular_value(nystrom_matrix(reference_spec, grid))
        assert result.sigma_min <= 1e-6
        # the certificate vector is u_2 sampled at the nodes, up to sign
        samples = np.array([u2(t) for t in grid.nodes])
        samples /= np.linalg.norm(samples)
        null_vec = result.null_vector
        if float(null_vec @ samples) < 0.0:
            null_vec = -null_vec
        assert float(np.max(np.abs(null_vec - samples))) <= 1e-4


class TestSweep:
    def test_no_collapse_away_from_root(self, reference_spec):
        report = sweep(reference_spec, 0.5, 1.5, 5)
        assert all(sigma > 0.1 for sigma in report.column("sigma_min"))

    def test_two_steps_sample_endpoints(self, reference_spec):
        report = sweep(reference_spec, 1.0, 2.0, 2)
        assert report.column("r") == [1.0, 2.0]
        assert len(report.rows) == 2

    def test_minimum_localizes_the_root(self, reference_spec, root_r):
        report = sweep(reference_spec, 2.0, 3.0, 101)
        rs = report.column("r")
        sigmas = report.column("sigma_min")
        r_at_min = rs[int(np.argmin(sigmas))]
        assert abs(r_at_min - root_r) <= 0.02

    def test_localization_tightens_under_refinement(self, reference_spec, root_r):
        report = sweep(
            reference_spec, 2.3, 2.6, 61, panels_count=16, nodes_per_panel=12
        )
        rs = report.column("r")
        sigmas = report.column("sigma_min")
        r_at_min = rs[int(np.argmin(sigmas))]
        assert abs(r_at_min - root_r) <= 0.005

    def test_refinement_deltas_recorded(self, reference_spec):
        report = sweep(reference_spec, 0.8, 1.2, 3, refine=True)
        deltas = report.column("refinement_delta")
        assert all(d is not None and d >= 0.0 for d in deltas)
        plain = sweep(reference_spec, 0.8, 1.2, 3)
        assert all(d is None for d in plain.column("refinement_delta"))

    def test_per_point_failures_recorded(self, reference_spec, monkeypatch):
        real = op_module.nystrom_matrix

        def flaky(spec, grid):
            if abs(grid.r - 1.0) < 1e-12:
                raise ValueError("synthetic failure")
            return real(spec, grid)

        monkeypatch.setattr(op_module, "nystrom_matrix", flaky)
        report = op_module.sweep(reference_spec, 0.5, 1.5, 3)
        assert len(report.rows) == 2
        assert len(report.failures) == 1
        assert report.failures[0][0] == 1.0
        assert "synthetic" in report.failures[0][1]

    def test_argument_validation(self, reference_spec):
        with pytest.raises(ValueError):
            sweep(reference_spec, 2.0, 1.0, 5)
        with pytest.raises(ValueError):
            sweep(reference_spec, 1.0, 2.0, 1)
