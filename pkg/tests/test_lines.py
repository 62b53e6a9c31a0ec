import numpy as np
import pytest

from adiosc.abd import factorize
from adiosc.lines import (HeatStep, NeumannInterpolation, ValueInterpolation,
                          assemble, interpolation_nodes,
                          second_derivative_at_gauss)
from adiosc.mesh import Partition1D, SplineSpace


def space_on(a, b, n, r):
    return SplineSpace(Partition1D.uniform(a, b, n), r)


def fit_values(space, func):
    kind = ValueInterpolation()
    nodes = interpolation_nodes(space, kind)
    return factorize(assemble(space, kind)).solve(func(nodes))


def fit_values_neumann(space, func):
    kind = NeumannInterpolation()
    rhs = np.zeros(space.dim)
    rhs[1:-1] = func(interpolation_nodes(space, kind))
    return factorize(assemble(space, kind)).solve(rhs)


class TestAssemble:
    def test_heat_sigma_zero_degenerates(self):
        space = space_on(0, 1, 4, 4)
        heat = assemble(space, HeatStep(0.0))
        interp = assemble(space, NeumannInterpolation())
        np.testing.assert_array_equal(heat.blocks, interp.blocks)
        np.testing.assert_array_equal(heat.top, interp.top)
        np.testing.assert_array_equal(heat.bottom, interp.bottom)

    def test_cubic_reproduced_single_cell(self):
        space = space_on(0, 1, 1, 3)
        coef = fit_values(space, lambda x: x ** 3)
        xs = np.linspace(0, 1, 10)
        vals = space.eval_matrix(xs, 0) @ coef
        assert np.abs(vals - xs ** 3).max() <= 1e-12

    def test_heat_apply_matches_analytic(self):
        # (I - sigma d2/dx2) applied to the interpolant of cos(2 pi x);
        # the interpolant's curvature error at the Gauss points scales
        # with h^2, and sigma = h^2/2 makes the total O(h^4)
        for n, tol in ((10, 2e-3), (20, 1.5e-4)):
            space = space_on(0, 1, n, 3)
            coef = fit_values(space, lambda x: np.cos(2 * np.pi * x))
            sigma = 0.5 / n ** 2
            out = assemble(space, HeatStep(sigma)).matmat(coef)
            g = space.collocation.points
            ref = np.cos(2 * np.pi * g) * (1.0 + sigma * (2 * np.pi) ** 2)
            assert np.abs(out[1:-1] - ref).max() <= tol

    def test_structurally_abd(self):
        for kind in (ValueInterpolation(), NeumannInterpolation(), HeatStep(0.3)):
            space = space_on(-1, 1, 5, 5)
            A = assemble(space, kind)
            assert A.order == space.dim
            assert A.blocks.shape == (5, 4, 6)

    def test_boundary_rows_are_unit_rows(self):
        space = space_on(0, 1, 3, 4)
        val = assemble(space, ValueInterpolation())
        assert val.top[0] == 1.0 and not val.top[1:].any()
        assert val.bottom[-2] == 1.0
        der = assemble(space, NeumannInterpolation())
        assert der.top[1] == 1.0 and abs(der.top[0]) == 0.0
        assert der.bottom[-1] == 1.0

    def test_sigma_validation(self):
        with pytest.raises(ValueError):
            HeatStep(-1.0)
        with pytest.raises(ValueError):
            HeatStep(float("nan"))


class TestInterpolationNodes:
    def test_value_kind_counts(self):
        space = space_on(0, 1, 2, 3)
        nodes = interpolation_nodes(space, ValueInterpolation())
        assert nodes.size == 6
        assert nodes[0] == 0.0 and nodes[-1] == 1.0

    def test_derivative_kind_counts(self):
        space = space_on(0, 1, 3, 4)
        nodes = interpolation_nodes(space, NeumannInterpolation())
        assert nodes.size == 9
        space = space_on(0, 1, 10, 5)
        assert interpolation_nodes(space, ValueInterpolation()).size == 42


class TestSecondDerivative:
    def test_constant_gives_zero(self):
        space = space_on(0, 1, 5, 4)
        coef = fit_values(space, lambda x: np.ones_like(x))
        np.testing.assert_allclose(
            second_derivative_at_gauss(space, coef), 0.0, atol=1e-12)

    def test_quadratic(self):
        space = space_on(0, 1, 6, 3)
        coef = fit_values(space, lambda x: x ** 2)
        np.testing.assert_allclose(
            second_derivative_at_gauss(space, coef), 2.0, atol=1e-11)

    def test_cosine_accuracy(self):
        # cos(pi y) has zero end slopes, matching the zero-slope rows
        space = space_on(0, 1, 20, 3)
        coef = fit_values_neumann(space, lambda y: np.cos(np.pi * y))
        d2 = second_derivative_at_gauss(space, coef)
        ref = -np.pi ** 2 * np.cos(np.pi * space.collocation.points)
        assert np.abs(d2 - ref).max() <= 1e-3

    def test_dimension_check(self):
        space = space_on(0, 1, 4, 3)
        with pytest.raises(ValueError):
            second_derivative_at_gauss(space, np.zeros(space.dim + 1))


class TestConsistency:
    @pytest.mark.parametrize("r", [3, 4, 5])
    def test_heat_solve_recovers_member(self, r):
        # v in the space with zero end slopes: feeding v - sigma v'' at
        # the Gauss points back through the heat solve returns v
        rng = np.random.default_rng(20 + r)
        space = space_on(0, 1, 5, r)
        v = rng.standard_normal(space.dim)
        v[1] = 0.0
        v[-1] = 0.0      # slope dofs at both ends
        sigma = 0.037
        vals = space.colloc_eval(0) @ v - sigma * (space.colloc_eval(2) @ v)
        rhs = np.zeros(space.dim)
        rhs[1:-1] = vals
        rec = factorize(assemble(space, HeatStep(sigma))).solve(rhs)
        assert np.abs(rec - v).max() <= 1e-10 * max(1.0, np.abs(v).max())

    def test_value_interpolation_reproduces_nodal_data(self):
        space = space_on(0, 1, 7, 4)
        g = lambda x: np.sin(3 * x) + 0.5 * x
        coef = fit_values(space, g)
        nodes = interpolation_nodes(space, ValueInterpolation())
        vals = space.eval_matrix(nodes, 0) @ coef
        assert np.abs(vals - g(nodes)).max() <= 1e-12
