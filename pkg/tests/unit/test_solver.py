"""
Tests unitaires du solveur BCOS : paramètres theta, pas terminal, récurrence
rétrograde et évaluation de la solution.
"""

import numpy as np
import pytest
import sympy as sp

from bcos.core.cosine import cosine_integral_coefficients, dct2, eval_deriv1, make_grid
from bcos.core.solver import eval_solution, solve, terminal_fields
from bcos.core.transition import SchemeKind, build_table, cos_expectation
from bcos.errors import (
    IndexOutOfRangeError,
    InvalidParamsError,
    TerminalFixedPointError,
    TierUnavailableError,
)
from bcos.metrics.convergence import fit_slope, weak_errors_t0
from bcos.models.problem import STATE_SYMBOLS, DerivativeTier, build_problem
from bcos.models.study import THETA_PRESETS, ThetaParams
from bcos.problems.examples import EXAMPLE1_RANGE

t, x, y, z = STATE_SYMBOLS


def heat_reference(T, t_value, x_value):
    """u et u_x de E[exp(-(x + W_{T-t})²)]"""
    tau = 1 + 2 * (T - t_value)
    u = np.exp(-(x_value**2) / tau) / np.sqrt(tau)
    return u, -2 * x_value / tau * u


def backward_euler_reference(problem, grid, N, scheme):
    """
    Récurrence θ = (1, 1, 1, 0) écrite nœud par nœud :
    z_i = E[y_{n+1}ΔW]/Δt puis y_i = Δt·f(y_i, z_i) + E[y_{n+1}] par point fixe.
    """
    dt = problem.T / N
    nodes = grid.nodes
    field, _ = terminal_fields(problem, grid)
    fields = [field]
    for n in range(N - 1, -1, -1):
        t_n = n * dt
        table = build_table(scheme, problem, field, t_n, dt, grid)
        y_coeffs = field.y_series.coeffs
        z = np.array([cos_expectation(table, y_coeffs, i, 1) / dt for i in range(grid.K)])
        g = np.array([cos_expectation(table, y_coeffs, i, 0) for i in range(grid.K)])
        y = g.copy()
        for _ in range(200):
            y_new = dt * problem.driver(t_n, nodes, y, z) + g
            done = np.max(np.abs(y_new - y)) <= 1e-15
            y = y_new
            if done:
                break
        field = type(field)(t=t_n, y_series=dct2(y, grid), z_series=dct2(z, grid))
        fields.append(field)
    return fields[::-1]


@pytest.mark.unit
@pytest.mark.solver
class TestThetaParams:
    """Tests des paramètres du theta-schéma"""

    @pytest.mark.parametrize(
        "values",
        [
            (0.5, 0.5, 0.5, 0.6),
            (0.5, 0.5, 0.0, 0.0),
            (1.5, 0.5, 0.5, 0.0),
            (0.5, -0.1, 0.5, 0.0),
            (0.5, 0.5, 0.5, float("nan")),
        ],
    )
    def test_invalid_values(self, values):
        """Test: |θ₄| > θ₃, θ₃ = 0 ou θ hors de [0, 1] → InvalidParamsError"""
        with pytest.raises(InvalidParamsError):
            ThetaParams(*values)

    def test_parse(self):
        """Test: 4 réels ou nom de preset"""
        assert ThetaParams.parse("0.5, 0.5, 0.5, -0.5") == THETA_PRESETS["second-order"]
        assert ThetaParams.parse("Backward-Euler") == ThetaParams(1.0, 1.0, 1.0, 0.0)
        with pytest.raises(InvalidParamsError):
            ThetaParams.parse("0.5,0.5")
        with pytest.raises(InvalidParamsError):
            ThetaParams.parse("a,b,c,d")

    def test_families(self):
        assert ThetaParams.crisan_manolarakis(0.3).as_tuple() == pytest.approx((0.5, 0.3, 0.7, 0.0))
        assert ThetaParams.theta_family(0.5) == THETA_PRESETS["second-order"]
        assert ThetaParams.theta_family(1.0) == THETA_PRESETS["backward-euler"]


@pytest.mark.unit
@pytest.mark.solver
class TestTerminalStep:
    """Tests du pas terminal z_N = g'·σ(T, x, g, z_N)"""

    def test_fixed_point_when_sigma_depends_on_z(self, example3_problem):
        """Test: le point fixe terminal est résolu aux nœuds"""
        grid = make_grid(-5.0, 5.0, 64)
        nodes = grid.nodes

        field, driver = terminal_fields(example3_problem, grid)

        y = field.y_series.at_nodes()[0]
        z_nodes = field.z_series.at_nodes()[0]
        expected = example3_problem.terminal_deriv(nodes) * example3_problem.sigma(
            1.0, nodes, y, z_nodes
        )
        np.testing.assert_allclose(y, -2.0 * nodes, atol=1e-12)
        np.testing.assert_allclose(z_nodes, expected, atol=1e-11)
        assert driver.grid == grid

    def test_quadrature_series_at_terminal_time(self, small_grid):
        """Test: σ sans z → séries en T par Gauss-Legendre, proches de la DCT"""
        # Arrange
        problem = build_problem(
            "p",
            1.0,
            0.0,
            mu=0,
            sigma=1 + sp.Rational(1, 10) * sp.sin(x),
            driver=-y / 2 + z * sp.exp(-(x**2)),
            terminal=sp.exp(-(x**2)),
        )

        def f_T(points):
            g = np.exp(-(points**2))
            z_T = -2 * points * g * (1 + 0.1 * np.sin(points))
            return -g / 2 + z_T * g

        # Act
        field, driver = terminal_fields(problem, small_grid, quad_points=1024)
        default_field, default_driver = terminal_fields(problem, small_grid)

        # Assert
        expected = cosine_integral_coefficients(f_T, small_grid, 1024)
        np.testing.assert_allclose(driver.coeffs, expected.coeffs, atol=1e-13)
        np.testing.assert_allclose(driver.coeffs, default_driver.coeffs, atol=1e-10)
        np.testing.assert_allclose(
            field.z_series.coeffs, default_field.z_series.coeffs, atol=1e-10
        )

    def test_quadrature_needs_closed_form_z(self, example3_problem):
        """Test: σ dépend de z → le point fixe aux nœuds reste utilisé"""
        grid = make_grid(-5.0, 5.0, 64)

        field, driver = terminal_fields(example3_problem, grid, quad_points=512)
        default_field, default_driver = terminal_fields(example3_problem, grid)

        np.testing.assert_array_equal(field.z_series.coeffs, default_field.z_series.coeffs)
        np.testing.assert_array_equal(driver.coeffs, default_driver.coeffs)

    def test_divergent_fixed_point(self):
        """Test: |g'·∂zσ| >= 1 → TerminalFixedPointError"""
        problem = build_problem("p", 1.0, 0.0, mu=0, sigma=2 * z + 1, driver=0, terminal=x)

        with pytest.raises(TerminalFixedPointError):
            terminal_fields(problem, make_grid(-1.0, 1.0, 8), max_iter=50)


@pytest.mark.unit
@pytest.mark.solver
class TestSolve:
    """Tests de la récurrence rétrograde complète"""

    @pytest.mark.parametrize("scheme", list(SchemeKind))
    @pytest.mark.parametrize("theta_name", ["second-order", "backward-euler"])
    def test_exact_on_heat_equation(self, heat_problem, small_grid, scheme, theta_name):
        """Test: μ = 0, σ = 1, f = 0 → seule l'erreur de troncature subsiste"""
        # Arrange
        theta = THETA_PRESETS[theta_name]

        # Act
        solution = solve(heat_problem, small_grid, 10, theta, scheme)

        # Assert
        for n in (0, 5):
            u, v = heat_reference(1.0, solution.times[n], 0.5)
            y_n, z_n = eval_solution(solution, n, 0.5)
            assert y_n == pytest.approx(u, abs=1e-9)
            assert z_n == pytest.approx(v, abs=1e-9)
        assert solution.picard_max == 0
        assert solution.all_converged

    def test_matches_nodewise_backward_euler(self, example2_problem):
        """Test: θ = (1, 1, 1, 0) identique à une récurrence écrite nœud par nœud"""
        grid = make_grid(-3.0, 5.0, 64)

        solution = solve(
            example2_problem, grid, 4, THETA_PRESETS["backward-euler"], SchemeKind.EULER
        )
        expected = backward_euler_reference(example2_problem, grid, 4, SchemeKind.EULER)

        for n in range(5):
            np.testing.assert_allclose(
                solution.fields[n].y_series.coeffs, expected[n].y_series.coeffs, atol=1e-10
            )
            np.testing.assert_allclose(
                solution.fields[n].z_series.coeffs, expected[n].z_series.coeffs, atol=1e-10
            )

    def test_matches_nodewise_backward_euler_example1(self, example1_problem):
        """Test: même comparaison sur l'exemple 1 (driver non linéaire, [a, b] des cumulants)"""
        grid = make_grid(*EXAMPLE1_RANGE, 64)

        solution = solve(
            example1_problem, grid, 10, THETA_PRESETS["backward-euler"], SchemeKind.EULER
        )
        expected = backward_euler_reference(example1_problem, grid, 10, SchemeKind.EULER)

        assert solution.all_converged
        for n in range(11):
            np.testing.assert_allclose(
                solution.fields[n].y_series.coeffs, expected[n].y_series.coeffs, atol=1e-10
            )
            np.testing.assert_allclose(
                solution.fields[n].z_series.coeffs, expected[n].z_series.coeffs, atol=1e-10
            )

    @pytest.mark.parametrize("scheme", list(SchemeKind))
    def test_crisan_manolarakis_y_ignores_theta2(self, scheme):
        """Test: μ, σ, f sans z → y identique pour θ₂ = 0.3 et θ₂ = 0.7"""
        # Arrange
        problem = build_problem(
            "zfree",
            1.0,
            0.3,
            mu=y / 10,
            sigma=sp.Rational(3, 10) + sp.sin(y) / 20,
            driver=-y / 2 + sp.cos(x) / 5,
            terminal=sp.exp(-(x**2)),
        )
        grid = make_grid(-6.0, 6.0, 64)

        # Act
        first, second = (
            solve(problem, grid, 8, ThetaParams.crisan_manolarakis(theta2), scheme)
            for theta2 in (0.3, 0.7)
        )

        # Assert
        for n in range(9):
            np.testing.assert_allclose(
                first.fields[n].y_series.coeffs, second.fields[n].y_series.coeffs, atol=1e-13
            )
        assert eval_solution(first, 0, 0.3)[0] == pytest.approx(
            eval_solution(second, 0, 0.3)[0], abs=1e-13
        )

    def test_example3_recovers_riccati_slope(self, example3_problem):
        """Test: y(t₀, ·) de BCOS est affine de pente a(0) (oracle Riccati)"""
        # Arrange
        grid = make_grid(-5.0, 5.0, 256)
        a0, b0 = (float(c) for c in example3_problem.analytic_fields.coefficients(0.0))
        points = np.linspace(-1.0, 2.0, 13)

        # Act
        solution = solve(
            example3_problem, grid, 20, THETA_PRESETS["second-order"], SchemeKind.MILSTEIN
        )
        y0, _ = eval_solution(solution, 0, points)

        # Assert
        slope, intercept = np.polyfit(points, y0, 1)
        assert slope == pytest.approx(a0, rel=1e-2)
        assert intercept == pytest.approx(b0, abs=1e-2)
        assert np.max(np.abs(y0 - (slope * points + intercept))) < 2e-3
        assert eval_deriv1(solution.fields[0].y_series, 1.0) == pytest.approx(a0, rel=1e-2)

    def test_terminal_quadrature_keeps_heat_solution(self, heat_problem, small_grid):
        solution = solve(
            heat_problem,
            small_grid,
            10,
            THETA_PRESETS["second-order"],
            SchemeKind.EULER,
            terminal_quad_points=1024,
        )

        u, v = heat_reference(1.0, 0.0, 0.5)
        y0, z0 = eval_solution(solution, 0, 0.5)
        assert y0 == pytest.approx(u, abs=1e-9)
        assert z0 == pytest.approx(v, abs=1e-9)

    def test_picard_counts_example1(self, example1_problem):
        """Test: au plus 10 itérations de Picard par pas sur l'exemple 1"""
        grid = make_grid(*EXAMPLE1_RANGE, 512)

        solution = solve(
            example1_problem, grid, 100, ThetaParams(0.5, 0.5, 0.5, 0.0), SchemeKind.EULER
        )

        assert solution.all_converged
        assert solution.picard_max <= 10

    def test_nonconvergence_is_flagged(self, example2_problem):
        """Test: Picard non convergé → signalé dans la solution, pas d'exception"""
        grid = make_grid(-3.0, 5.0, 64)

        solution = solve(
            example2_problem, grid, 4, THETA_PRESETS["second-order"], SchemeKind.EULER, max_picard=1
        )

        assert not solution.all_converged
        assert solution.picard_max == 1

    def test_explicit_y_needs_no_picard(self, example2_problem):
        grid = make_grid(-3.0, 5.0, 64)

        solution = solve(
            example2_problem, grid, 4, ThetaParams(0.0, 0.5, 0.5, 0.0), SchemeKind.EULER
        )

        assert solution.picard_max == 0
        assert solution.all_converged

    def test_weak_order_backward_euler(self, example2_problem):
        """Test: erreur en t0 d'ordre 1 pour θ = (1, 1, 1, 0) et Euler"""
        grid = make_grid(-3.0, 5.0, 256)
        u0 = example2_problem.analytic_u(0.0, example2_problem.x0)
        v0 = example2_problem.analytic_v(0.0, example2_problem.x0)

        errors = [
            weak_errors_t0(
                solve(example2_problem, grid, N, THETA_PRESETS["backward-euler"], SchemeKind.EULER),
                u0,
                v0,
            ).total
            for N in (5, 10, 20, 40)
        ]

        assert all(later < earlier for earlier, later in zip(errors, errors[1:]))
        assert fit_slope(zip((5, 10, 20, 40), errors)) == pytest.approx(1.0, abs=0.3)

    def test_solution_layout(self, heat_problem, small_grid):
        solution = solve(heat_problem, small_grid, 4, THETA_PRESETS["second-order"], "milstein")

        assert solution.N == 4
        assert solution.dt == pytest.approx(0.25)
        assert len(solution.fields) == 5
        assert len(solution.driver_series) == 5
        np.testing.assert_allclose(solution.times, [0.0, 0.25, 0.5, 0.75, 1.0])
        assert solution.x0 == 0.5
        assert solution.scheme is SchemeKind.MILSTEIN

    def test_tier_mismatch(self, small_grid):
        """Test: Milstein sur un problème sans dérivées → TierUnavailableError"""
        problem = build_problem("p", 1.0, 0.0, 0, 1, 0, sp.sin(x), tier=DerivativeTier.NONE)

        with pytest.raises(TierUnavailableError):
            solve(problem, small_grid, 2, THETA_PRESETS["second-order"], SchemeKind.MILSTEIN)

    @pytest.mark.parametrize("N", [0, -2, 1.5])
    def test_invalid_step_count(self, heat_problem, small_grid, N):
        with pytest.raises(InvalidParamsError):
            solve(heat_problem, small_grid, N, THETA_PRESETS["second-order"], SchemeKind.EULER)


@pytest.mark.unit
@pytest.mark.solver
class TestEvalSolution:
    """Tests de eval_solution"""

    @pytest.fixture
    def solution(self, heat_problem, small_grid):
        return solve(heat_problem, small_grid, 2, THETA_PRESETS["second-order"], SchemeKind.EULER)

    @pytest.mark.parametrize("n", [-1, 3])
    def test_index_out_of_range(self, solution, n):
        with pytest.raises(IndexOutOfRangeError):
            eval_solution(solution, n, 0.0)

    def test_index_error_is_builtin(self, solution):
        with pytest.raises(IndexError):
            eval_solution(solution, 10, 0.0)

    def test_vector_evaluation_and_clamp(self, solution):
        """Test: évaluation vectorielle, points hors de [a, b] comptés"""
        before = solution.clamp_counter.count

        y, z = eval_solution(solution, 2, np.array([0.0, 11.0, -12.0]))

        assert y.shape == z.shape == (3,)
        assert solution.clamp_counter.count == before + 2
        assert y[0] == pytest.approx(1.0, abs=1e-12)
