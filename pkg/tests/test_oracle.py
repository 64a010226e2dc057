import ast
import math
from pathlib import Path

import pytest

from revshare.bargaining import DISAGREEMENT_RETURNED, BargainingProblem, nbs_closed_form
from revshare.model import (
    NEUTRAL,
    NONNEUTRAL,
    Contract,
    EffortProfile,
    MarketParams,
    NoiseModel,
    best_effort,
    cara_isp_utility,
    expected_utilities,
)
from revshare.oracle import (
    grid_best_response,
    grid_nbs,
    mc_cara,
    verify_equilibrium,
)

E = math.e


def cp_utility(params, shares, regime, index):
    contract = Contract(tuple(shares))
    efforts = best_effort(params, contract, regime)
    return expected_utilities(params, contract, efforts).cp[index]


class TestGridBestResponse:
    def test_active_cp(self):
        params = MarketParams.of((2.0 * E, 2.0 * E), 1.0)
        response = grid_best_response(params, NONNEUTRAL, 0, [0.3], 1e-4)
        assert abs(response - 0.5) <= 1e-4

    def test_inactive_cp_prefers_zero(self):
        params = MarketParams.of((0.5, 2.0), 1.0)
        assert grid_best_response(params, NONNEUTRAL, 0, [0.5], 1e-4) == 0.0

    def test_neutral_interior_component(self):
        params = MarketParams.of((4.0, 2.0), 1.0)
        response = grid_best_response(params, NEUTRAL, 0, [0.2868], 1e-4)
        assert abs(response - 0.6435) <= 2e-4

    def test_refinement_never_hurts(self):
        params = MarketParams.of((4.0, 2.0), 1.0)
        for step in (4e-3, 2e-3, 1e-3):
            coarse = grid_best_response(params, NONNEUTRAL, 0, [0.5], step)
            fine = grid_best_response(params, NONNEUTRAL, 0, [0.5], step / 2.0)
            u_coarse = cp_utility(params, [coarse, 0.5], NONNEUTRAL, 0)
            u_fine = cp_utility(params, [fine, 0.5], NONNEUTRAL, 0)
            assert u_fine >= u_coarse - 1e-15

    def test_step_validation(self):
        params = MarketParams.of((4.0, 2.0), 1.0)
        with pytest.raises(ValueError):
            grid_best_response(params, NONNEUTRAL, 0, [0.5], 0.5)
        with pytest.raises(ValueError):
            grid_best_response(params, NONNEUTRAL, 2, [0.5], 1e-3)
        with pytest.raises(ValueError):
            grid_best_response(params, NONNEUTRAL, 0, [0.5, 0.5], 1e-3)


class TestVerifyEquilibrium:
    def test_inactive_market_zero_contract(self):
        params = MarketParams.of((0.5, 0.9), 1.0)
        report = verify_equilibrium(params, NONNEUTRAL, Contract((0.0, 0.0)), 1e-3, 1e-9)
        assert report.passed
        assert report.max_unilateral_gain <= 0.0

    def test_symmetric_equilibrium_certified(self):
        params = MarketParams.of((2.0 * E, 2.0 * E), 1.0)
        report = verify_equilibrium(params, NONNEUTRAL, Contract((0.5, 0.5)), 1e-4, 1e-6)
        assert report.passed

    def test_perturbed_contract_rejected(self):
        params = MarketParams.of((2.0 * E, 2.0 * E), 1.0)
        report = verify_equilibrium(params, NONNEUTRAL, Contract((0.6, 0.5)), 1e-4, 1e-6)
        assert not report.passed
        assert report.max_unilateral_gain > 1e-4

    def test_report_fields(self):
        params = MarketParams.of((2.0 * E, 2.0 * E), 1.0)
        report = verify_equilibrium(params, NONNEUTRAL, Contract((0.5, 0.5)), 1e-3, 1e-6)
        assert report.grid_step == 1e-3
        assert len(report.per_cp_best_response) == 2


class TestGridNBS:
    def test_symmetric(self):
        outcome = grid_nbs(BargainingProblem(MarketParams.of((2.0 * E,) * 2, 1.0)), 2e-3)
        assert abs(outcome.contract.shares[0] - 0.5) <= 2e-3
        assert abs(outcome.contract.shares[1] - 0.5) <= 2e-3

    def test_asymmetric_matches_closed_form(self):
        problem = BargainingProblem(MarketParams.of((4.0, 2.0), 1.0))
        outcome = grid_nbs(problem, 2e-3)
        closed = nbs_closed_form(problem)
        for a, b in zip(outcome.contract.shares, closed.contract.shares):
            assert abs(a - b) <= 1e-4

    def test_infeasible_disagreement(self):
        problem = BargainingProblem(MarketParams.of((4.0, 2.0), 1.0), (1e6, 1e6))
        outcome = grid_nbs(problem, 2e-3)
        assert outcome.case_tag == DISAGREEMENT_RETURNED

    def test_step_validation(self):
        problem = BargainingProblem(MarketParams.of((4.0, 2.0), 1.0))
        with pytest.raises(ValueError):
            grid_nbs(problem, 0.5)


class TestMonteCarloCara:
    def base_case(self):
        params = MarketParams.of((4.0, 2.0), 1.0)
        contract = Contract((0.5, 0.5))
        efforts = best_effort(params, contract, NONNEUTRAL)
        return params, contract, efforts

    def test_noiseless_is_exact(self):
        params, contract, efforts = self.base_case()
        noise = NoiseModel(z=0.5, sigma=(0.0, 0.0), rho=0.3)
        estimate, stderr = mc_cara(params, noise, contract, efforts, 10_000, 7)
        assert stderr == 0.0
        expected = -math.exp(-0.5 * expected_utilities(params, contract, efforts).isp_net)
        assert abs(estimate - expected) <= 1e-12

    def test_zero_contract(self):
        params = MarketParams.of((4.0, 2.0), 1.0)
        noise = NoiseModel(z=0.5, sigma=(1.0, 1.0), rho=0.3)
        estimate, stderr = mc_cara(
            params,
            noise,
            Contract((0.0, 0.0)),
            EffortProfile((0.0, 0.0), NONNEUTRAL),
            10_000,
            7,
        )
        assert estimate == -1.0
        assert stderr == 0.0

    def test_matches_closed_form(self):
        params, contract, efforts = self.base_case()
        noise = NoiseModel(z=0.5, sigma=(1.0, 1.0), rho=0.3)
        estimate, stderr = mc_cara(params, noise, contract, efforts, 400_000, 20240817)
        closed = cara_isp_utility(params, noise, contract, efforts)
        assert abs(estimate - closed) <= 4.0 * stderr

    def test_seed_reproducibility(self):
        params, contract, efforts = self.base_case()
        noise = NoiseModel(z=0.4, sigma=(0.8, 1.1), rho=-0.4)
        first = mc_cara(params, noise, contract, efforts, 50_000, 99)
        second = mc_cara(params, noise, contract, efforts, 50_000, 99)
        assert first == second
        other = mc_cara(params, noise, contract, efforts, 50_000, 100)
        assert other != first

    def test_stderr_scaling(self):
        params, contract, efforts = self.base_case()
        noise = NoiseModel(z=0.4, sigma=(0.8, 1.1), rho=-0.4)
        _, se_small = mc_cara(params, noise, contract, efforts, 100_000, 5)
        _, se_big = mc_cara(params, noise, contract, efforts, 200_000, 5)
        shrink = se_big / se_small
        assert abs(shrink - 1.0 / math.sqrt(2.0)) <= 0.2 / math.sqrt(2.0)

    def test_sample_floor(self):
        params, contract, efforts = self.base_case()
        noise = NoiseModel(z=0.4, sigma=(0.8, 1.1), rho=-0.4)
        with pytest.raises(ValueError):
            mc_cara(params, noise, contract, efforts, 100, 5)

    def test_degenerate_correlation(self):
        # |rho| = 1 collapses the noise to one dimension and must still work
        params, contract, efforts = self.base_case()
        noise = NoiseModel(z=0.4, sigma=(0.8, 1.1), rho=1.0)
        estimate, stderr = mc_cara(params, noise, contract, efforts, 200_000, 11)
        closed = cara_isp_utility(params, noise, contract, efforts)
        assert abs(estimate - closed) <= 4.0 * stderr


class TestOracleIndependence:
    def test_oracle_never_calls_the_solvers(self):
        """Structural check: the oracle module may import bargaining result
        types but no solver callables, and nothing from the equilibrium or
        taxation modules."""
        import revshare.oracle as oracle_module

        source = Path(oracle_module.__file__).read_text()
        tree = ast.parse(source)
        allowed_bargaining = {
            "BargainingOutcome",
            "BargainingProblem",
            "INTERIOR",
            "CORNER_CP2_ZERO",
            "DISAGREEMENT_RETURNED",
        }
        for node in ast.walk(tree):
            if isinstance(node, ast.ImportFrom):
                module = node.module or ""
                assert "equilibria" not in module
                assert "regulator" not in module
                assert "cli" not in module
                if "bargaining" in module:
                    names = {alias.name for alias in node.names}
                    assert names <= allowed_bargaining, names
            if isinstance(node, ast.Import):
                for alias in node.names:
                    assert "revshare" not in alias.name
