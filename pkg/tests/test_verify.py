import json

import pytest
from scipy.special import expit

from hebbiantools.app import verify
from hebbiantools.app.verify import (
    CriterionResult,
    UnknownSuiteError,
    VerifyContext,
    VerifyError,
    closed_form_suite,
    critical_value_suite,
    hygiene_suite,
    run,
    run_suites,
    select_suites,
)
from hebbiantools.lib.integrate import IntegrationConfig


@pytest.fixture
def short_ctx() -> VerifyContext:
    return VerifyContext(integration=IntegrationConfig(t_max=1.0))


class TestSelectSuites:
    def test_registry_order(self):
        assert select_suites("hygiene, critical-value") == ["critical-value", "hygiene"]

    def test_all(self):
        assert select_suites("all") == list(verify.SUITES)
        assert select_suites("pitchfork,all") == list(verify.SUITES)

    @pytest.mark.parametrize("selector, message", [("", "empty"), ("pitchfork,bogus", "bogus")])
    def test_unknown(self, selector, message):
        with pytest.raises(UnknownSuiteError, match=message):
            select_suites(selector)


class TestSuites:
    def test_critical_value(self):
        results = critical_value_suite(VerifyContext())
        assert [result.name for result in results] == [
            "c0",
            "x_hat0",
            "lambda1-vanishes",
            "eigenvector-transverse",
        ]
        assert all(result.passed for result in results)

    def test_closed_form(self):
        results = {result.name: result for result in closed_form_suite(VerifyContext())}
        assert list(results) == ["eigenvalues", "dense-eigensolve", "characteristic-polynomial"]
        assert all(result.passed for result in results.values())
        assert results["eigenvalues"].details["worst_residual"] < 1e-11

    def test_hygiene_jacobians(self, short_ctx):
        results = {result.qualified_name: result for result in hygiene_suite(short_ctx)}
        for name in ("motif", "single-synapse", "random-network", "reduced3", "planar"):
            assert results[f"hygiene/jacobian-{name}"].passed
        assert results["hygiene/rk4-order"].passed

    def test_corrupted_sigmoid_is_caught(self, short_ctx, monkeypatch):
        monkeypatch.setattr("hebbiantools.core.dynamics.sigmoid", lambda z: expit(1.1 * z))
        results = {result.qualified_name: result for result in hygiene_suite(short_ctx)}
        assert not results["hygiene/jacobian-motif"].passed
        assert results["hygiene/jacobian-motif"].details["worst"] > 1e-3

    @pytest.mark.slow
    def test_all_suites_pass(self):
        report = run_suites("all")
        assert report.passed, report.failed


class TestRun:
    def test_raising_suite_is_reported(self, monkeypatch):
        def broken(ctx):
            raise RuntimeError("boom")

        monkeypatch.setitem(verify.SUITES, "pitchfork", broken)
        report = run_suites("pitchfork,critical-value")
        assert report.failed == ["pitchfork/error"]
        errors = [result for result in report.results if result.name == "error"]
        assert errors[0].details["error"] == "RuntimeError: boom"

    def test_report_is_written_before_failing(self, tmp_path, monkeypatch):
        def failing(ctx):
            return [CriterionResult("pitchfork", "fake", False, {"value": 1.0})]

        monkeypatch.setitem(verify.SUITES, "pitchfork", failing)
        with pytest.raises(VerifyError, match="pitchfork/fake"):
            run("pitchfork", tmp_path)
        report = json.loads((tmp_path / "verify_report.json").read_text())
        assert report["passed"] is False
        assert report["criteria"] == [
            {"criterion": "pitchfork/fake", "status": "fail", "details": {"value": 1.0}}
        ]

    def test_passing_run(self, tmp_path):
        report, outputs = run("critical-value", tmp_path)
        assert report.passed
        assert outputs == [tmp_path / "verify_report.json"]
