import json

import pytest

from sympos import verify as V


@pytest.fixture(scope="module")
def default_run():
    return V.run_all()


@pytest.fixture(scope="module")
def strict_run():
    return V.run_all({"tol_scale": 1e-3})


def test_schema(default_run):
    out = json.loads(json.dumps(V.report_to_json(default_run)))
    assert out["schema_version"] == V.SCHEMA_VERSION
    assert out["seed"] == 0xC0FFEE and out["tol_scale"] == 1.0
    assert [r["lemma_id"] for r in out["reports"]] == list(V.LEMMA_IDS)
    for r in out["reports"]:
        assert set(r) >= {"lemma_id", "checks", "overall", "runtime_ms"}
        for c in r["checks"]:
            assert set(c) == {"desc", "expected", "computed", "tol", "provenance", "pass", "bound"}
            assert c["provenance"] in V.PROVENANCE
            assert c["bound"] in ("logic", "tolerance")


def test_known_outcomes(default_run):
    status = {r.lemma_id: r.overall for r in default_run["reports"]}
    # the two printed derivative values that do not reproduce, and the strict
    # second-order inequality that holds with equality
    assert status.pop("sigma-derivatives") is False
    assert status.pop("ngamma") is False
    assert all(status.values())
    bad = {c.desc for c in V.run_lemma("sigma-derivatives").failures()}
    assert bad == {"sigma2'(0)", "(sigma1^2/4+2)'''(0)"}


def test_sensitivity_mode_only_adds_tolerance_failures(default_run, strict_run):
    for base, strict in zip(default_run["reports"], strict_run["reports"]):
        before = {c.desc for c in base.failures()}
        added = [c for c in strict.failures() if c.desc not in before]
        assert all(c.bound == "tolerance" for c in added)
    assert any(c.bound == "tolerance" for r in strict_run["reports"] for c in r.failures())


def test_deterministic():
    a = V.report_to_json(V.run_all({"lemmas": ["krein", "sigma-derivatives"], "seed": 7}))
    b = V.report_to_json(V.run_all({"lemmas": ["sigma-derivatives", "krein"], "seed": 7}))
    ca = {r["lemma_id"]: [c["computed"] for c in r["checks"]] for r in a["reports"]}
    cb = {r["lemma_id"]: [c["computed"] for c in r["checks"]] for r in b["reports"]}
    assert ca == cb


def test_config_errors():
    with pytest.raises(V.UnknownLemmaError):
        V.run_all({"lemmas": ["nope"]})
    with pytest.raises(ValueError):
        V.run_all({"tol_scale": 0})
    with pytest.raises(ValueError):
        V.Check("x", 0, 0, None, "folklore", True)


def test_info_checks_do_not_vote():
    r = V.verify_trace_growth()
    infos = [c for c in r.checks if c.passed is None]
    assert infos and r.overall
