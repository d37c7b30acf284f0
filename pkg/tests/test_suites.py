import pytest

from app.services import suites
from app.services.charsums import QuotientVerdict
from app.services.errors import InvalidParameter
from app.services.suites import (
    SUITE_NAMES,
    SuiteItem,
    load_expectations,
    plan_suite,
    run_item,
    run_suite,
    run_suites,
)


def test_unknown_suite():
    with pytest.raises(InvalidParameter):
        plan_suite("nope")


def test_expectations_are_keyed_by_suite_and_item():
    expectations = load_expectations()
    assert expectations[("lmfdb-table", "p=7")] == [1, 0, 0, 0, -2, 0, 0, 0, 2401]
    assert expectations[("qm", "6,4,3,1")] == "QM"
    assert {suite for suite, _ in expectations} <= set(SUITE_NAMES)


def test_plan_attaches_expectations():
    items = plan_suite("yamamoto-example")
    assert [item.item_id for item in items] == ["p=11", "p=31", "p=41", "beta"]
    assert items[0].kwargs["expected"] == {"character_power": 8, "argument": 2}


def test_plan_sizes():
    assert len(plan_suite("hd", primes=[13])) == 4
    assert len(plan_suite("lmfdb-table")) == 7
    assert len(plan_suite("greene", primes=[7])) == 5
    assert len(plan_suite("count", primes=[7, 13])) == 5
    assert [item.item_id for item in plan_suite("sec6", primes=[7, 11, 13])] == ["p=7", "p=13"]


def test_weil_sample_depends_only_on_seed():
    first = [item.item_id for item in plan_suite("weil", seed=3)]
    again = [item.item_id for item in plan_suite("weil", seed=3)]
    assert first == again
    assert len(first) == 50


def test_run_item_reports_domain_errors():
    result = run_item(SuiteItem(suite="lmfdb-table", item_id="p=5", key=(5,), func="lmfdb", kwargs={"p": 5}))
    assert not result.passed
    assert result.detail["error"] == "BadReduction"


def test_hasse_davenport_suite():
    report = run_suite("hd", primes=[7, 13])
    assert report.ok
    assert report.passed == 6


def test_report_does_not_depend_on_jobs():
    serial = run_suite("hd", primes=[13], jobs=1).to_dict()
    parallel = run_suite("hd", primes=[13], jobs=2).to_dict()
    assert serial == parallel
    assert "seconds" not in serial


def test_report_timing():
    report = run_suite("lmfdb-table", primes=[7]).to_dict(timing=True)
    assert "seconds" in report
    assert "seconds" in report["items"][0]


def test_lmfdb_rows():
    report = run_suite("lmfdb-table", primes=[7, 11])
    assert report.ok
    assert report.passed == 2


def test_yamamoto_example():
    assert run_suite("yamamoto-example").ok


def test_count_suite():
    assert run_suite("count", primes=[7, 13]).ok


def test_elliptic_comparison_suite():
    report = run_suite("sec71", primes=[7, 13])
    assert report.ok
    assert report.passed == 6


def test_run_suites_keeps_order():
    reports = run_suites(["hd", "lmfdb-table"], primes=[7])
    assert [r.suite for r in reports] == ["hd", "lmfdb-table"]


@pytest.mark.slow
def test_period_suite():
    assert run_suite("periods").ok


@pytest.mark.slow
def test_full_lmfdb_table():
    assert run_suite("lmfdb-table").ok


def _quotient_item(expected=None):
    kwargs = {"M": 10, "exponents": (2, 3, 9), "p": 11}
    if expected is not None:
        kwargs["expected"] = expected
    return SuiteItem(suite="qm", item_id="[10;2,7,7]/(2,3,9)/p=11", key=(1, 11), func="quotient", kwargs=kwargs)


def test_quotient_item_fails_when_not_character_like(monkeypatch):
    monkeypatch.setattr(
        suites, "character_quotient_test", lambda M, i, j, k, p: QuotientVerdict(character_like=False, M=M, p=p)
    )
    result = run_item(_quotient_item())
    assert not result.passed
    assert result.expected_failure is None
    assert result.detail["verdict"] == "NotCharacterLike"


def test_quotient_item_passes_when_character_like(monkeypatch):
    monkeypatch.setattr(
        suites, "character_quotient_test",
        lambda M, i, j, k, p: QuotientVerdict(character_like=True, M=M, p=p, exponent=3),
    )
    assert run_item(_quotient_item()).passed


def test_pinned_disagreement_is_an_expected_failure():
    expected = {"verdict": "NotCharacterLike", "reason": "known disagreement"}
    result = run_item(_quotient_item(expected))
    assert not result.passed
    assert result.expected_failure == "known disagreement"
    report = suites.SuiteReport("qm", [result])
    assert report.ok
    assert report.to_dict()["expected_failures"] == 1
    assert report.to_dict()["items"][0]["expected_failure"] == "known disagreement"


def test_pinned_disagreement_that_changes_verdict_fails(monkeypatch):
    monkeypatch.setattr(
        suites, "character_quotient_test",
        lambda M, i, j, k, p: QuotientVerdict(character_like=True, M=M, p=p, exponent=3),
    )
    result = run_item(_quotient_item({"verdict": "NotCharacterLike", "reason": "known disagreement"}))
    assert not result.passed
    assert result.expected_failure is None
    assert not suites.SuiteReport("qm", [result]).ok


def test_qm_plan_pins_the_ten_family_quotients():
    items = {item.item_id: item for item in plan_suite("qm")}
    for p in (11, 31):
        item = items[f"[10;2,7,7]/(2,3,9)/p={p}"]
        assert item.kwargs["expected"]["verdict"] == "NotCharacterLike"
        assert item.kwargs["expected"]["reason"]


@pytest.mark.slow
def test_qm_suite_reports_pinned_disagreements_separately():
    report = run_suite("qm")
    assert report.ok
    assert report.expected_failures == 2
    assert all(not r.passed for r in report.items if r.expected_failure)
