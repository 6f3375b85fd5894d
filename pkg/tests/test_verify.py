"""
Tests for the built-in verification suite: the catalog, parameter
handling, and the result shape.  The mathematical content of each check
is asserted by the check itself; here we make sure the harness around
them behaves.
"""
import pytest

from fforbits.verify import CHECKS, SUITE_ORDER, run_example, verify_all
from fforbits.errors import ValidationError


def test_suite_order_covers_catalog():
    assert set(SUITE_ORDER) == set(CHECKS)
    assert len(SUITE_ORDER) == len(set(SUITE_ORDER))


def test_full_suite_passes():
    results = verify_all()
    assert [r.check_id for r in results] == list(SUITE_ORDER)
    assert all(r.status == "PASS" for r in results), [
        (r.check_id, r.detail) for r in results if r.status != "PASS"]


def test_result_dict_shape():
    (res,) = [r for r in verify_all() if r.check_id == "2.8"]
    d = res.to_dict()
    assert set(d) == {"id", "slug", "status", "detail", "params"}
    assert d["status"] == "PASS"
    assert list(d["params"]) == sorted(d["params"])


def test_run_example_with_overrides():
    res = run_example("2.8", {"p": 3, "nmax": 2})
    assert res.status == "PASS"
    assert res.params.get("p") == 3


def test_run_example_unknown_id():
    with pytest.raises(ValidationError):
        run_example("no-such-example", {})


def test_pmax_skips_larger_primes():
    results = verify_all(pmax=2)
    assert all(r.status in ("PASS", "SKIP") for r in results)
    skipped = [r for r in results if r.params.get("skippedPrimes")]
    assert skipped


def test_single_prime_subset_still_passes():
    res = run_example("15-16", {"p": 2, "nmax": 6})
    assert res.status == "PASS"
