"""Acceptance criteria 1-9.  Each test prints one PASS/FAIL line."""
import time

import pytest

from teichforge import suites

CRITERIA = [
    (1, "atlas consistency", lambda: suites.atlas_suite(), 1.0),
    (2, "nine conjugation identities", lambda: suites.lemma1_suite(), 1.0),
    (3, "push and lift matrices, diagram commutes (24 words)", lambda: suites.matrices_suite(24, 7), None),
    (4, "lift images conjugate with explicit conjugators (12 subgroups)", lambda: suites.lemma2_suite(12, 1), None),
    (5, "alpha classes and their action (12 subgroups)", lambda: suites.lemma3_suite(12, 1), None),
    (6, "self-normalizing refinement within budget (12 subgroups)", lambda: suites.prop4_suite(12, 1), None),
    (7, "stabilizer of Lambda equals an index-2 Delta", lambda: suites.theorem2_suite(0), 600.0),
    (8, "toy layered vs table conjugacy", lambda: suites.toy_suite(0), None),
    (9, "origami invariants and rank identity", lambda: suites.origami_suite(), None),
]


@pytest.mark.parametrize("number,title,run,limit", CRITERIA, ids=[f"criterion_{c[0]}" for c in CRITERIA])
def test_criterion(number, title, run, limit):
    t = time.perf_counter()
    r = run()
    took = time.perf_counter() - t
    ok = r.ok and (limit is None or took < limit)
    print(f"\nACCEPTANCE {number}: {'PASS' if ok else 'FAIL'} - {title} ({took:.2f}s)")
    assert r.ok, r.details
    if limit is not None:
        assert took < limit
