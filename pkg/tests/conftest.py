import random
import re
from collections import defaultdict
from itertools import combinations

import pytest

from ptx.base import PoissonBase
from ptx.extension import ExtElem
from ptx.manifest import load_fixture
from ptx.poly import Poly, PolyVec, monomials_upto
from ptx.triple import TripleData

# fixture name -> parameter sets worth exercising
VALID_FIXTURES = [
    ("so3.json", {"eps": "0"}),
    ("so3.json", {"eps": "1/2"}),
    ("so3.json", {"eps": "1"}),
    ("matrix2.json", {}),
    ("gl2.json", {}),
    ("so3_base_only.json", {}),
]


def fixture_id(item):
    name, params = item
    return name + "".join(f"[{k}={v}]" for k, v in params.items())


@pytest.fixture(scope="session")
def so3():
    return load_fixture("so3.json", eps="1/2")


@pytest.fixture(scope="session")
def so3_flat():
    return load_fixture("so3.json", eps="0")


@pytest.fixture(scope="session")
def matrix2():
    return load_fixture("matrix2.json")


@pytest.fixture(scope="session")
def gl2():
    return load_fixture("gl2.json")


def rand_poly(rng: random.Random, n: int, max_degree: int = 1, terms: int = 2, lo: int = -3, hi: int = 3) -> Poly:
    exps = monomials_upto(n, max_degree)
    picks = rng.sample(exps, min(terms, len(exps)))
    return Poly(n, {e: rng.randint(lo, hi) for e in picks})


def rand_vec(rng, n, k, max_degree=1, terms=2) -> PolyVec:
    return PolyVec([rand_poly(rng, n, max_degree, terms) for _ in range(k)], n)


def rand_elem(rng, T: TripleData, max_degree=1, terms=2) -> ExtElem:
    return ExtElem(rand_poly(rng, T.n, max_degree, terms), rand_vec(rng, T.n, T.k, max_degree, terms))


def rand_triple(rng, n=2, k=2, max_degree=1) -> TripleData:
    """Degree <= 1 data; blocks are zeroed at random so both verdicts occur."""
    pi = {(i, j): rand_poly(rng, n, max_degree) for i, j in combinations(range(n), 2)}
    base = PoissonBase(n, pi)
    keep = lambda: rng.random() < 0.5
    c = {(a, b, g): rand_poly(rng, n, max_degree) for a in range(k) for b, g in combinations(range(k), 2)} if keep() else {}
    gamma = {(a, i, b): rand_poly(rng, n, max_degree) for a in range(k) for i in range(n) for b in range(k)} if keep() else {}
    kk = {(a, i, j): rand_poly(rng, n, max_degree) for a in range(k) for i, j in combinations(range(n), 2)} if keep() else {}
    return TripleData(base, k, c, gamma, kk)


# ---------------------------------------------------------------------------
# one pass/fail line per acceptance criterion

_ac_results = defaultdict(list)
_AC_NAME = re.compile(r"test_ac(\d+)_")


def pytest_runtest_logreport(report):
    if "test_acceptance.py" not in report.nodeid:
        return
    m = _AC_NAME.search(report.nodeid)
    if not m:
        return
    if report.when == "call" or report.outcome != "passed":
        _ac_results[int(m.group(1))].append(report.outcome == "passed")


def pytest_terminal_summary(terminalreporter):
    if not _ac_results:
        return
    terminalreporter.section("acceptance criteria")
    for num in sorted(_ac_results):
        verdict = "PASS" if all(_ac_results[num]) else "FAIL"
        terminalreporter.write_line(f"AC{num} {verdict}")
