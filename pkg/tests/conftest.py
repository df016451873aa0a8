"""Collects acceptance-criterion outcomes and prints one line per criterion."""

import pytest

CRITERIA = {
    1: "log isometry |log x - log y| = |x - y| (p = 3, 5, 11; k = 12)",
    2: "kappa <= p^2 and |lambda^kappa - 1| <= 1/p on CF words",
    3: "every nonempty CF word matrix lies in the admissible class",
    4: "congruent matrices move points by at most p^-k",
    5: "shift identity A_{w_m} U_k(T^m w) = U_k(w)",
    6: "saturated members of the shift collection are equinumerous",
    7: "period '1' at p = 11: eigenvector PBad evidence and shrinking epsilon",
    8: "convergent inequality for golden ratio and sqrt(2) - 1",
    9: "factor complexity suite",
    10: "G_n edge law and Thue-Morse component table",
    11: "Fibonacci concatenation scheme at p = 2, k = 3",
    12: "byte-identical reruns of every sample experiment",
}

_outcomes: dict[int, list[bool]] = {}


def pytest_configure(config):
    config.addinivalue_line("markers", "criterion(n): acceptance criterion number")


@pytest.hookimpl(hookwrapper=True)
def pytest_runtest_makereport(item, call):
    outcome = yield
    report = outcome.get_result()
    marker = item.get_closest_marker("criterion")
    if marker is None:
        return
    if report.when == "call" or (report.when == "setup" and report.failed):
        for n in marker.args:
            _outcomes.setdefault(n, []).append(report.passed)


def pytest_terminal_summary(terminalreporter):
    if not _outcomes:
        return
    terminalreporter.section("acceptance criteria")
    for n, text in CRITERIA.items():
        results = _outcomes.get(n)
        if results is None:
            status = "NOT RUN"
        else:
            status = "PASS" if all(results) else "FAIL"
        terminalreporter.write_line(f"criterion {n:2d}: {status}  {text}")
