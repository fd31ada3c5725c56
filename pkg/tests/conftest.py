"""Shared pytest wiring: one visible PASS/FAIL line per acceptance criterion."""

_CRITERION_TITLES = {
    1: "binary perturbation closed forms through the generic pipeline",
    2: "forwarding-protocol privacy: closed form + Monte Carlo agreement",
    3: "MAP error / min-entropy identity and uniform-posterior privacy",
    4: "entropy ordering with equality iff uniform on support",
    5: "privacy-reduction bound chain and total-variation bound",
    6: "disclosure criteria ordering risk <= t <= delta",
    7: "Blahut-Arimoto against closed form and grid-search oracle",
    8: "typical-set enumeration: bounds, runtime, trend",
    9: "qualitative comparative claims are out of scope (documentation only)",
}


def pytest_runtest_logreport(report):
    if "test_acceptance" not in report.nodeid or report.when != "call":
        return
    name = report.nodeid.rsplit("::", 1)[-1]
    digits = "".join(ch for ch in name if ch.isdigit())
    if not digits:
        return
    criterion = int(digits[0])
    title = _CRITERION_TITLES.get(criterion, "")
    if report.passed:
        verdict = "PASS"
    elif report.failed:
        verdict = "FAIL"
    else:
        verdict = "SKIP"
    if hasattr(report, "wasxfail"):
        verdict = "EXPECTED FAIL (unattainable as stated)"
    print(f"\nACCEPTANCE {criterion} [{name}]: {verdict} - {title}")
