import pytest

# Filled by tests/test_acceptance.py: criterion id -> (title, passed, detail).
ACCEPTANCE = {}


@pytest.fixture
def record_criterion():
    def record(cid, title, passed, detail=""):
        ACCEPTANCE[cid] = (title, bool(passed), detail)
        return passed

    return record


def pytest_terminal_summary(terminalreporter):
    if not ACCEPTANCE:
        return
    terminalreporter.section("acceptance criteria")
    for cid in sorted(ACCEPTANCE):
        title, passed, detail = ACCEPTANCE[cid]
        status = "PASS" if passed else "FAIL"
        terminalreporter.write_line(f"[{status}] criterion {cid:>2}: {title}  {detail}".rstrip())
