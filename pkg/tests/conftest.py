import pytest

N_CRITERIA = 12


def pytest_configure(config):
    config.acceptance = {}


@pytest.fixture
def criterion(request):
    """record(n, ok, detail): store one acceptance line for the terminal summary."""

    def record(n, ok, detail):
        request.config.acceptance[n] = (bool(ok), detail)
        print(f"criterion {n}: {'PASS' if ok else 'FAIL'} {detail}")

    return record


def pytest_terminal_summary(terminalreporter, exitstatus, config):
    results = getattr(config, "acceptance", {})
    if not results:
        return
    terminalreporter.section("acceptance criteria")
    for n in range(1, N_CRITERIA + 1):
        if n in results:
            ok, detail = results[n]
            terminalreporter.write_line(f"criterion {n:2d}: {'PASS' if ok else 'FAIL'}  {detail}")
        else:
            terminalreporter.write_line(f"criterion {n:2d}: NOT RUN")
