import contextlib

ACCEPTANCE = []


@contextlib.contextmanager
def criterion(label):
    try:
        yield
    except BaseException:
        ACCEPTANCE.append(("FAIL", label))
        raise
    ACCEPTANCE.append(("PASS", label))


def pytest_terminal_summary(terminalreporter):
    if not ACCEPTANCE:
        return
    terminalreporter.section("acceptance criteria")
    for status, label in sorted(ACCEPTANCE, key=lambda x: x[1]):
        terminalreporter.write_line(f"{status}  {label}")
