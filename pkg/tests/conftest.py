from hypothesis import HealthCheck, settings

settings.register_profile(
    "default", deadline=None, max_examples=150,
    suppress_health_check=[HealthCheck.too_slow],
)
settings.load_profile("default")

# acceptance criteria append (status, name, detail) here
ACCEPTANCE: list[tuple[str, str, str]] = []


def pytest_terminal_summary(terminalreporter):
    if not ACCEPTANCE:
        return
    terminalreporter.write_sep("=", "acceptance criteria")
    for status, name, detail in ACCEPTANCE:
        terminalreporter.write_line(f"{status} {name}: {detail}")
