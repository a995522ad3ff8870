import os

from hypothesis import HealthCheck, settings

# Property tests are reproducible by default; QDR_SEED switches to a seeded random run.
settings.register_profile("fixed", derandomize=True, deadline=None,
                          suppress_health_check=[HealthCheck.too_slow])
settings.register_profile("seeded", deadline=None, suppress_health_check=[HealthCheck.too_slow])
settings.load_profile("seeded" if os.environ.get("QDR_SEED") else "fixed")


def pytest_configure(config):
    if os.environ.get("QDR_SEED"):
        config.option.hypothesis_seed = int(os.environ["QDR_SEED"])


def pytest_terminal_summary(terminalreporter, exitstatus, config):
    lines = getattr(config, "acceptance_lines", None)
    if lines:
        terminalreporter.section("acceptance criteria")
        for line in lines:
            terminalreporter.write_line(line)
