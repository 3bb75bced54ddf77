import numpy as np
import pytest

from spookybound.timetag_sim import TAG_DTYPE


def make_tags(timestamps, channel=0, setting=0):
    t = np.zeros(len(timestamps), dtype=TAG_DTYPE)
    t["timestamp_ps"] = np.asarray(timestamps, dtype=np.uint64)
    t["channel"] = channel
    t["setting"] = setting
    return t


@pytest.fixture
def rng():
    return np.random.default_rng(12345)


def pytest_terminal_summary(terminalreporter):
    from test_acceptance import RESULTS

    if RESULTS:
        terminalreporter.section("acceptance criteria")
        for line in RESULTS:
            terminalreporter.write_line(line)
