import json
import sys
from importlib import resources
from pathlib import Path

import pytest

sys.path.insert(0, str(Path(__file__).parent))

from pfgx import simnet as S


def load_scenario(name: str) -> S.Scenario:
    raw = json.loads(
        resources.files("pfgx").joinpath(f"scenarios/{name}.json").read_text("utf-8")
    )
    return S.Scenario.from_dict(raw)


@pytest.fixture(scope="session")
def graph12():
    sc = load_scenario("graph12")
    res, net = S.run_scenario_net(sc)
    return sc, res, net


@pytest.fixture(scope="session")
def lifecycle():
    sc = load_scenario("lifecycle")
    res, net = S.run_scenario_net(sc)
    return sc, res, net


@pytest.fixture(scope="session")
def reorg():
    sc = load_scenario("reorg")
    res, net = S.run_scenario_net(sc)
    return sc, res, net


@pytest.fixture(scope="session")
def random_runs():
    """Results of the 100 seeded random scenarios, shared across criteria."""
    runs = []
    for seed in range(100):
        sc = S.random_scenario(seed)
        res, net = S.run_scenario_net(sc)
        runs.append((seed, sc, res, net))
    return runs


def pytest_terminal_summary(terminalreporter, exitstatus, config):
    import re

    lines = []
    for status in ("passed", "failed", "error"):
        for rep in terminalreporter.stats.get(status, []):
            m = re.search(r"test_criterion_(\d+)_(\w+)", getattr(rep, "nodeid", ""))
            if m:
                lines.append((int(m.group(1)), m.group(2), status.upper()))
    if lines:
        terminalreporter.section("acceptance criteria")
        for num, slug, status in sorted(set(lines)):
            terminalreporter.write_line(
                f"criterion {num:2d} [{status:6s}] {slug.replace('_', ' ')}"
            )
