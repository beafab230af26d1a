import json
import time

import pytest

from sparsedetect.cli import main

_REPORT: dict[str, tuple[bool, str]] = {}


class AcceptanceRecorder:
    def record(self, key, passed, detail):
        _REPORT[key] = (bool(passed), detail)
        return passed


@pytest.fixture(scope="session")
def acceptance():
    return AcceptanceRecorder()


class GridRunner:
    """Runs experiment grids through the CLI; the first run of each (grid, seed, threads) is cached."""

    def __init__(self, root):
        self.root = root
        self.cache = {}

    def run(self, name, config, threads=1, repeat=0):
        key = (name, threads, repeat)
        if key not in self.cache:
            out = self.root / f"{name}-t{threads}-r{repeat}"
            out.mkdir(parents=True)
            path = out / "config.json"
            path.write_text(json.dumps(config))
            start = time.perf_counter()
            code = main(["run", "--config", str(path), "--out", str(out), "--threads", str(threads)])
            elapsed = time.perf_counter() - start
            assert code == 0, f"CLI run of {name} exited {code}"
            self.cache[key] = ((out / "results.csv").read_bytes(), elapsed)
        return self.cache[key]


@pytest.fixture(scope="session")
def grids(tmp_path_factory):
    return GridRunner(tmp_path_factory.mktemp("acceptance"))


def pytest_terminal_summary(terminalreporter):
    if not _REPORT:
        return
    terminalreporter.section("acceptance criteria")
    for key in sorted(_REPORT):
        passed, detail = _REPORT[key]
        terminalreporter.write_line(f"{'PASS' if passed else 'FAIL'} {key}: {detail}")
