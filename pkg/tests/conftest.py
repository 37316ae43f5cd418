import sys
import time
from pathlib import Path

import pytest

sys.path.insert(0, str(Path(__file__).parent))

from uwbenergy.config import parse_config  # noqa: E402


@pytest.fixture(scope="session")
def cfg():
    return parse_config("paper_defaults")


@pytest.fixture(scope="session")
def full_sweep(cfg, tmp_path_factory):
    """Memoised full band-combination sweeps, written to disk like the CLI does."""
    from uwbenergy.report import write_sweep
    from uwbenergy.sweep import run_sweep

    cache, elapsed = {}, {}
    outdir = tmp_path_factory.mktemp("sweeps")

    def get(fibre, n_spans):
        key = (fibre, n_spans)
        if key not in cache:
            t0 = time.perf_counter()
            res = run_sweep(cfg, fibre, n_spans)
            elapsed[key] = time.perf_counter() - t0
            write_sweep(res, outdir)
            cache[key] = res
        return cache[key]

    get.outdir = outdir
    get.elapsed = elapsed
    return get


ACCEPTANCE_LINES = []


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE_LINES:
            terminalreporter.write_line(line)
