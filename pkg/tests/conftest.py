import os

import numpy as np
import pytest
from hypothesis import HealthCheck, settings

settings.register_profile("default", max_examples=60, deadline=None,
                          suppress_health_check=[HealthCheck.too_slow])
settings.load_profile(os.environ.get("HYPOTHESIS_PROFILE", "default"))

# criterion id -> list of (label, passed, detail); passed is None for skipped checks
ACCEPTANCE: dict = {}


def pytest_addoption(parser):
    parser.addoption("--runslow", action="store_true", default=False, help="run slow tests")


def pytest_collection_modifyitems(config, items):
    if config.getoption("--runslow") or os.environ.get("WENOSNN_RUNSLOW"):
        return
    skip = pytest.mark.skip(reason="slow: use --runslow")
    for item in items:
        if "slow" in item.keywords:
            item.add_marker(skip)


def pytest_terminal_summary(terminalreporter):
    if not ACCEPTANCE:
        return
    tr = terminalreporter
    tr.section("acceptance criteria")
    for cid in sorted(ACCEPTANCE, key=lambda k: (int(k.rstrip("abcd")), k)):
        for label, ok, detail in ACCEPTANCE[cid]:
            status = "SKIP" if ok is None else ("PASS" if ok else "FAIL")
            tr.write_line(f"[{status}] {cid:>3} {label}: {detail}")


@pytest.fixture(scope="session")
def cache_dir(tmp_path_factory):
    path = tmp_path_factory.mktemp("ref-cache")
    os.environ["WENOSNN_CACHE"] = str(path)
    return path


@pytest.fixture(scope="session")
def trained(tmp_path_factory):
    """Stage-1 model plus both stage-2 models, trained once per session with default settings."""
    from wenosnn.snn import save_model
    from wenosnn.training import LossConfig, train_stage1, train_stage2

    s1_losses = []
    m1 = train_stage1(seed=0, log=lambda s, e, l: s1_losses.append(l))
    out = {"init": m1, "stage1_losses": s1_losses}
    d = tmp_path_factory.mktemp("models")
    for kind, tag in (("L1", "snn1"), ("L2", "snn2")):
        m = train_stage2(m1, loss=LossConfig(kind), seed=0)
        out[tag] = m
        out[tag + "_path"] = save_model(m, d / f"{tag}.wsnn")
    return out


@pytest.fixture
def rng():
    return np.random.default_rng(20240601)
