import time

import numpy as np
import pytest

from admitnet import model, nn, synth, textfeat

ACCEPTANCE_RESULTS = []
SUITE_BUDGET_S = 300.0
_session_start = time.perf_counter()


def record_acceptance(name, passed, detail=""):
    ACCEPTANCE_RESULTS.append((name, bool(passed), detail))


def pytest_sessionfinish(session, exitstatus):
    # wall-clock criterion: only meaningful when the acceptance module ran
    if not ACCEPTANCE_RESULTS:
        return
    elapsed = time.perf_counter() - _session_start
    ok = elapsed < SUITE_BUDGET_S
    record_acceptance("suite wall-clock", ok, f"{elapsed:.1f}s (< {SUITE_BUDGET_S:.0f}s)")
    if not ok and exitstatus == 0:
        session.exitstatus = 1


def pytest_terminal_summary(terminalreporter):
    if not ACCEPTANCE_RESULTS:
        return
    terminalreporter.section("acceptance criteria")
    for name, passed, detail in ACCEPTANCE_RESULTS:
        terminalreporter.write_line(f"[{'PASS' if passed else 'FAIL'}] {name}: {detail}")


@pytest.fixture(scope="session")
def synth_cfg():
    return synth.SynthConfig()


@pytest.fixture(scope="session")
def synthetic(synth_cfg):
    """Default gensynth data with essay features extracted, plus timing."""
    start = time.perf_counter()
    data, truth = synth.generate(synth_cfg)
    data = textfeat.extract_columns(data, synth.text_names(synth_cfg), textfeat.default_lexicon())
    return data, truth, time.perf_counter() - start


@pytest.fixture(scope="session")
def trained(synthetic, synth_cfg):
    """FF and FICNN trained with the default hyperparameters, seed 7."""
    data, _, _ = synthetic
    out = {}
    for kind in (nn.FF, nn.FICNN):
        start = time.perf_counter()
        outcome = model.train_model(data, synth.pipeline_config(synth_cfg), kind, seed=synth_cfg.seed)
        out[kind] = (outcome, time.perf_counter() - start)
    return out


@pytest.fixture
def rng():
    return np.random.default_rng(12345)
