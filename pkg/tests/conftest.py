import numpy as np
import pytest
from scipy import ndimage


@pytest.fixture
def rng():
    return np.random.default_rng(1234)


def textured(shape=(240, 320), seed=0, sigma=2.0):
    """Smooth random texture stretched to [0, 1]."""
    rng = np.random.default_rng(seed)
    tex = ndimage.gaussian_filter(rng.random(shape), sigma)
    return (tex - tex.min()) / (tex.max() - tex.min())


@pytest.fixture(scope="session")
def small_dataset(tmp_path_factory):
    """A short emitted sequence large enough for the 4-level flow pyramid."""
    from uwvo import synth

    cfg = synth.with_overrides(synth.preset("haze-heavy-01"), width=160, height=128, fx=125.0, fy=125.0,
                               cx=79.5, cy=63.5, frames=6, step=0.05)
    return synth.emit_dataset(synth.generate(cfg), tmp_path_factory.mktemp("seq") / "haze")


def pytest_terminal_summary(terminalreporter):
    import sys

    mod = sys.modules.get("test_acceptance")
    if mod is None or not getattr(mod, "RESULTS", None):
        return
    terminalreporter.section("acceptance criteria")
    for n in sorted(mod.RESULTS):
        terminalreporter.write_line(mod.RESULTS[n])
