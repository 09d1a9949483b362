import numpy as np
import pytest

from shiftmean.errors import ParameterError
from shiftmean.signals import BLOCKS_POSITIONS, SIGNAL_NAMES, raw_signal
from shiftmean.signals import test_signal as make_signal


def test_heavisine_first_sample():
    assert make_signal("HeaviSine", 8, normalize=False).samples[0] == 0.0


@pytest.mark.parametrize("name", SIGNAL_NAMES)
def test_unit_norm(name):
    assert np.sqrt(np.mean(make_signal(name, 1024).samples ** 2)) == pytest.approx(1.0, abs=1e-12)


def test_blocks_jump_count():
    assert len(BLOCKS_POSITIONS) == 11
    # midpoints avoid landing exactly on a breakpoint, where sign() gives a half step
    t = (np.arange(1 << 16) + 0.5) / (1 << 16)
    jumps = np.flatnonzero(np.abs(np.diff(raw_signal("Blocks", t))) > 1e-9)
    assert len(jumps) == 11


def test_errors():
    with pytest.raises(ParameterError):
        make_signal("Doppler", 64)
    with pytest.raises(ParameterError):
        make_signal("Wave", 100)
