import numpy as np
import pytest

from thcodec.core.frames import Frame
from thcodec.core.schemas import StreamConfig
from thcodec.motion.synthetic import make_base_frame
from thcodec.pipeline.options import CodecOptions
from thcodec.pipeline.synthetic_clip import make_synthetic_clip


@pytest.fixture
def base_frame():
    return make_base_frame(64, 64, seed=3)


@pytest.fixture
def noise_frame():
    rng = np.random.default_rng(11)
    return Frame(rng.integers(0, 256, size=(48, 40, 3), dtype=np.uint8), 0)


@pytest.fixture
def small_cfg():
    return StreamConfig(
        width=64, height=64, num_keypoints=10, interp_frames=1, sr_factor=1, sr_patch=16, fps=25
    )


@pytest.fixture
def exact_options():
    """Backends under which linear synthetic clips decode bit-exactly."""
    return CodecOptions(sigma=0.1, interp_backend="reference", sr_backend="identity")


@pytest.fixture(scope="session")
def linear_clip():
    return make_synthetic_clip(13, 64, 64, trajectory="linear", seed=1)


@pytest.fixture(scope="session")
def sinusoidal_clip():
    return make_synthetic_clip(13, 64, 64, trajectory="sinusoidal", seed=2)
