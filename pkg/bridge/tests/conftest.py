import pytest

from evalbridge.fixtures import make_fixtures


@pytest.fixture(scope="session")
def bridge_fixtures(tmp_path_factory):
    """Train the default zoo once per session (seeded, reproducible)."""
    root = tmp_path_factory.mktemp("bridge_fixtures")
    model_dir = make_fixtures(root, seed=0)
    return {
        "root": root,
        "model_dir": model_dir,
        "image_dir": root / "images" / "target",
    }
