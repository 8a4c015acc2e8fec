from __future__ import annotations

import pytest

from corrnet.synthetic import write_crisis_fixture


@pytest.fixture(scope="session")
def crisis_fixture(tmp_path_factory):
    """Paths of the bundled 533-ticker fixture, generated once per session."""
    out_dir = tmp_path_factory.mktemp("fixture")
    prices_path, sectors_path = write_crisis_fixture(out_dir)
    return prices_path, sectors_path
