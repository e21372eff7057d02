"""Shared fixtures: the two committed transformer geometries and their models."""

from pathlib import Path

import pytest

from tsvqvco.geometry import TransformerGeometry
from tsvqvco.transformer import build_transformer

CONFIG_DIR = Path(__file__).resolve().parent.parent / "configs"


@pytest.fixture()
def toroidal_geometry():
    return TransformerGeometry.from_json_file(CONFIG_DIR / "toroidal.json")


@pytest.fixture()
def vertical_spiral_geometry():
    return TransformerGeometry.from_json_file(CONFIG_DIR / "vertical_spiral.json")


@pytest.fixture(scope="session")
def toroidal_model():
    geom = TransformerGeometry.from_json_file(CONFIG_DIR / "toroidal.json")
    return build_transformer(geom)


@pytest.fixture(scope="session")
def vertical_spiral_model():
    geom = TransformerGeometry.from_json_file(CONFIG_DIR / "vertical_spiral.json")
    return build_transformer(geom)
