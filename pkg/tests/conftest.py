from __future__ import annotations

import sys
from pathlib import Path

import pytest

sys.path.insert(0, str(Path(__file__).parent))  # oracles / randgen helpers

from tourforge.dashboard import Dashboard, parse_dashboard

DATA_DIR = Path(__file__).parent / "data"
SALES_MINI_PATH = DATA_DIR / "sales-mini.json"


@pytest.fixture(scope="session")
def sales_mini_text() -> str:
    return SALES_MINI_PATH.read_text(encoding="utf-8")


@pytest.fixture()
def sales_mini(sales_mini_text: str) -> Dashboard:
    return parse_dashboard(sales_mini_text)
