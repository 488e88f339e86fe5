"""Test configuration: packages are imported top-level, as the scripts do."""
import sys
from pathlib import Path

sys.path.insert(0, str(Path(__file__).parent))


def pytest_configure(config):
    config.addinivalue_line("markers", "slow: desk-scale training and calibration runs")
