import pytest

from src.core.params import ProblemParams
from src.data_processing.file_processor import ResultFileProcessor
from src.quadrature.grid import RadialGrid


@pytest.fixture
def reference_params() -> ProblemParams:
    """N = 3, k = 1.5 gives p* = 4 and p** = 7; p = 5.5 sits between them."""
    return ProblemParams(N=3, k=1.5, p=5.5, lam=1.0)


@pytest.fixture
def critical_params() -> ProblemParams:
    return ProblemParams(N=3, k=1.5, p=7.0, lam=1.0)


@pytest.fixture
def coarse_grid() -> RadialGrid:
    return RadialGrid(r_min=1e-3, r_max=1e3, n_nodes=61)


@pytest.fixture(autouse=True)
def output_dir(tmp_path, monkeypatch):
    """Every test writes its results into its own temporary directory."""
    target = tmp_path / 'results'
    monkeypatch.setattr(ResultFileProcessor, 'OUTPUT_DIR', str(target))
    return target
