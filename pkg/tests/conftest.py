import numpy as np
import pytest
from hypothesis import settings

from micromtj.mesh import Mesh, VectorField

settings.register_profile("ci", max_examples=25, deadline=None)
settings.load_profile("ci")


def random_unit(mesh: Mesh, seed: int) -> VectorField:
    rng = np.random.default_rng(seed)
    return VectorField.normalized(mesh, rng.normal(size=(mesh.ny, mesh.nx, 3)))


@pytest.fixture
def mesh4():
    return Mesh(4, 4, 1)


def pytest_configure(config):
    config.acceptance_lines = []


@pytest.fixture
def acceptance(request):
    """``record(n, name, ok, detail)`` logs one criterion outcome for the summary."""

    def record(n, name, ok, detail=""):
        line = f"criterion {n} [{name}]: {'PASS' if ok else 'FAIL'} {detail}".rstrip()
        request.config.acceptance_lines.append(line)
        print(line)
        return ok

    return record


def pytest_terminal_summary(terminalreporter, exitstatus, config):
    lines = getattr(config, "acceptance_lines", [])
    if lines:
        terminalreporter.section("acceptance criteria")
        for line in sorted(lines):
            terminalreporter.write_line(line)
