import numpy as np
import pytest

from incoherent.model import BathSpec, Eigenbasis, InteractionSpec, Mode

_acceptance_lines = []


def pytest_runtest_makereport(item, call):
    marker = item.get_closest_marker("acceptance")
    if marker is None or call.when != "call":
        return
    label = marker.args[0] if marker.args else item.name
    status = "PASS" if call.excinfo is None else "FAIL"
    detail = dict(item.user_properties).get("detail", "")
    _acceptance_lines.append(f"[{status}] {label}" + (f" :: {detail}" if detail else ""))


def pytest_terminal_summary(terminalreporter):
    if _acceptance_lines:
        terminalreporter.section("acceptance criteria")
        for line in _acceptance_lines:
            terminalreporter.write_line(line)


@pytest.fixture
def rng():
    return np.random.default_rng(20240607)


@pytest.fixture
def benchmark_bath():
    return BathSpec.single(omega=1.0, g=0.5, nbar=0.0)


def random_bath(rng, max_modes=3, nbar=True):
    n = int(rng.integers(1, max_modes + 1))
    return BathSpec(
        tuple(
            Mode(
                omega=float(rng.uniform(0.3, 3.0)),
                g=float(rng.uniform(0.0, 1.0)),
                nbar=float(rng.uniform(0.0, 2.0)) if nbar else 0.0,
            )
            for _ in range(n)
        )
    )


def random_unitary(rng, n=4):
    z = rng.normal(size=(n, n)) + 1j * rng.normal(size=(n, n))
    q, r = np.linalg.qr(z)
    return q * (np.diag(r) / np.abs(np.diag(r)))


def random_interaction(rng, basis=None, scale=2.0):
    basis = Eigenbasis(basis) if basis else list(Eigenbasis)[rng.integers(3)]
    alphas = tuple(rng.uniform(-scale, scale, size=4))
    u = random_unitary(rng) if basis is Eigenbasis.GENERAL else None
    return InteractionSpec(alphas, basis, u)
