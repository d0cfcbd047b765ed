import pytest

from triad import Haldane, Linear, ModelParams, Monod

_ACCEPTANCE: list[str] = []


@pytest.fixture
def report():
    """Record one PASS/FAIL line per acceptance criterion, echoed in the summary."""
    def log(name, ok, detail):
        line = f"[{'PASS' if ok else 'FAIL'}] {name}: {detail}"
        print(line)
        _ACCEPTANCE.append(line)
        return ok
    return log


def pytest_terminal_summary(terminalreporter):
    if _ACCEPTANCE:
        terminalreporter.section("acceptance criteria")
        for line in _ACCEPTANCE:
            terminalreporter.write_line(line)


@pytest.fixture
def fo_params():
    """First-order hydrolysis, all six candidate equilibria present."""
    return ModelParams(mu1=Monod(1.2, 7.1), mu2=Haldane(0.74, 9.28, 16.0), D=0.3,
                       S1in=10.0, S2in=60.0, X0in=20.0, k0=0.9, k1=42.0, k2=30.0, k3=100.0,
                       k_hyd=0.5, alpha1=0.8, a1=0.05, alpha2=0.8, a2=0.02)


@pytest.fixture
def bd_params(fo_params):
    """Biomass-dependent hydrolysis variant of ``fo_params``."""
    return fo_params.replace(hydrolysis_mode="biomass", k_hyd=0.0, mu0=Monod(2.0, 5.0),
                             alpha0=0.5)


@pytest.fixture
def two_root_params():
    """Biomass-dependent parameters with two roots of xi = delta (found by scanning S1in)."""
    return ModelParams(mu1=Monod(1.0, 1.0), mu2=Haldane(1.0, 1.0, 10.0), D=0.5,
                       S1in=0.6, S2in=1.0, X0in=5.0, k0=1.0, k1=2.0, k2=0.5, k3=1.5,
                       alpha0=0.5, alpha1=1.0, a1=0.0, alpha2=1.0,
                       hydrolysis_mode="biomass", mu0=Linear(1.0))
