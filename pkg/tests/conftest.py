import numpy as np
import pytest

from qubitpack.network import FrequencyResponse

# Parallel RLC used throughout the black-box tests.
R_PAR, L_PAR, C_PAR = 10e3, 10e-9, 0.25e-12


def parallel_rlc_admittance(freqs, R=R_PAR, L=L_PAR, C=C_PAR):
    s = 2j * np.pi * np.asarray(freqs)
    return 1 / R + s * C + 1 / (s * L)


@pytest.fixture
def rlc_freqs():
    return np.linspace(1e9, 10e9, 401)


@pytest.fixture
def rlc_response(rlc_freqs):
    return FrequencyResponse(rlc_freqs, parallel_rlc_admittance(rlc_freqs), "Y")


# Verdict lines from the acceptance suite, repeated in the terminal summary so they
# are visible without ``-s``.
ACCEPTANCE_LINES = []


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in sorted(ACCEPTANCE_LINES):
            terminalreporter.write_line(line)
