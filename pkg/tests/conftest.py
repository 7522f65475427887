import math

import numpy as np
import pytest

from zenobound.states import sigma_free
from zenobound.zeno import PUBLISHED, run_multi_round, run_round


def _free_pair_matrix(d11, d12, d21, d22, off):
    """Published free-pair outputs live on |11>, |12>, |21>, |22> plus the <11|.|22> coherence."""
    m = np.zeros((9, 9))
    for idx, v in zip((4, 5, 7, 8), (d11, d12, d21, d22)):
        m[idx, idx] = v
    m[4, 8] = m[8, 4] = off
    return m


# Transcribed as printed (5 or 6 decimals).
PRINTED_ROUND_STATES = {
    1: _free_pair_matrix(0.29649, 0.38043, 0.00104, 0.32202, 0.30824),
    2: _free_pair_matrix(0.34417, 0.244553, 0.00242, 0.40884, 0.37414),
    3: _free_pair_matrix(0.37490, 0.08169, 0.01062, 0.53277, 0.44561),
    4: _free_pair_matrix(0.36606, 0.04417, 0.02078, 0.56897, 0.45496),
}
PRINTED_ONE_ITERATION = _free_pair_matrix(0.230895, 0.538209, 0.047619, 0.230731, 0.230731)

# rows of the round table: (negativity, fidelity), row 0 is the input state
PRINTED_TABLE = [
    (0.110977, 0.3),
    (0.171195, 0.411667),
    (0.269747, 0.500432),
    (0.400867, 0.599635),
    (0.422634, 0.614989),
]

# Printed rows 3 and 4 are reproduced by chained rounds 4 and 5 of the same protocol;
# chained round 3 lands at negativity 0.350436.
TABLE_ROW_TO_CHAIN_ROUND = {1: 1, 2: 2, 3: 4, 4: 5}


def printed_decimals(x: float) -> int:
    s = repr(float(x))
    return len(s.split(".")[1]) if "." in s else 0


def truncate(x: float, decimals: int) -> float:
    return math.floor(x * 10**decimals + 1e-9) / 10**decimals


@pytest.fixture(scope="session")
def chain():
    return run_multi_round([PUBLISHED] * 5)


@pytest.fixture(scope="session")
def published_trace():
    return run_round(sigma_free(0.3), PUBLISHED, keep_states=True)


@pytest.fixture(scope="session")
def long_trace():
    return run_round(sigma_free(0.3), PUBLISHED.replace(k=300), keep_states=False)


def random_density(rng, dim=9, rank=None):
    rank = dim if rank is None else rank
    g = rng.normal(size=(dim, rank)) + 1j * rng.normal(size=(dim, rank))
    rho = g @ g.conj().T
    return rho / np.trace(rho).real


def random_unitary(rng, dim):
    z = rng.normal(size=(dim, dim)) + 1j * rng.normal(size=(dim, dim))
    q, r = np.linalg.qr(z)
    return q * (np.diag(r) / np.abs(np.diag(r)))


def random_hermitian(rng, dim):
    x = rng.normal(size=(dim, dim)) + 1j * rng.normal(size=(dim, dim))
    return (x + x.conj().T) / 2


def pytest_terminal_summary(terminalreporter):
    try:
        from test_acceptance import RESULTS
    except ImportError:
        return
    if not RESULTS:
        return
    terminalreporter.section("acceptance criteria")
    for name in sorted(RESULTS):
        ok, detail = RESULTS[name]
        terminalreporter.write_line(f"{'PASS' if ok else 'FAIL'}  {name}: {detail}")
