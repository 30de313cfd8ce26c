### solver_timing
## Times the eigensolvers on the matrices the experiments actually build:
## β-Hermite edge minors of growing size and stochastic Airy operator domains at growing resolution

import math
import time
from pyfiles.logger import logger
from pyfiles.randvar import RngStream, sample_brownian_grid
from pyfiles.hermite_ensemble import BetaEnsembleSpec, sample_hermite, edge_minor_matrix
from pyfiles.tridiag_eigen import lowest_eigenvalues, lowest_pairs
from pyfiles.sao_discrete import solve_domain

logger.info(f'⚙️ Starting solver timing in `./scripts/solver_timing.py`')

def measure_eigenvalues(matrix, k, method):
    start = time.perf_counter()
    lowest_eigenvalues(matrix, k, method=method)
    elapsed_ms = (time.perf_counter() - start) * 1000
    logger.info(f"Eigenvalues ({method}): {elapsed_ms:.1f} ms")
    return elapsed_ms

def measure_pairs(matrix, k):
    start = time.perf_counter()
    lowest_pairs(matrix, k)
    elapsed_ms = (time.perf_counter() - start) * 1000
    logger.info(f"Eigenpairs: {elapsed_ms:.1f} ms")
    return elapsed_ms

def measure_sao(path, k):
    start = time.perf_counter()
    solve_domain(path, 0, k, right_end=8.0)
    elapsed_ms = (time.perf_counter() - start) * 1000
    logger.info(f"SAO domain: {elapsed_ms:.1f} ms")
    return elapsed_ms

def run_test(n_tests, method_name, size):
    elapsed_sum = 0
    for i in range(n_tests):
        stream = RngStream(master_seed=i)
        if method_name in ('stebz', 'sturm'):
            draw = sample_hermite(BetaEnsembleSpec(n=size, beta=2.0), stream)
            elapsed_sum += measure_eigenvalues(edge_minor_matrix(draw, 0), 5, method_name)

        if method_name == 'pairs':
            draw = sample_hermite(BetaEnsembleSpec(n=size, beta=2.0), stream)
            elapsed_sum += measure_pairs(edge_minor_matrix(draw, 0), 5)

        if method_name == 'sao':
            mesh = 8.0 / size
            path = sample_brownian_grid(stream, mesh, int(math.ceil(8.0 / mesh)))
            elapsed_sum += measure_sao(path, 3)
        logger.info(f"Test {i}")

    elapsed_avg = elapsed_sum/n_tests
    logger.info(f"📝 Average for {method_name} at size {size}: {elapsed_avg:.1f} ms")


n_tests = 5
## Matrix model, 5 lowest eigenvalues
for size in (1000, 10_000, 100_000):
    run_test(n_tests, 'stebz', size)
    run_test(n_tests, 'pairs', size)
# The numpy bisection is for small matrices and cross-checks only
run_test(n_tests, 'sturm', 1000)
## Operator model, 3 lowest eigenpairs on [0, 8]
for size in (4000, 16_000, 40_000):
    run_test(n_tests, 'sao', size)

logger.info(f'✅ Finished solver timing in `./scripts/solver_timing.py` \n\n')
