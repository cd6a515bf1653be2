"""Degree bound, trial count and false-accept exponent of the modular determinant check.

    python scripts/modular_error_budget.py G7 G9
"""

import sys
import time
from math import log2

from rank2hecke.catalog import ORDERED_IDS, expected_determinant
from rank2hecke.gram import base_blocks, gram_degree_bound, required_trials, z_matrix
from rank2hecke.hecke import build_model
from rank2hecke.laurent import DEFAULT_PRIME


def main() -> None:
    groups = [g.upper() for g in sys.argv[1:]] or list(ORDERED_IDS)
    print("group  degree_bound  trials  log2_false_accept  seconds")
    for gid in groups:
        t0 = time.perf_counter()
        model, _ = build_model(gid)
        D = gram_degree_bound(base_blocks(model), z_matrix(model), expected_determinant(gid))
        n = required_trials(D, DEFAULT_PRIME)
        print(f"{gid:5s}  {D:12d}  {n:6d}  {n * log2(D / (DEFAULT_PRIME - 1)):17.1f}  "
              f"{time.perf_counter() - t0:7.1f}", flush=True)


if __name__ == "__main__":
    main()
