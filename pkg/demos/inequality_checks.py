"""Randomized checks behind the constitutive model.

    python3 demos/inequality_checks.py [seed]

Each suite draws 10^4 random matrices and counts violations of an estimate
used to bound the anisotropic strain G = L^(-1/2) F L0^(1/2).
"""

import sys

from rodnet import checks

seed = int(sys.argv[1]) if len(sys.argv) > 1 else 0
for r in checks.matrix_inequality_suites(seed, 10_000):
    print(f"{r['name']:14s} {r['violations']} violations in {r['trials']} trials")

deg = checks.degeneracy_suite(seed, 100)
print("\nApproaching each edge of the order-parameter triangle:")
for edge, info in deg["edges"].items():
    print(f"  {edge:5s} det(Q + I/3) -> {info['final_det_q']:.1e}, "
          f"det L / det(Q + I/3) within {info['ratio_dev']:.1e} of a0^3")
