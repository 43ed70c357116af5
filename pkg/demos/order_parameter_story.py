"""How the order parameter follows density under plane strain.

    python3 demos/order_parameter_story.py

Compression (small stretch) packs rods and aligns them; stretching dilutes
the network.  With the dilute well preset a second ordered state appears as
the density approaches the nematic well near rho = 0.5.
"""

import numpy as np

from rodnet.energy import DENSE_WELLS, DILUTE_WELLS, MaterialParams
from rodnet.phase_diagram import lam_for_densities, order_parameter_curve

rho = np.linspace(3.0, 0.1, 30)
lam = lam_for_densities(rho)

for chi, wells, name in ((10.0, DENSE_WELLS, "dense"), (80.0, DILUTE_WELLS, "dilute")):
    fam = order_parameter_curve(chi, [0.01, 5.0, 80.0], lam, MaterialParams(wells=wells))
    print(f"chi = {chi:g} ({name} wells)")
    print("   rho  " + "  ".join(f"A_a={a:<5g}" for a in fam))
    for k in range(0, len(rho), 3):
        print(f"  {rho[k]:4.2f}  " + "  ".join(f"{b.s_star[k]:+.3f}   " for b in fam.values()))
    for a, b in fam.items():
        if b.discontinuities:
            print(f"  A_a = {a:g}: s* jumps near rho = "
                  + ", ".join(f"{1 / x ** 2:.2f}" for x in b.discontinuities))
    print()

# At A_a = 0.01 the rods barely interact and the elastic term prefers
# oblate order (s* < 0) in the stretched, dilute states.
