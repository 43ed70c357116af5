"""Stress-strain curves: soft regions and a non-monotone response.

    python3 demos/stress_softening.py

P_xx is the derivative of the optimal energy in F_xx.  A jump of the order
parameter along the stretch shows up as a dip in the stress.
"""

import numpy as np

from rodnet.energy import DILUTE_WELLS, MaterialParams
from rodnet.phase_diagram import stress_curve, work_energy_check

lam = np.linspace(1.0, 2.5, 76)
params = MaterialParams(wells=DILUTE_WELLS)

for a in (0.5, 5.0, 80.0):
    c = stress_curve(0.5, a, lam, params)
    work, de, rel = work_energy_check(c)
    shape = "monotone" if c.monotone else "non-monotone, slope changes at lambda = " + \
        ", ".join(f"{lam[k]:.2f}" for k in c.sign_changes)
    print(f"A_a = {a:g}: {shape}")
    print("  lambda  " + " ".join(f"{x:6.2f}" for x in lam[::10]))
    print("  P_xx    " + " ".join(f"{x:6.2f}" for x in c.p_xx[::10]))
    print("  s*      " + " ".join(f"{x:6.3f}" for x in c.s_star[::10]))
    print(f"  work {work:.4f} vs energy change {de:.4f} (relative gap {rel:.1e})\n")
