"""Where do rod networks order?  A coarse tour of the (rho, A_a) plane.

Run from the repository root:

    python3 demos/phase_diagram_tour.py

Writes demo_out/phase_chi*.svg and prints a text picture of each diagram.
"""

from pathlib import Path

from rodnet.energy import MaterialParams
from rodnet.output import atomic_write, render_svg
from rodnet.phase_diagram import GridSpec, build_phase_diagram

OUT = Path("demo_out")

# A 40x20 grid is enough to see the boundary; the shipped configs use 200x200.
grid = GridSpec.with_counts(0.05, 3.0, 40, 0.01, 100.0, 20)
params = MaterialParams()

for chi in (1.0, 1000.0):
    d = build_phase_diagram(grid, chi, params, protocol="plane", threads=4)
    c = d.counts()
    print(f"chi = {chi:g}: {c['nematic']} nematic cells, {c['isotropic']} isotropic")
    # top row is the largest aspect ratio; '#' nematic, '.' isotropic
    for j in reversed(range(len(d.aa))):
        row = "".join("#" if lab == "nematic" else "." for lab in d.labels[j])
        print(f"  A_a {d.aa[j]:6.1f} |{row}|")
    print(f"  rho from {d.rho[0]:.2f} to {d.rho[-1]:.2f}")
    sd = d.switch_density()
    print(f"  onset density at A_a = {d.aa[-1]:.3g}: {sd[-1]:.2f}, at A_a = {d.aa[1]:.3g}: {sd[1]:.2f}\n")
    atomic_write(OUT / f"phase_chi{chi:g}.svg", render_svg(d, {"chi": chi}))

# Longer rods (larger chi) order at lower densities, so the nematic region grows.
