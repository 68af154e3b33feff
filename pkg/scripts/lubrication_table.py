"""Print the lubrication figures for the default steel contact.

Covers the film thickness from the formula, the film-thickness ratio before
and after running-in (with both the formula value and a 5.51 nm film),
Hertz pressure and the reciprocating velocities.
"""

from fivmon.lubrication import (
    ContactSpec,
    SurfacePair,
    hertz_max_pressure,
    lubrication_report,
    reciprocating_velocities,
)

SURFACES = {"before": SurfacePair(0.124, 0.547), "after": SurfacePair(0.554, 0.279)}


def main():
    spec = ContactSpec()
    hz = hertz_max_pressure(spec)
    slide, entrain = reciprocating_velocities(5e-3, 400)
    print(f"contact radius   {hz.contact_radius * 1e6:8.2f} um")
    print(f"p_max            {hz.p_max / 1e9:8.3f} GPa")
    print(f"sliding speed    {slide:8.4f} m/s   entrainment {entrain:.4f} m/s")
    print()
    print(f"{'surface':8s} {'sigma_c um':>10s} {'h_min nm':>9s} {'lambda':>9s}  regime")
    for name, pair in SURFACES.items():
        for override in (None, 5.51e-9):
            rep = lubrication_report(pair, spec, override)
            print(f"{name:8s} {rep.sigma_c_um:10.4f} {rep.h_min * 1e9:9.3f} "
                  f"{rep.lambda_ratio:9.5f}  {rep.regime.value}")
    print(f"\nE* = {rep.E_composite / 1e9:.2f} GPa")


if __name__ == "__main__":
    main()
