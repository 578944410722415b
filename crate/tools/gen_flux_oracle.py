#!/usr/bin/env python3
"""Independent evaluation of the six-directional radiation balance.

Computes the frozen expected values asserted by the core test suite and the
acceptance suite: total absorbed flux and mean radiant temperature for the
mixed-flux reference case, the isothermal enclosure cases, and the
all-softplus-zero forward case. Run it to reproduce the constants; the test
suite asserts against the printed values.
"""

SIGMA = 5.670374419e-8
A_K = 0.70
A_L = 0.97
A1 = 0.97
W_UPDOWN = 0.06
W_OTHERS = 0.22


def q_total(s, l, a_k=A_K, a_l=A_L, w_ud=W_UPDOWN, w_o=W_OTHERS):
    """s, l: dicts keyed up/down/north/east/south/west."""
    q_vert = w_ud * sum(a_k * s[d] + a_l * l[d] for d in ("up", "down"))
    q_lat = w_o * sum(a_k * s[d] + a_l * l[d] for d in ("north", "east", "south", "west"))
    return q_vert + q_lat


def tmrt(q, a1=A1, sigma=SIGMA):
    return (q / (a1 * sigma)) ** 0.25 - 273.15


def main():
    # Mixed-flux reference case
    s = {"up": 100.0, "down": 50.0, "north": 150.0, "east": 150.0,
         "south": 150.0, "west": 150.0}
    l = {"up": 450.0, "down": 500.0, "north": 430.0, "east": 430.0,
         "south": 430.0, "west": 430.0}
    q = q_total(s, l)
    print(f"mixed-flux: Q_total = {q:.6f} W/m^2, T_mrt = {tmrt(q):.6f} C")

    # Uniform longwave (isothermal blackbody enclosure at 300 K)
    l300 = SIGMA * 300.0 ** 4
    zeros = {d: 0.0 for d in s}
    uni = {d: l300 for d in s}
    q_iso = q_total(zeros, uni, a_l=0.97)
    print(f"isothermal 300K: L_i = {l300:.6f}, Q = {q_iso:.6f}, "
          f"T_mrt = {tmrt(q_iso):.9f} C")

    # Uniform longwave absorbed-only check from the module example:
    # all S = 0, all L = 459.27 with a_l = 0.97 -> Q = 0.97 * 459.27
    uni2 = {d: 459.27 for d in s}
    print(f"uniform 459.27: Q = {q_total(zeros, uni2):.6f} (0.97*459.27 = {0.97 * 459.27:.6f})")

    # Zero-initialised heads: every raw output 0 -> softplus gives ln 2 on all
    # twelve components.
    import math
    ln2 = math.log(2.0)
    uni_ln2 = {d: ln2 for d in s}
    q_ln2 = q_total(uni_ln2, uni_ln2)
    print(f"all-ln2 fluxes: Q = {q_ln2:.12f}, T_mrt = {tmrt(q_ln2):.9f} C")


if __name__ == "__main__":
    main()
