"""Watch the weighted error decay after starting off the curve.

A regulation run starts 5 cm radially outside the circle. The distance
reported below is the metric the projection itself minimizes, the
P-weighted state error to the closest curve point, so a straight line
on the log plot is exponential convergence of exactly the certified
quantity.

Run:  python3 demos/offset_convergence.py
"""

import numpy as np

from manreg import regulation_offset_scenario, run_scenario


def main():
    res = run_scenario(regulation_offset_scenario(offset=0.05))
    t = res.trace.col("t")
    d = np.sqrt(res.trace.col("dist_sq"))

    print("regulation from a 5 cm radial offset\n")
    print("   t (s)   weighted error")
    for instant in [0.0, 0.25, 0.5, 1.0, 1.5, 2.0, 3.0, 5.0, 10.0]:
        i = int(np.argmin(np.abs(t - instant)))
        bar = "#" * max(1, int(40 + 8 * np.log10(max(d[i], 1e-7))))
        print(f"  {t[i]:6.2f}   {d[i]:12.2e}  {bar}")

    # slope of the log-error over the visible decay
    cut = int(np.argmax(d < 5.0 * d.min()) or len(d))
    slope = np.polyfit(t[:cut], np.log(d[:cut]), 1)[0]
    print(f"\nfitted decay rate: {slope:.2f} per second "
          f"(time constant {-1.0 / slope:.2f} s)")


if __name__ == "__main__":
    main()
