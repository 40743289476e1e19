"""Solve and inspect the stability certificate behind the projection metric.

The closed loop after exact linearization is linear, so quadratic
stability is a Lyapunov equation away. The resulting P doubles as the
weight matrix the projection uses, which is what ties "closest point on
the curve" to "direction of guaranteed error decay".

Run:  python3 demos/certificate_report.py
"""

import numpy as np

from manreg import DEFAULT_GAINS, certify


def main():
    cert = certify(DEFAULT_GAINS)
    g = cert.gains
    print(f"gains: k_p={g.k_p} k_d={g.k_d} k_psi={g.k_psi} k_i={g.k_i}\n")

    np.set_printoptions(precision=6, suppress=True)
    print("P (position/velocity block, one horizontal axis):")
    print(cert.P[np.ix_([0, 3], [0, 3])])
    print(f"\nyaw weight: {cert.P[6, 6]}")
    print(f"residual of A_c'P + PA_c + Q: {cert.residual:.2e}")
    print(f"eigenvalue range of P: [{cert.min_eig_P:.4f}, "
          f"{np.linalg.eigvalsh(cert.P).max():.4f}]")

    poles = np.unique(np.round(np.linalg.eigvals(cert.A_c), 4))
    print("closed-loop poles:", " ".join(f"{p.real:+.1f}" if p.imag == 0
                                         else f"{p:+.1f}" for p in poles))
    print("\nsame certificate from the command line:")
    print("  python3 -m manreg.cli certify")


if __name__ == "__main__":
    main()
