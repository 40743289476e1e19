"""Frozen expected values, derived independently of the implementation
(high-precision arithmetic on the closed-form expressions). Tests compare
against these numbers; they are not regenerated from package code.
"""

import numpy as np

# translational acceleration for m=0.03, g=9.81, f=0.30,
# phi=0.1, theta=-0.05, psi=0.3
VDOT_CASE = dict(
    m=0.03, g=9.81, f=0.30, phi=0.1, theta=-0.05, psi=0.3,
    vdot=np.array([0.1800559643999736817,
                   1.1007057243681951334,
                   -0.12760669165504266649]),
)

# nominal command on the circle (r=0.25 m, v=0.1 m/s, psi_d=0) at tau=0:
# centripetal pull only, so zero roll and a small pitch
CIRCLE_NOMINAL = dict(
    f=0.29430244647301184132,
    phi=0.0,
    theta=0.0040774493705582101913,
)

# 1 s of free fall from rest with zero thrust (third axis points down)
FREE_FALL_1S = dict(p3=4.905, v3=9.81)

# Lyapunov solution for A_c=[[0,1],[-1,-1]], Q=I
P_2STATE = np.array([[1.5, 0.5], [0.5, 1.0]])

# per-axis blocks of the 7-state solution at default gains
# (k_p=16, k_d=8, k_psi=2), Q=I
P_AXIS_BLOCK = np.array([[1.3125, 0.03125], [0.03125, 0.06640625]])
P_YAW = 0.25

# geometry constants
TURN90_DURATION = 6.5707963267948966192   # (2*0.5 + (pi/2)*0.2) / 0.2
TURN90_LENGTH = 1.3141592653589793238
CIRCLE_PERIOD = 15.707963267948966192     # 2*pi*0.25 / 0.1
