"""Walk the band catalogue and watch colouring 3 slip under the references.

Every colouring here assigns +-1 to the sphere with antipodes opposite,
and the second observer holds the colour swap, so C(0) = -1 and the
interesting question is how slowly the anticorrelation decays.  The
hemisphere colouring gives the straight line -(1 - 2 theta / pi); the
quantum singlet gives -cos theta.  Colouring 3 crosses below both
before theta reaches pi/2.
"""

import math

import numpy as np

from spherebell import closed_form, find_crossing, singlet_correlation

PI = math.pi

grid = np.linspace(0.30, 0.50, 11) * PI

print(f"{'theta/pi':>9} {'C_1':>9} {'C_3':>9} {'singlet':>9}")
for t in grid:
    print(
        f"{t / PI:9.3f} {closed_form('1', t):9.4f} "
        f"{closed_form('3', t):9.4f} {singlet_correlation(t):9.4f}"
    )

bracket = (PI / 3 + 1e-9, PI / 2 - 1e-4)
vs_line = find_crossing(
    lambda t: closed_form("3", t), lambda t: closed_form("1", t), bracket, 1e-6
)
vs_quantum = find_crossing(
    lambda t: closed_form("3", t), singlet_correlation, bracket, 1e-6
)
print()
print(f"colouring 3 passes the linear law at theta = {vs_line.theta_star / PI:.4f} pi")
print(f"and the quantum curve at theta = {vs_quantum.theta_star / PI:.4f} pi")
