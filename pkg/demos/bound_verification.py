"""Check correlation curves against the chained-inequality bounds.

The chain argument pins every antipodal colouring to
|C(theta)| <= 1 - 1/N with N = max(2, ceil(pi / 2 theta)).  The
hemisphere colouring is extremal: it touches the lower edge exactly at
theta = pi/2N, which the verifier marks with a `saturated` flag.  A
synthetic curve that dips below the edge gets flagged as violated, the
same path the CLI uses for its exit code 1.
"""

import math

from spherebell import (
    CorrelationCurve,
    CurvePoint,
    make_catalogue,
    verify_colouring,
    verify_curve,
)

PI = math.pi

grid = [PI / 8, 0.2 * PI, PI / 4, 0.4 * PI, PI / 2]
reports = verify_colouring(make_catalogue("1"), grid, "closed_form")

print("hemisphere colouring against the chain bounds:")
for r in reports:
    if r.source != "theorem1":
        continue
    mark = "  <- touches the bound" if r.saturated else ""
    print(
        f"  theta = {r.theta / PI:5.3f} pi  C = {r.tested_value:+.4f}  "
        f"bounds [{r.lower:+.4f}, {r.upper:+.4f}]  {r.status}{mark}"
    )

fake = CorrelationCurve(
    "synthetic", "closed_form", (CurvePoint(0.3 * PI, -0.9),)
)
print()
print("a curve claiming C(0.3 pi) = -0.9:")
for r in verify_curve(fake):
    print(
        f"  {r.source}: bounds [{r.lower:+.4f}, {r.upper:+.4f}] -> {r.status}"
    )
print("no antipodal colouring can do that; the two-chain floor is -1/2")
