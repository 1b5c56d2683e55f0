"""
Basis-family gallery
====================

Solve the smooth speed-transfer problem with inverse engineering: postulate
x(t) inside a function family, eliminate the boundary conditions exactly,
and pick the free parameters that minimise the running cost

    C = int_0^1 [x(t)^2 + xdot(t)^2] dt.

The script prints the optimal free parameters and costs for the polynomial
and quarter-wave sine families at orders 3..6 and for the real-exponential
family at rate k = 100, then writes trajectory CSVs for plotting.  The
impulsive-limit optimum coth(1) = 1.3130... is the benchmark every family
is judged against.
"""

import os

import numpy as np

from lincontrol import (
    build_exponential,
    build_polynomial,
    build_trigonometric,
    singular_solution,
    solve_sta,
    write_csv,
)

OUT = os.path.join(os.path.dirname(__file__), "output")
os.makedirs(OUT, exist_ok=True)

coth1 = 1.0 / np.tanh(1.0)
print(f"impulsive-limit benchmark cost: coth(1) = {coth1:.7f}\n")

print(f"{'family':>15} {'N':>3} {'free parameters':>42} {'cost':>10} {'excess':>8}")
for name, builder in (("polynomial", build_polynomial), ("trigonometric", build_trigonometric)):
    for N in (3, 4, 5, 6):
        sol = solve_sta(builder(N))
        params = ", ".join(
            f"{p}={sol.coefficients[p]:+.6f}" for p in ("a", "b", "c") if p in sol.coefficients
        )
        excess = 100 * (sol.cost / coth1 - 1)
        print(f"{name:>15} {N:>3} {params:>42} {sol.cost:>10.5f} {excess:>7.1f}%")
        write_csv(sol, os.path.join(OUT, f"sta_{name}_{N}.csv"), points=1001)

sol = solve_sta(build_exponential(100.0))
excess = 100 * (sol.cost / coth1 - 1)
print(f"{'exponential':>15} {'-':>3} {'k=100 (fully determined)':>42} {sol.cost:>10.6f} {excess:>7.1f}%")
write_csv(sol, os.path.join(OUT, "sta_exponential_k100.csv"), points=1001)

# the exponential family tracks the impulsive optimum because its rates
# match the optimal flow's modes; polynomials and sines oscillate instead
write_csv(singular_solution(1.0), os.path.join(OUT, "impulsive_optimum.csv"), points=1001)
print(f"\ntrajectory CSVs written to {OUT}/")
