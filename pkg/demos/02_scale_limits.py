"""
Large populations: the Poisson limit of contest design
======================================================

Fix the budget-to-cost ratio V/c and let the population n grow. The
equilibrium number of entrants lambda = n * p stabilises, and the design
problem converges to a limit object where the binomial "how many beat me"
count becomes Poisson(lambda).
"""

from contest_forge import (
    asymptotic_scan,
    finite_to_limit_convergence,
    poisson_limit,
)

# V/c = 5: solve the finite design at doubling n and compare lambda*
# against the limit solution.
table = finite_to_limit_convergence(5.0, 1.0, [50, 100, 200, 400, 800, 1600])
print(f"limit: lambda* = {table.limit.lambda_star:.6f}, j* = {table.limit.j_star}")
print("\n    n   j*   lambda*_n      gap")
for row in table.rows:
    print(f"{row.n:5d}  {row.j_star:3d}  {row.lambda_star:.6f}  {row.gap:.2e}")

# At V/c = 2 the limit is exactly solvable: winner-take-all with
# lambda* = ln 2. A one-line check that the numerics land on it.
limit2 = poisson_limit(1.0, 0.5)
print(f"\nV/c = 2: lambda* = {limit2.lambda_star:.12f}  (ln 2 = 0.693147180560)")

# How fast do j* and lambda* approach the scale vc = V/c? The gaps grow
# like sqrt(vc/ln vc) and sqrt(vc ln vc); the scan reports the ratios,
# which stay order one across two decades of scale.
print("\n    vc      n    j*   lambda*     r_j   r_lambda")
for row in asymptotic_scan(1.0, [100.0, 1000.0, 10000.0]):
    print(f"{row.vc:7.0f} {row.n:6d} {row.j_star:5d} {row.lambda_star:9.2f}"
          f" {row.r_j:7.3f} {row.r_lambda:9.3f}")
