"""Detection boundaries in the (alpha, r) plane.

Below rho_star no test is asymptotically powerful. Max attains rho_max, which
only coincides with rho_star for alpha >= 3/4, and HC attains rho_star
everywhere. Random effects have their own boundary rho_rand for tau.

Run: python3 tutorials/04_boundaries.py
"""

from sparsedetect import boundary_table

print(f"{'alpha':>6} {'rho_star':>9} {'rho_max':>9} {'rho_rand':>9}  Max optimal?")
for row in boundary_table(0.55, 0.95, 0.05):
    optimal = "yes" if abs(row.rho_star - row.rho_max) < 1e-12 else "no"
    print(f"{row.alpha:6.2f} {row.rho_star:9.4f} {row.rho_max:9.4f} {row.rho_rand:9.4f}  {optimal}")

# The same table is available from the command line:
#   sparsedetect boundary-table --alpha-min 0.55 --alpha-max 0.95 --step 0.05
