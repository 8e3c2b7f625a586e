"""Gowers-Cauchy-Schwarz, the triangle inequality and the monotone chain,
checked on random band-limited measures."""
import numpy as np

from gowers import checks
from gowers.measures import cantor

rng = np.random.default_rng(0)

specs = [checks.random_trig_spec(rng, 2, real=False) for _ in range(4)]
r = checks.check_gcs(specs, 1, 4)
print(f"GCS, order 1: |<mu>| / prod ||mu_i||_U^2 = {r.measured:.4f}  ({r.status})")
r = checks.check_gcs([specs[0]] * 4, 1, 4)
print(f"GCS, equal family: ratio = {r.measured:.15f}  ({r.status})")

a, b = checks.random_trig_spec(rng, 2), checks.random_trig_spec(rng, 2)
for k in (2, 3):
    r = checks.check_triangle(a, b, k, checks.exact_radius(k, 2))
    print(f"triangle U^{k}: {r.details['lhs']:.4f} <= {r.details['rhs']:.4f}  ({r.status})")

r = checks.check_monotonicity(cantor(), 3, 16)
for row in r.details["levels"]:
    print(f"k={row['k']}: sum_c |D^(k-1)(0;c)|^2 = {row['power']:.6f} >= "
          f"|D^(k-1)(0;0)|^2 = {row['lower']:.6f}")

print("\nseeded suite:")
for res in checks.run_suite("all", seed=1, N=16, k=2, trials=1):
    print(f"  {res.check:20s} {res.status}  measured={res.measured:.3e}")
