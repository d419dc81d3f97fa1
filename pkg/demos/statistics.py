"""Mean contraction tau, Crandall's product and discrepancy of orbit residues.

Run: python demos/statistics.py
"""

import math

from syracuse import stats
from syracuse.integer import flight_time_stats, range_verify

tc = stats.tau_constant(128)
print(f"tau = {float(tc.tau.mid):.12f}   quadrature agrees to {float(tc.agreement):.1e}")
print(f"ln tau = {float(tc.ln_tau.mid):.7f}")
for k in (1, 5, 10, 30):
    print(f"Crandall product k = {k:>2}: {stats.crandall_product(k):.10f}")

res = stats.growth_experiment(stats.random_starts(40, 1e3, 1e5, seed=1), 100)
print("\nreal starts:", {k: res["summary"][k] for k in ("samples", "violations", "mean_growth", "mean_discrepancy")})
res = stats.growth_experiment(range(10**5, 10**5 + 40), 60)
print("integer starts:", {k: res["summary"][k] for k in ("samples", "violations", "mean_growth", "mean_discrepancy")})
print(f"ln tau = {math.log(stats.TAU):.5f}, ln(sqrt3/2) = {math.log(math.sqrt(3) / 2):.5f}")

print("\n", range_verify(10**6).as_json())
st = flight_time_stats(range(10**6, 10**6 + 2000))
print(f"mean flight {st['mean']:.2f} (predicted {st['predicted']:.2f}), mean speed {st['mean_speed']:.4f}")
