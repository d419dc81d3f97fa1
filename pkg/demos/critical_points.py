"""Critical points of the real extension and the fixed points around them.

Run: python demos/critical_points.py
"""

from syracuse.critical import critical_point, mu, nu, x1_fixed_point
from syracuse.maps import f_ext, fprime

print("critical points c_n (certified enclosures, 128 bits)")
for n in (1, 2, 3, 5, 7, 9, 13, -1, -2):
    c = critical_point(n)
    print(f"  c_{n:<3} = {float(c.value): .9f}   f'(c_n) contains 0: {fprime(c.enclosure).contains(0)}")

print("\nfixed points")
for fp in (mu(1), mu(3), nu(1), x1_fixed_point()):
    print(f"  {fp.label:<4} {float(fp.value): .9f}  multiplier {float(fp.multiplier.mid): .6f}  {fp.stability}")

c1 = critical_point(1).enclosure
x = c1
print("\norbit of c_1 settles on the 2-cycle near 1 and 2:")
for k in range(12):
    x = f_ext(x)
print("  f^12(c_1) =", x)
