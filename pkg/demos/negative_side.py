"""Attracting cycles on the negative half-line and the parity rule for c_n.

Run: python demos/negative_side.py   (about half a minute)
"""

from syracuse import published
from syracuse.attractors import attractor, scan_critical

for label, _, printed in published.TABLE1:
    a = attractor(label)
    m = a.multiplier
    print(f"{label:>4}: period {a.period:>2}, multiplier {float(getattr(m, 'mid', m)):.6f} (printed {printed})")

records, summary = scan_critical(range(-1, -120, -1))
print("\nindices n in (-120, 0) where the parity rule does not predict the attractor of c_n:")
for r in records:
    if r.label != published.negative_rule(r.n):
        print(f"  n = {r.n:>4}: rule says {published.negative_rule(r.n):<4} computed {r.label}")
print("orbits of c_n leaving the integer orbit of n:", summary["not_proche"])
