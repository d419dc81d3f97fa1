"""Certified inequalities: critical point brackets, invariant intervals, the image chain.

Run: python demos/rigor_checks.py
"""

from syracuse import rigor

for n in (1, 2, 10, 500):
    c1, c2 = rigor.verify_lemma1(n), rigor.verify_lemma2(n)
    print(f"n = {n:<4} bracket {c1.verdict:<10} inclusion (a = 7/2) {c2.verdict}")

for cert in rigor.verify_invariant_intervals():
    print(f"{cert.claim:<20} {cert.params} -> {cert.verdict} ({cert.subdivisions} pieces)")

print("\nimage chain")
for cert in rigor.verify_theorem2_images():
    print(f"  {cert.params.get('claim', cert.params)}: {cert.verdict}")

print("\npolynomial conditions for the inclusion at n = 1, 2, 10:")
for n in (1, 2, 10):
    print(" ", n, rigor.lemma2_polynomial_conditions(n))
