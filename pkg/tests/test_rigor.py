import json
import math
import random
from fractions import Fraction

import pytest

from syracuse import rigor, stats
from syracuse.errors import PreconditionViolated
from syracuse.kernel import Ball


def test_lemma1_small_range():
    for n in range(1, 301):
        assert rigor.verify_lemma1(n).certified, n


def test_lemma2_examples():
    c1 = rigor.verify_lemma2(1)
    assert c1.certified
    assert c1.values["f(right)"].startswith("2.013")
    assert rigor.verify_lemma2(5, Fraction(4)).certified
    for n in range(1, 301):
        assert rigor.verify_lemma2(n).certified, n


def test_lemma2_parameter_guard():
    for a in (Fraction(27, 8), 6, 2):
        with pytest.raises(ValueError):
            rigor.verify_lemma2(3, a)


def test_lemma2_detects_genuine_failure():
    """a = 4 at n = 1: the right end point maps below f(1) = 2, so the inclusion breaks."""
    x = 1 + 4 / math.pi**2
    assert x + 0.25 - (x / 2 + 0.25) * math.cos(math.pi * x) < 2
    assert rigor.verify_lemma2(1, Fraction(4)).verdict == rigor.FAILED
    assert rigor.verify_lemma2(2, Fraction(5)).verdict == rigor.FAILED


def test_polynomial_conditions():
    # B < 0 from n = 2 on (the even case starts at n = 2); C < 0 exactly from n = 10 on,
    # n <= 9 being the cases settled numerically
    for n in range(1, 200):
        cond = rigor.lemma2_polynomial_conditions(n, Fraction(7, 2))
        assert cond["B_negative"] == (n >= 2)
        assert cond["C_negative"] == (n >= 10)
    pi2 = math.pi**2
    assert float(rigor.lemma2_polynomial_conditions(2)["B"].mid) == pytest.approx(49 / 2 - 13 * pi2)


def test_certified_verdicts_reproduce_at_double_precision():
    for n in (1, 2, 7, 13, 999):
        assert rigor.verify_lemma2(n, bits=256).certified
        assert rigor.verify_lemma1(n, bits=256).certified
    assert all(c.certified for c in rigor.verify_theorem2_images(256))


def test_invariant_intervals():
    certs = rigor.verify_invariant_intervals()
    assert [c.params["interval"] for c in certs[:4]] == ["[0, mu1]", "[mu1, mu3]", "[-1, 0]", "[nu1, -1]"]
    assert all(c.certified for c in certs)
    assert certs[4].params["direction"] == "increasing"
    # mu3 lies outside [0, mu1]
    vals = certs[0].values
    assert float(vals["hi"]) < 2.445


def test_theorem2_values():
    v = rigor.theorem2_values()
    expected = {
        "f3(c13)": 5.0249,
        "f7(c13)": 1.0184,
        "f4(16+7/(32pi^2))": 1.0227,
        "f3(40+7/(80pi^2))": 5.0118,
        "f7(40+7/(80pi^2))": 1.0047,
        "f6(20+7/(40pi^2))": 1.023691,
    }
    for key, value in expected.items():
        assert abs(float(v[key].mid) - value) < 1e-4, key
    certs = rigor.verify_theorem2_images()
    assert len(certs) == 6 and all(c.certified for c in certs)


def test_lemma2_chain_and_unimodality():
    assert rigor.verify_lemma2_chain(7, 20).certified
    for n in range(1, 101, 2):
        assert rigor.verify_unimodality(n).certified
    with pytest.raises(ValueError):
        rigor.verify_unimodality(4)


def test_certificate_json():
    cert = rigor.verify_lemma2(3)
    js = cert.as_json()
    assert set(js) >= {"claim", "params", "verdict", "bits", "subdivisions"}
    assert js["params"]["a"] == "7/2"
    json.loads(rigor.certificates_json([cert]))


def test_certify_sign_budget_and_failure():
    from syracuse.maps import fprime_centered
    from gmpy2 import mpfr

    verdict, used = rigor.certify_sign(fprime_centered, mpfr(1, 128), mpfr(2, 128), 1, 128)
    assert verdict == rigor.FAILED  # f' < 0 just right of c_1
    verdict, used = rigor.certify_sign(fprime_centered, mpfr(0, 128), mpfr("1.18", 128), 1, 128, budget=2)
    assert verdict == rigor.INCONCLUSIVE and used == 3


# -- Theorems 5 and 6 ------------------------------------------------------------


def test_theorem5_constant_parity_segment():
    seg = stats.orbit_segment(10**6 + 0.5, 100)
    out = rigor.check_theorem5(seg)
    assert out["holds"] and out["n"] == 100


def test_theorem5_random_segments():
    rng = random.Random(2024)
    for _ in range(60):
        seg = stats.orbit_segment(rng.uniform(1e3, 1e4), 200)
        assert rigor.check_theorem5(seg)["holds"]


def test_theorem5_tiny_m():
    seg = stats.orbit_segment(0.4, 1)
    out = rigor.check_theorem5(seg)
    assert out["rhs"] >= -math.log(1 - 1 / 1.2) > 1.79
    assert out["holds"]
    with pytest.raises(PreconditionViolated):
        rigor.check_theorem5(stats.orbit_segment(0.3, 1))


def test_theorem6_bound_and_threshold():
    tau = stats.TAU
    assert rigor.theorem6_threshold() == pytest.approx(4.97, abs=0.01)
    assert rigor.theorem6_bound(2) == pytest.approx(math.log(1 + (1 - tau) / (2 * tau)) / (2 * math.log(3)))
    assert rigor.theorem6_bound(1 + 1e-12) < 1e-12
    with pytest.raises(ValueError):
        rigor.theorem6_bound(1)
    # 2^k - 1 climbs for k odd steps: every residue is 1
    k = 20
    x, prefix = 2**k - 1, []
    for _ in range(k):
        prefix.append(x)
        x = (3 * x + 1) // 2
    out = rigor.check_theorem6(prefix[5:], 2)
    assert out["discrepancy"] == 0.5 and out["exceeds"]
    with pytest.raises(PreconditionViolated):
        rigor.check_theorem6([3, 100], 2)
