import pytest
from hypothesis import given
from hypothesis import strategies as st

from pgkneser.polynomials import IntPolynomial, bound_polynomials, dominance_checks, identity_checks, threshold_q

coeffs = st.lists(st.integers(-50, 50), max_size=6).map(IntPolynomial)


@given(coeffs, coeffs, coeffs, st.integers(-20, 20))
def test_ring_laws_and_evaluation(a, b, c, x):
    assert (a + b) * c == a * c + b * c
    assert (a * b)(x) == a(x) * b(x)
    assert (a - a) == IntPolynomial()
    assert (a + b)(x) == a(x) + b(x)


def test_pow_and_str():
    q = IntPolynomial.q()
    assert (q + 1) ** 2 == IntPolynomial([1, 2, 1])
    assert str(q**2 + 3) == "q^2 + 3"


def test_positive_root_bound():
    p = IntPolynomial([-100, 0, 1])  # root 10
    r = p.positive_root_bound()
    assert r >= 10 and all(p(t) > 0 for t in range(r + 1, r + 50))


BOUND_VALUES = {
    ("alpha", 2): 1197, ("alpha", 3): 10192, ("beta", 2): 12334, ("gamma", 2): 231975,
    ("z_B", 2): 2310, ("z_B", 3): 15678, ("z_A", 2): 385, ("z_A", 3): 1839,
    ("y_B", 2): 2471, ("x_B", 2): 56868, ("x_A", 2): 2682, ("y_A", 2): 464, ("delta", 2): 155,
    ("lines_meeting_planes_line", 2): 59, ("lines_meeting_planes_point", 2): 51,
}


@pytest.mark.parametrize("key,val", BOUND_VALUES.items())
def test_bound_values(key, val):
    name, q = key
    assert bound_polynomials()[name](q) == val


def test_alpha_expansion():
    assert bound_polynomials()["alpha"] == IntPolynomial([1, 4, 9, 14, 15, 11, 5, 1])


def test_identity_audit():
    checks = {c.claim_id: c for c in identity_checks()}
    for cid, c in checks.items():
        if cid == "gamma_vs_stated_case_B":
            assert c.status == "finding" and not c.equal
        else:
            assert c.status == "pass", cid
    assert checks["gamma_vs_stated_case_B"].stated.leading == 824


def test_dominance():
    assert all(dominance_checks(200).values())


def test_threshold():
    t = threshold_q()
    assert t.smallest_q == t.first_q == 749
    assert t.smallest_prime_power == 751
    B = bound_polynomials()
    for x in (748, 749, 750):
        assert (B["alpha"](x) > max(B["beta"](x), B["gamma"](x))) == (x >= 749)
