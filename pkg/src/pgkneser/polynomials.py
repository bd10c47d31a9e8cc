"""Exact integer polynomials in q, the named bounds built from their
factored forms, and the audit that re-adds each displayed sum."""
from __future__ import annotations

from dataclasses import dataclass
from itertools import zip_longest


class IntPolynomial:
    """Univariate polynomial with Python-int coefficients (index = power of q)."""

    __slots__ = ("coeffs",)

    def __init__(self, coeffs=()):
        cs = [int(c) for c in coeffs]
        while cs and cs[-1] == 0:
            cs.pop()
        self.coeffs = tuple(cs)

    @classmethod
    def q(cls) -> "IntPolynomial":
        return cls((0, 1))

    @classmethod
    def const(cls, c: int) -> "IntPolynomial":
        return cls((c,))

    @staticmethod
    def _lift(x) -> "IntPolynomial":
        return x if isinstance(x, IntPolynomial) else IntPolynomial((x,))

    @property
    def degree(self) -> int:
        return len(self.coeffs) - 1

    @property
    def leading(self) -> int:
        return self.coeffs[-1] if self.coeffs else 0

    def __add__(self, other):
        other = self._lift(other)
        return IntPolynomial(a + b for a, b in zip_longest(self.coeffs, other.coeffs, fillvalue=0))

    __radd__ = __add__

    def __neg__(self):
        return IntPolynomial(-c for c in self.coeffs)

    def __sub__(self, other):
        return self + (-self._lift(other))

    def __rsub__(self, other):
        return self._lift(other) - self

    def __mul__(self, other):
        other = self._lift(other)
        out = [0] * (len(self.coeffs) + len(other.coeffs))
        for i, a in enumerate(self.coeffs):
            if a:
                for j, b in enumerate(other.coeffs):
                    out[i + j] += a * b
        return IntPolynomial(out)

    __rmul__ = __mul__

    def __pow__(self, k: int):
        if k < 0:
            raise ValueError("negative power")
        out, base = IntPolynomial((1,)), self
        while k:
            if k & 1:
                out = out * base
            base = base * base
            k >>= 1
        return out

    def __eq__(self, other):
        if isinstance(other, int):
            other = IntPolynomial((other,))
        return isinstance(other, IntPolynomial) and self.coeffs == other.coeffs

    def __hash__(self):
        return hash(self.coeffs)

    def __call__(self, x: int) -> int:
        acc = 0
        for c in reversed(self.coeffs):
            acc = acc * x + c
        return acc

    def __repr__(self):
        return f"IntPolynomial({list(self.coeffs)})"

    def __str__(self):
        if not self.coeffs:
            return "0"
        terms = []
        for i in range(len(self.coeffs) - 1, -1, -1):
            c = self.coeffs[i]
            if not c:
                continue
            mag = abs(c)
            if i == 0:
                body = str(mag)
            else:
                var = "q" if i == 1 else f"q^{i}"
                body = var if mag == 1 else f"{mag}*{var}"
            terms.append(("- " if c < 0 else "+ ") + body)
        s = " ".join(terms)
        return s[2:] if s.startswith("+ ") else "-" + s[2:]

    def positive_root_bound(self) -> int:
        """Integer above every real root (Cauchy bound)."""
        if self.degree < 1:
            return 0
        lead = abs(self.leading)
        return 1 + max(-(-abs(c) // lead) for c in self.coeffs[:-1])


q = IntPolynomial.q()
lam = q**2 + q + 1


def bound_polynomials() -> dict[str, IntPolynomial]:
    """Every named bound, expanded from its factored or stated form."""
    B = {}
    B["alpha"] = (q**2 + q + 1) * (q**3 + 2 * q**2 + q + 1) * (q + 1) ** 2
    B["beta"] = IntPolynomial([36, 75, 195, 261, 290, 133, 4, 1])
    B["gamma"] = IntPolynomial([473, 1225, 2755, 3910, 3914, 2379, 750])
    B["delta"] = IntPolynomial([1, 1, 4, 9, 4])
    B["lambda"] = lam
    B["family_size"] = (q**2 + q + 1) * (q**3 + 2 * q**2 + q + 1)
    B["hoffman_numerator"] = (q**4 + q**3 + q**2 + q + 1) * (q**3 + q**2 + q + 1) * lam * (q + 1)
    B["z_B"] = lam * (8 * q**4 + 14 * q**3 + 16 * q**2 + 10 * q + 6)
    B["z_A"] = IntPolynomial([3, 3, 8, 11, 12, 2])
    B["y_B"] = lam * (8 * q**4 + 19 * q**3 + 15 * q**2 + 5 * q + 3)
    B["y_A"] = IntPolynomial([0, 0, 4, 8, 12, 6])
    B["x_A"] = IntPolynomial([8, 17, 44, 58, 65, 30])
    B["x_B"] = IntPolynomial([116, 300, 676, 959, 959, 583, 184])
    B["W_A"] = IntPolynomial([35, 71, 184, 243, 272, 122])
    B["W_B"] = IntPolynomial([470, 1216, 2736, 3876, 3874, 2354, 744])
    B["hilton_milner_a"] = IntPolynomial([1, 2, 4, 4, 3, 1])
    B["weight_q1_chambers_B"] = 2 * B["hilton_milner_a"] * (q + 1)
    B["weight_q1_chambers_A"] = 2 * (q**4 + q**3 + q**2) * (q + 1)
    B["full_weight_cap_A"] = (q**3 + q**2 + q + 1) * lam + q**2 * (q + 1)
    B["case_B_stated"] = IntPolynomial([710, 1783, 3589, 4605, 4362, 2551, 824])
    B["lines_meeting_planes_line"] = q**2 * q**2 + (q + 1) * (q**3 + q**2 + q) + 1
    B["lines_meeting_planes_point"] = (q**2 + q) * (q**2 + q) + (q**3 + q**2 + q + 1)
    return B


@dataclass
class IdentityCheck:
    claim_id: str
    anchor: str
    computed: IntPolynomial
    stated: IntPolynomial
    expect_equal: bool = True

    @property
    def equal(self) -> bool:
        return self.computed == self.stated

    @property
    def status(self) -> str:
        if self.expect_equal:
            return "pass" if self.equal else "fail"
        return "finding" if not self.equal else "pass"


def identity_checks() -> list[IdentityCheck]:
    """Re-add the summands behind each bound and compare with the stated total."""
    B = bound_polynomials()
    L = lam
    lines_meeting_line = 1 + (q + 1) * (q**3 + q**2 + q)
    out = []

    zb_sum = 2 * (B["lines_meeting_planes_line"] * L) + 2 * (
        (q**2 + q + 1) * (q + 1) * L * (q + 1) + lines_meeting_line * L
    )
    out.append(IdentityCheck("z_B_sum", "2*(lines meeting two planes)*lambda + 2*(case b (iii) bound) = z_B", zb_sum, B["z_B"]))

    za_b = (q**2 + q - 1) * (q + 1) * q**2 + (q**2 + q + 1) * q**2 + lines_meeting_line
    za_d = ((q**2 + q + 1) + (q + 1) ** 2) * q**2
    za_sum = B["lines_meeting_planes_line"] + 2 * za_b + za_d
    out.append(IdentityCheck("z_A_sum", "case a + 2*case b + case d (lambda = 1) = z_A", za_sum, B["z_A"]))

    y1 = 2 * (2 * q**4 + 5 * q**3 + 3 * q**2) + 3 * (q + 1) * (q**3 + q**2)
    out.append(IdentityCheck("y_B_Y1", "|Y_1| <= 2(#a) + 3(q+1)(q^3+q^2) in units of lambda", y1, IntPolynomial([0, 0, 9, 16, 7])))
    yb_sum = 2 * (q**2 + q + 1) * L + (q**2 + q + 1) * (q + 1) ** 2 * L + y1 * L
    out.append(IdentityCheck("y_B_sum", "|Y_3| + |Y_2| + |Y_1| = y_B", yb_sum, B["y_B"]))

    n_a2 = (q + 1) * (q**2 + q + 1) * q**2
    ya_sum = 2 * (q**2 + q + 1) * q**2 + 2 * n_a2 + 2 * (2 * q + 1) * (q**2 + q) * q**2
    out.append(IdentityCheck("y_A_sum", "case A2, sigma in S_0: |Y_2| + 2n + 2(2q+1)(q^2+q)q^2 = y_A", ya_sum, B["y_A"]))

    x1_a = 3 * ((q**2 + q + 1) * (q**3 + q**2 + q + 1) + (q + 1) * (q**2 + q + 1) ** 2)
    out.append(IdentityCheck("x_A_X1", "case A1 |X_1| bound", x1_a, IntPolynomial([6, 15, 24, 24, 15, 6])))
    xa_sum = 2 * (q**2 + 1) * (q**2 + q + 1) + 4 * B["y_A"] + x1_a
    out.append(IdentityCheck("x_A_sum", "|X_3| + 4y_A + |X_1| = x_A (lambda = 1)", xa_sum, B["x_A"]))

    y, z = B["y_B"], B["z_B"]
    x1_b = 3 * (
        y
        + (q**3 + q**2 + q + 1) * L + 2 * (q**2 + q + 1) + y + z + y
        + (q**2 + q + 1)
        + (q**2 + q + 1) * L * (q + 1) ** 2
        + (q + 1) ** 2 * L * (q**2 + q + 1) + (q + 1) * (q**2 + q + 1) * L
        + 2 * z
    )
    out.append(IdentityCheck("x_B_X1", "case B |X_1| bound", x1_b, IntPolynomial([102, 264, 576, 795, 783, 471, 150])))
    xb_sum = 2 * (q**2 + 1) * (q**2 + q + 1) * L + 4 * y + x1_b
    out.append(IdentityCheck("x_B_sum", "|X_3| + 4y_B + |X_1| = x_B", xb_sum, B["x_B"]))

    out.append(IdentityCheck("W_A", "4*x_A + z_A = W bound, case A", 4 * B["x_A"] + B["z_A"], B["W_A"]))
    out.append(IdentityCheck("W_B", "4*x_B + z_B = W bound, case B", 4 * B["x_B"] + B["z_B"], B["W_B"]))

    beta_sum = B["full_weight_cap_A"] * (q + 1) ** 2 + B["weight_q1_chambers_A"] + B["W_A"]
    out.append(IdentityCheck("beta_sum", "case A: cap*(q+1)^2 + 2(q^4+q^3+q^2)(q+1) + W_A = beta", beta_sum, B["beta"]))

    gamma_sum = B["delta"] * (q + 1) ** 2 + B["weight_q1_chambers_B"] + B["W_B"]
    out.append(IdentityCheck("gamma_sum", "case B: delta*(q+1)^2 + 2a(q+1) + W_B = gamma", gamma_sum, B["gamma"]))
    out.append(
        IdentityCheck(
            "gamma_vs_stated_case_B",
            "case B summands vs the stated 824q^6 + 2551q^5 + ... bound",
            gamma_sum,
            B["case_B_stated"],
            expect_equal=False,
        )
    )

    alpha_expanded = IntPolynomial([1, 4, 9, 14, 15, 11, 5, 1])
    out.append(IdentityCheck("alpha_expansion", "(q^2+q+1)(q^3+2q^2+q+1)(q+1)^2 expanded", B["alpha"], alpha_expanded))
    out.append(
        IdentityCheck(
            "blowup_size",
            "alpha = family_size * (q+1)^2",
            B["family_size"] * (q + 1) ** 2,
            B["alpha"],
        )
    )
    return out


def dominance_checks(q_max: int = 1000) -> dict[str, bool]:
    """Case bounds the proofs replace by a larger one, checked for q = 2..q_max."""
    L = lam
    a_case = bound_polynomials()["lines_meeting_planes_line"]
    p_case = bound_polynomials()["lines_meeting_planes_point"]
    lines_meeting_line = 1 + (q + 1) * (q**3 + q**2 + q)
    b_i = q**2 * (q + 1) * L * (q + 1) + lines_meeting_line * L
    b_ii = (q**2 + q) * (q + 1) * L * (q + 1) + lines_meeting_line * L
    b_iii = (q**2 + q + 1) * (q + 1) * L * (q + 1) + lines_meeting_line * L
    y_a1 = 2 * (q**2 + q + 1) * (q**3 + q**2 + q + 1)
    y_a2_line = 2 * ((q + 1) * (q**2 + q) + 1) * q**2
    y_A = bound_polynomials()["y_A"]
    rng = range(2, q_max + 1)
    return {
        "z_B_case_a_point_le_line": all(p_case(t) <= a_case(t) for t in rng),
        "z_B_case_b_subcases_le_iii": all(b_i(t) <= b_iii(t) and b_ii(t) <= b_iii(t) for t in rng),
        "y_A_covers_A1": all(y_a1(t) <= y_A(t) for t in rng),
        "y_A_covers_A2_line": all(y_a2_line(t) <= y_A(t) for t in rng),
    }


@dataclass
class Threshold:
    smallest_q: int
    first_q: int
    smallest_prime_power: int
    beta_threshold: int
    gamma_threshold: int
    verified_up_to: int


def _is_prime_power(n: int) -> bool:
    if n < 2:
        return False
    p = next(k for k in range(2, n + 1) if n % k == 0)
    while n % p == 0:
        n //= p
    return n == 1


def _eventual_threshold(diff: IntPolynomial) -> tuple[int, int]:
    """Smallest integer q >= 2 from which ``diff(t) > 0`` for every t >= q."""
    top = max(diff.positive_root_bound(), 2)
    last_bad = 1
    for t in range(2, top + 1):
        if diff(t) <= 0:
            last_bad = t
    return last_bad + 1, top


def threshold_q() -> Threshold:
    """Where alpha overtakes both beta and gamma for good."""
    B = bound_polynomials()
    tb, top_b = _eventual_threshold(B["alpha"] - B["beta"])
    tg, top_g = _eventual_threshold(B["alpha"] - B["gamma"])
    t = max(tb, tg)
    pp = next(n for n in range(t, 10 * t) if _is_prime_power(n))
    a, b, g = B["alpha"], B["beta"], B["gamma"]
    first = next(n for n in range(2, t + 1) if a(n) > max(b(n), g(n)))
    return Threshold(t, first, pp, tb, tg, max(top_b, top_g))
