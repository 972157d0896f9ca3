"""Ramanujan theta functions as exact series, plus identity checkers."""
import logging
from dataclasses import dataclass

from src.series import (
    EXACT, EtaQuotient, Series, divide, eta_series, expand_quotient, first_mismatch, mul,
)

logger = logging.getLogger(__name__)


class ThetaError(ValueError):
    pass


@dataclass(frozen=True)
class ThetaSpecialization:
    """f(a, b) with a = sign_a * q^exp_a and b = sign_b * q^exp_b."""

    sign_a: int
    exp_a: int
    sign_b: int
    exp_b: int

    def __post_init__(self):
        if self.sign_a not in (1, -1) or self.sign_b not in (1, -1):
            raise ThetaError(f"signs must be +1 or -1, got {self.sign_a}, {self.sign_b}")
        if self.exp_a < 1 or self.exp_b < 1:
            raise ThetaError(f"exponents must be positive, got {self.exp_a}, {self.exp_b}")

    def __str__(self):
        def term(sign, exp):
            return f"{'-' if sign < 0 else ''}q^{exp}"
        return f"f({term(self.sign_a, self.exp_a)}, {term(self.sign_b, self.exp_b)})"


PHI_SPEC = ThetaSpecialization(1, 1, 1, 1)
PSI_SPEC = ThetaSpecialization(1, 1, 1, 3)
EULER_SPEC = ThetaSpecialization(-1, 1, -1, 2)

PHI_QUOTIENT = EtaQuotient(((2, 5), (1, -2), (4, -2)))
PSI_QUOTIENT = EtaQuotient(((2, 2), (1, -1)))


@dataclass(frozen=True)
class IdentityCheck:
    name: str
    order: int
    first_mismatch: int | None

    @property
    def holds(self):
        return self.first_mismatch is None

    def __bool__(self):
        return self.holds

    def to_dict(self):
        return {
            'name': self.name,
            'order': self.order,
            'holds': self.holds,
            'first_mismatch': self.first_mismatch,
        }


def _check_order(order):
    if order < 1:
        raise ThetaError("empty truncation: order must be at least 1")


def _apply_binomials(factors, order):
    # Multiply 1 by each (1 + sign * q^exp) in turn
    res = [1] + [0] * (order - 1)
    for sign, exp in factors:
        if exp >= order:
            continue
        res[exp:] = [x + sign * y for x, y in zip(res[exp:], res[:order - exp])]
    return res


def phi(order):
    """Sum over all integers n of q^{n^2}."""
    _check_order(order)
    coeffs = [0] * order
    coeffs[0] = 1
    n = 1
    while n * n < order:
        coeffs[n * n] = 2
        n += 1
    return Series.from_coefficients(coeffs, EXACT, order)


def psi(order):
    """Sum over n >= 0 of q^{n(n+1)/2}."""
    _check_order(order)
    coeffs = [0] * order
    n = 0
    while n * (n + 1) // 2 < order:
        coeffs[n * (n + 1) // 2] = 1
        n += 1
    return Series.from_coefficients(coeffs, EXACT, order)


def f_minus_q(order):
    return theta_series(EULER_SPEC, order)


def theta_series(spec, order):
    """Bilateral sum of a^{n(n+1)/2} b^{n(n-1)/2} over n in Z.

    The q-exponent grows with |n| in both directions, so each side stops at
    the first term at or beyond ``order``.
    """
    _check_order(order)
    coeffs = [0] * order
    for start, step in ((0, 1), (-1, -1)):
        n = start
        while True:
            up, down = n * (n + 1) // 2, n * (n - 1) // 2
            exponent = spec.exp_a * up + spec.exp_b * down
            if exponent >= order:
                break
            sign = 1
            if spec.sign_a < 0 and up % 2:
                sign = -sign
            if spec.sign_b < 0 and down % 2:
                sign = -sign
            coeffs[exponent] += sign
            n += step
    return Series.from_coefficients(coeffs, EXACT, order)


def triple_product(spec, order):
    """(-a; ab)_inf (-b; ab)_inf (ab; ab)_inf expanded to ``order``."""
    _check_order(order)
    c = spec.sign_a * spec.sign_b
    d = spec.exp_a + spec.exp_b
    factors = []
    j = 0
    while spec.exp_a + d * j < order or spec.exp_b + d * j < order:
        cj = c ** j
        factors.append((spec.sign_a * cj, spec.exp_a + d * j))
        factors.append((spec.sign_b * cj, spec.exp_b + d * j))
        if j >= 1:
            factors.append((-cj, d * j))
        j += 1
    j = max(j, 1)
    while d * j < order:
        factors.append((-(c ** j), d * j))
        j += 1
    return Series.from_coefficients(_apply_binomials(factors, order), EXACT, order)


def jtp_check(spec, order):
    """Compare both sides of Jacobi's triple product for one specialization."""
    mismatch = first_mismatch(theta_series(spec, order), triple_product(spec, order))
    if mismatch is not None:
        logger.warning(f"Triple product for {spec} fails at q^{mismatch}")
    return IdentityCheck(f"jtp {spec}", order, mismatch)


def _odd_pochhammer(sign, order):
    # prod_{j>=0} (1 + sign * q^{2j+1})
    factors = [(sign, e) for e in range(1, order, 2)]
    return Series.from_coefficients(_apply_binomials(factors, order), EXACT, order)


def identity_checks(order):
    """Series forms of phi, psi and f(-q) against their eta-quotient and product forms."""
    _check_order(order)
    f2 = eta_series(2, order, EXACT)
    plus_odd = _odd_pochhammer(1, order)
    minus_odd = _odd_pochhammer(-1, order)
    pairs = [
        ('phi = f2^5/(f1^2 f4^2)', phi(order), expand_quotient(PHI_QUOTIENT, order)),
        ('psi = f2^2/f1', psi(order), expand_quotient(PSI_QUOTIENT, order)),
        ('f(-q) = f1', f_minus_q(order), eta_series(1, order, EXACT)),
        ('phi = f(q,q)', phi(order), theta_series(PHI_SPEC, order)),
        ('psi = f(q,q^3)', psi(order), theta_series(PSI_SPEC, order)),
        ('phi = (-q;q^2)^2 (q^2;q^2)', phi(order), mul(mul(plus_odd, plus_odd), f2)),
        ('psi = (q^2;q^2)/(q;q^2)', psi(order), divide(f2, minus_odd)),
    ]
    checks = [IdentityCheck(name, order, first_mismatch(left, right)) for name, left, right in pairs]
    logger.info(f"Theta identities to order {order}: {sum(c.holds for c in checks)}/{len(checks)} hold")
    return checks
