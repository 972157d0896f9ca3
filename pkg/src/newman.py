"""Legendre symbols and the Newman three-term coefficient relation.

For the series sum a(n) q^n = f_3^2 / f_1^3 and a prime p >= 5 with
Delta = (p^2 - 1)/8, the relation checked here is written with every power
of p cleared, so each residual is an integer:

    p^3 a(p^2 n + Delta) - (alpha - p L(-2,p) L(n - Delta, p)) a(n) + a((n - Delta)/p^2)

and its iterate

    p^3 a(p^3 n + (p^4 - 1)/8) - alpha a(p n + Delta) + a(n/p).

The residuals are reported as computed; a nonzero residual refutes the
relation at that n.
"""
import logging
import random
from dataclasses import dataclass, field
from fractions import Fraction

from sympy import isprime, nextprime

from src.partitions import CoefficientTable
from src.series import EXACT, EtaQuotient, expand_quotient

logger = logging.getLogger(__name__)

MAX_LISTED_RESIDUALS = 20


class NewmanError(ValueError):
    pass


class InsufficientOrderError(NewmanError):
    def __init__(self, needed, available):
        super().__init__(f"table order {available} is too small; need more than {needed}")
        self.needed = needed
        self.available = available


def legendre(a, p):
    """Legendre symbol (a/p) by Euler's criterion."""
    if p < 3 or not isprime(p):
        raise NewmanError(f"Legendre symbol needs an odd prime, got {p}")
    a %= p
    if a == 0:
        return 0
    return 1 if pow(a, (p - 1) // 2, p) == 1 else -1


def _check_prime(p):
    if p < 5 or not isprime(p):
        raise NewmanError(f"expected a prime p >= 5, got {p}")


def delta(p):
    return (p * p - 1) // 8


def _require(table, index):
    if index >= table.order:
        raise InsufficientOrderError(index, table.order)


def _modulus(table):
    if table.backend.kind == 'parity':
        raise NewmanError("residuals need exact or residue coefficients, not parities")
    return table.backend.modulus


@dataclass(frozen=True)
class NewmanParams:
    """Parameters (r, s, q_dil, p) of f_1^r f_{q_dil}^s and a prime p."""

    r: int
    s: int
    q_dil: int
    p: int

    def __post_init__(self):
        if self.r == 0 or self.s == 0:
            raise NewmanError("r and s must be nonzero")
        if (self.r - self.s) % 2 == 0:
            raise NewmanError(f"r and s must differ in parity, got r={self.r}, s={self.s}")
        if not isprime(self.q_dil):
            raise NewmanError(f"dilation {self.q_dil} is not prime")
        _check_prime(self.p)
        if self.p == self.q_dil:
            raise NewmanError("p and the dilation prime must be distinct")
        shift = self.t * (self.p * self.p - 1)
        if shift < 0 or shift.denominator != 1:
            raise NewmanError(f"shift {shift} is not a nonnegative integer")

    @property
    def epsilon(self):
        return Fraction(self.r + self.s, 2)

    @property
    def t(self):
        return Fraction(self.r + self.s * self.q_dil, 24)

    @property
    def delta(self):
        return int(self.t * (self.p * self.p - 1))

    @property
    def theta(self):
        sign = -1 if ((1 - self.r - self.s) // 2) % 2 else 1
        return sign * 2 * Fraction(self.q_dil) ** self.s

    @property
    def quotient(self):
        return EtaQuotient(((1, self.r), (self.q_dil, self.s)))


def a_params(p):
    """The instance r=-3, s=2, q_dil=3 whose series is f_3^2 / f_1^3."""
    return NewmanParams(-3, 2, 3, p)


@dataclass(frozen=True)
class AlphaFit:
    p: int
    alpha: int
    omega_parity: int

    def to_dict(self):
        return {'p': self.p, 'alpha': self.alpha, 'omega_parity': self.omega_parity}


def closed_form_alpha(p, a_delta):
    return p ** 3 * a_delta + p * legendre(-2, p) * legendre(-delta(p), p)


def fit_alpha(p, table):
    """Closed-form alpha, cross-checked against the n = 0 instance of the relation."""
    _check_prime(p)
    if table.backend.kind != 'exact':
        raise NewmanError("alpha is fitted from an exact table")
    d = delta(p)
    _require(table, d)
    closed = closed_form_alpha(p, table[d])
    # n = 0: p^3 a(Delta) - (alpha - p L L) a(0) + a(-Delta/p^2) = 0
    numerator = p ** 3 * table[d] + table.value_at(Fraction(-d, p * p))
    if numerator % table[0]:
        raise NewmanError(f"n=0 fit for p={p} is not integral")
    fitted = numerator // table[0] + p * legendre(-2, p) * legendre(-d, p)
    if fitted != closed:
        raise NewmanError(f"alpha for p={p}: closed form {closed} disagrees with n=0 fit {fitted}")
    logger.debug(f"alpha({p}) = {closed}")
    return AlphaFit(p, closed, (table[d] + 1) % 2)


def newman_residual(p, n, table, alpha):
    _check_prime(p)
    modulus = _modulus(table)
    d = delta(p)
    _require(table, p * p * n + d)
    value = (p ** 3 * table[p * p * n + d]
             - (alpha - p * legendre(-2, p) * legendre(n - d, p)) * table[n]
             + table.value_at(Fraction(n - d, p * p)))
    return value % modulus if modulus else value


def newman_step3_residual(p, n, table, alpha):
    _check_prime(p)
    modulus = _modulus(table)
    d = delta(p)
    top = p ** 3 * n + (p ** 4 - 1) // 8
    _require(table, top)
    value = (p ** 3 * table[top]
             - alpha * table[p * n + d]
             + table.value_at(Fraction(n, p)))
    return value % modulus if modulus else value


def step3_order(p, n_max):
    return p ** 3 * n_max + (p ** 4 - 1) // 8 + 1


def newman_order(p, n_max):
    return p * p * n_max + delta(p) + 1


class NewmanRelation:
    """Newman's relation for a general (r, s, q_dil, p), in rational arithmetic.

    c(n p^2 + Delta) - gamma(n) c(n) + p^{2 eps - 2} c((n - Delta)/p^2), with
    gamma(n) = p^{2 eps - 2} alpha - (theta/p) p^{eps - 3/2} ((n - Delta)/p)
    and alpha fitted from n = 0.
    """

    def __init__(self, params, table=None, order=None):
        self.params = params
        if table is None:
            order = order or params.p ** 2 + params.delta + 1
            series = expand_quotient(params.quotient, order, EXACT)
            table = CoefficientTable(str(params.quotient), series)
        self.table = table
        self.alpha = self._fit_alpha()

    def _scale(self):
        return Fraction(self.params.p) ** (self.params.r + self.params.s - 2)

    def _character(self, n):
        prm = self.params
        theta = prm.theta
        half = Fraction(prm.p) ** ((prm.r + prm.s - 3) // 2)
        return legendre(theta.numerator * theta.denominator, prm.p) * half * legendre(n - prm.delta, prm.p)

    def _fit_alpha(self):
        prm = self.params
        _require(self.table, prm.delta)
        gamma0 = (self.table[prm.delta]
                  + self._scale() * self.table.value_at(Fraction(-prm.delta, prm.p ** 2))) / self.table[0]
        return (gamma0 + self._character(0)) / self._scale()

    def gamma(self, n):
        return self._scale() * self.alpha - self._character(n)

    def residual(self, n):
        prm = self.params
        _require(self.table, n * prm.p ** 2 + prm.delta)
        return (self.table[n * prm.p ** 2 + prm.delta]
                - self.gamma(n) * self.table[n]
                + self._scale() * self.table.value_at(Fraction(n - prm.delta, prm.p ** 2)))


def replication_moduli(count, bits=60, seed=None):
    """``count`` distinct primes in [2^(bits-1), 2^bits), reproducible from ``seed``."""
    rng = random.Random(seed)
    low, high = 1 << (bits - 1), 1 << bits
    moduli = []
    while len(moduli) < count:
        candidate = nextprime(rng.randrange(low, high))
        if candidate < high and candidate not in moduli:
            moduli.append(int(candidate))
    return moduli


@dataclass
class ResidualReport:
    p: int
    relation: str
    modulus: int | None
    n_max: int
    n_checked: int = 0
    zero_count: int = 0
    nonzero: list = field(default_factory=list)
    nonzero_count: int = 0

    @property
    def status(self):
        if self.nonzero_count:
            return 'refuted'
        return 'verified' if self.n_checked == self.n_max + 1 else 'insufficient-range'

    def to_dict(self):
        return {
            'p': self.p,
            'relation': self.relation,
            'modulus': self.modulus,
            'n_max': self.n_max,
            'n_checked': self.n_checked,
            'zero_count': self.zero_count,
            'nonzero_count': self.nonzero_count,
            'nonzero': [[n, str(value)] for n, value in self.nonzero],
            'status': self.status,
        }


RESIDUALS = {
    'newman': (newman_residual, newman_order),
    'step3': (newman_step3_residual, step3_order),
}


def scan_residuals(p, n_max, table, alpha, relation='newman'):
    """Evaluate one relation for n = 0..n_max, stopping early where the table ends."""
    if relation not in RESIDUALS:
        raise NewmanError(f"unknown relation '{relation}'")
    residual, needed = RESIDUALS[relation]
    modulus = _modulus(table)
    if modulus:
        alpha %= modulus
    report = ResidualReport(p, relation, modulus, n_max)
    for n in range(n_max + 1):
        if needed(p, n) > table.order:
            logger.warning(f"{relation} scan for p={p} stops at n={n - 1}: table order {table.order}")
            break
        value = residual(p, n, table, alpha)
        report.n_checked += 1
        if value == 0:
            report.zero_count += 1
            continue
        report.nonzero_count += 1
        if len(report.nonzero) < MAX_LISTED_RESIDUALS:
            report.nonzero.append((n, value))
    if report.nonzero_count:
        logger.warning(f"{relation} relation for p={p}: {report.nonzero_count} nonzero residuals "
                       f"out of {report.n_checked}")
    return report
