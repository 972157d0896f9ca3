"""Partition enumeration, the PEND rule and coefficient tables for pend, a and p."""
import logging
from collections import Counter
from dataclasses import dataclass
from fractions import Fraction

from config.settings import settings
from src.series import A_QUOTIENT, EXACT, P_QUOTIENT, PEND_QUOTIENT, expand_quotient, reduce

logger = logging.getLogger(__name__)

TABLE_QUOTIENTS = {
    'pend': PEND_QUOTIENT,
    'a': A_QUOTIENT,
    'p': P_QUOTIENT,
}


class PartitionError(ValueError):
    pass


def enumerate_partitions(n, limit=None):
    """Yield every partition of ``n`` once, as non-increasing tuples.

    Order is reverse lexicographic: ``(n,)`` first, all ones last.
    """
    limit = settings.ENUMERATION_LIMIT if limit is None else limit
    if n < 0:
        raise PartitionError(f"cannot partition a negative integer ({n})")
    if n > limit:
        raise PartitionError(f"full enumeration is guarded at n <= {limit}, got {n}")
    if n == 0:
        yield ()
        return
    x = [1] * (n + 1)
    x[1] = n
    m = h = 1
    yield (n,)
    while x[1] != 1:
        if x[h] == 2:
            m += 1
            x[h] = 1
            h -= 1
        else:
            r = x[h] - 1
            t = m - h + 1
            x[h] = r
            while t >= r:
                h += 1
                x[h] = r
                t -= r
            if t == 0:
                m = h
            else:
                m = h + 1
                if t > 1:
                    h += 1
                    x[h] = t
        yield tuple(x[1:m + 1])


def count_partitions(n, limit=None):
    return sum(1 for _ in enumerate_partitions(n, limit))


def is_pend(parts):
    """True when no even part value occurs exactly once."""
    return all(count >= 2 for part, count in Counter(parts).items() if part % 2 == 0)


def pend_bruteforce(n, limit=None):
    return sum(1 for parts in enumerate_partitions(n, limit) if is_pend(parts))


@dataclass(frozen=True)
class CoefficientTable:
    """Coefficients of one of the named generating functions (pend, a or p)."""

    kind: str
    series: object

    @property
    def backend(self):
        return self.series.backend

    @property
    def order(self):
        return self.series.order

    @property
    def values(self):
        return self.series.coefficients()

    def __len__(self):
        return self.series.order

    def __getitem__(self, n):
        return self.series[n]

    def value_at(self, x):
        """Coefficient at ``x``, taken as 0 when x is negative or not an integer."""
        x = Fraction(x)
        if x < 0 or x.denominator != 1:
            return 0
        n = int(x)
        if n >= self.order:
            raise PartitionError(f"index {n} is beyond the {self.kind} table order {self.order}")
        return self.series[n]

    def reduce(self, modulus):
        return CoefficientTable(self.kind, reduce(self.series, modulus))

    def to_parity(self):
        return CoefficientTable(self.kind, self.series.to_parity())

    def truncate(self, order):
        return CoefficientTable(self.kind, self.series.truncate(order))


def build_table(kind, order, backend=EXACT):
    if kind not in TABLE_QUOTIENTS:
        raise PartitionError(f"unknown table kind '{kind}'")
    if order < 1:
        raise PartitionError("table order must be at least 1")
    logger.info(f"Building {kind} table to order {order} ({backend.tag})")
    return CoefficientTable(kind, expand_quotient(TABLE_QUOTIENTS[kind], order, backend))


def pend_table(order, backend=EXACT):
    return build_table('pend', order, backend)


def a_table(order, backend=EXACT):
    return build_table('a', order, backend)


def p_table(order, backend=EXACT):
    return build_table('p', order, backend)
