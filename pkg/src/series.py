"""Truncated power series in q and eta-quotient expansion.

A :class:`Series` stores the coefficients c_0 .. c_{N-1} of a formal power
series together with its truncation order N and a coefficient backend:

* ``exact``   - Python integers, used wherever identities must hold over Z;
* ``parity``  - a single bit-packed Python int (bit n is c_n mod 2);
* ``residue`` - an int64 numpy array of residues mod m.

Series values never change after construction. Every binary operation
truncates to the shorter operand.
"""
import heapq
import logging
import re
from dataclasses import dataclass
from functools import lru_cache
from math import gcd

import numpy as np

from src import kernels

logger = logging.getLogger(__name__)

MAX_RESIDUE_MODULUS = 1 << 62


class SeriesError(ValueError):
    """Raised for invalid truncations, backends or non-invertible series."""


class QuotientParseError(SeriesError):
    def __init__(self, message, position):
        super().__init__(f"{message} at position {position}")
        self.position = position


@dataclass(frozen=True)
class Backend:
    kind: str
    modulus: int | None = None

    def __post_init__(self):
        if self.kind == 'exact':
            if self.modulus is not None:
                raise SeriesError("exact backend takes no modulus")
        elif self.kind == 'parity':
            if self.modulus not in (None, 2):
                raise SeriesError("parity backend is fixed to modulus 2")
            object.__setattr__(self, 'modulus', 2)
        elif self.kind == 'residue':
            if self.modulus is None or not 2 <= self.modulus < MAX_RESIDUE_MODULUS:
                raise SeriesError(f"residue modulus must lie in [2, 2**62), got {self.modulus}")
        else:
            raise SeriesError(f"unknown backend '{self.kind}'")

    @classmethod
    def residue(cls, modulus):
        return cls('residue', int(modulus))

    @property
    def tag(self):
        if self.kind == 'residue':
            return f"residue({self.modulus})"
        return self.kind

    def __str__(self):
        return self.tag


EXACT = Backend('exact')
PARITY = Backend('parity')


def backend_from_name(name, modulus=None):
    """Resolve a CLI-style backend name (``exact``, ``parity``, ``residue``)."""
    if name == 'residue':
        if modulus is None:
            raise SeriesError("residue backend needs a modulus")
        return Backend.residue(modulus)
    if name == 'parity':
        return PARITY
    if name == 'exact':
        return EXACT
    raise SeriesError(f"unknown backend '{name}'")


def _bits_to_int(bits):
    packed = np.packbits(np.asarray(bits, dtype=np.uint8), bitorder='little')
    return int.from_bytes(packed.tobytes(), 'little')


def _int_to_bits(mask, order):
    raw = mask.to_bytes((order + 7) // 8, 'little')
    bits = np.unpackbits(np.frombuffer(raw, dtype=np.uint8), bitorder='little')
    return bits[:order]


def _set_bit_positions(mask, order):
    return np.flatnonzero(_int_to_bits(mask, order))


class Series:
    """Immutable truncated power series; see the module docstring for backends."""

    __slots__ = ('_backend', '_order', '_data', '_bits')

    def __init__(self, data, order, backend):
        if order < 1:
            raise SeriesError("empty truncation: order must be at least 1")
        self._backend = backend
        self._order = order
        self._data = data
        self._bits = None

    @classmethod
    def from_coefficients(cls, values, backend=EXACT, order=None):
        values = list(values) if not isinstance(values, np.ndarray) else values
        if order is None:
            order = len(values)
        if order < 1:
            raise SeriesError("empty truncation: order must be at least 1")
        head = [int(v) for v in values[:order]]
        head.extend([0] * (order - len(head)))
        if backend.kind == 'exact':
            return cls(tuple(head), order, backend)
        if backend.kind == 'parity':
            return cls(_bits_to_int([v & 1 for v in head]), order, backend)
        arr = np.array([v % backend.modulus for v in head], dtype=np.int64)
        arr.flags.writeable = False
        return cls(arr, order, backend)

    @property
    def backend(self):
        return self._backend

    @property
    def order(self):
        return self._order

    def __len__(self):
        return self._order

    def __getitem__(self, n):
        if not 0 <= n < self._order:
            raise IndexError(f"coefficient {n} outside truncation {self._order}")
        if self._backend.kind == 'parity':
            return (self._data >> n) & 1
        return int(self._data[n])

    def coefficients(self):
        if self._backend.kind == 'parity':
            return self.to_numpy().tolist()
        if self._backend.kind == 'residue':
            return self._data.tolist()
        return list(self._data)

    def to_numpy(self):
        """Coefficients as a numpy array (object dtype for the exact backend)."""
        if self._backend.kind == 'parity':
            if self._bits is None:
                bits = _int_to_bits(self._data, self._order)
                bits.flags.writeable = False
                self._bits = bits
            return self._bits
        if self._backend.kind == 'residue':
            return self._data
        return np.array(self._data, dtype=object)

    @property
    def bitmask(self):
        if self._backend.kind != 'parity':
            raise SeriesError("bitmask is only defined for the parity backend")
        return self._data

    def nonzero_count(self):
        if self._backend.kind == 'parity':
            return self._data.bit_count()
        if self._backend.kind == 'residue':
            return int(np.count_nonzero(self._data))
        return sum(1 for c in self._data if c)

    def truncate(self, order):
        if order < 1:
            raise SeriesError("empty truncation: order must be at least 1")
        if order >= self._order:
            return self
        if self._backend.kind == 'parity':
            return Series(self._data & ((1 << order) - 1), order, self._backend)
        return Series(self._data[:order], order, self._backend)

    def to_parity(self):
        """Bit-packed copy of an exact, parity or residue(2k) series."""
        kind = self._backend.kind
        if kind == 'parity':
            return self
        if kind == 'residue' and self._backend.modulus % 2:
            raise SeriesError(f"cannot read parities from {self._backend.tag}")
        if kind == 'residue':
            return Series(_bits_to_int(self._data & 1), self._order, PARITY)
        return Series(_bits_to_int([c & 1 for c in self._data]), self._order, PARITY)

    def __eq__(self, other):
        if not isinstance(other, Series):
            return NotImplemented
        if self._backend != other._backend or self._order != other._order:
            return False
        if self._backend.kind == 'residue':
            return bool(np.array_equal(self._data, other._data))
        return self._data == other._data

    __hash__ = None

    def __repr__(self):
        head = self.coefficients()[:8] if self._order <= 64 else [self[n] for n in range(8)]
        more = ', ...' if self._order > 8 else ''
        return f"Series([{', '.join(str(c) for c in head)}{more}], order={self._order}, backend={self._backend.tag})"


def one(order, backend=EXACT):
    return Series.from_coefficients([1], backend, order)


def _sparse_terms(series, order):
    """Nonzero (index, value) pairs below ``order``; residue values are centered."""
    kind = series.backend.kind
    if kind == 'exact':
        return [(i, c) for i, c in enumerate(series._data[:order]) if c]
    if kind == 'parity':
        positions = _set_bit_positions(series._data, series.order)
        return [(int(i), 1) for i in positions if i < order]
    arr = series._data[:order]
    idx = np.flatnonzero(arr)
    m = series.backend.modulus
    return [(int(i), kernels.centered(int(arr[i]), m)) for i in idx]


def _term_arrays(terms):
    idx = np.array([i for i, _ in terms], dtype=np.int64)
    val = np.array([c for _, c in terms], dtype=np.int64)
    return idx, val


def _check_compatible(a, b):
    if a.backend != b.backend:
        raise SeriesError(f"backend mismatch: {a.backend.tag} vs {b.backend.tag}")


def pentagonal_terms(limit):
    """Yield (exponent, sign) of Euler's product prod(1 - q^n) below ``limit``."""
    if limit <= 0:
        return
    yield 0, 1
    j = 1
    while True:
        sign = -1 if j % 2 else 1
        low = j * (3 * j - 1) // 2
        high = j * (3 * j + 1) // 2
        if low >= limit:
            return
        yield low, sign
        if high >= limit:
            return
        yield high, sign
        j += 1


@lru_cache(maxsize=128)
def eta_series(k, order, backend=EXACT):
    """f_k = prod_{n>=1} (1 - q^{kn}) truncated to ``order``, via pentagonal numbers."""
    if k < 1:
        raise SeriesError(f"dilation must be positive, got {k}")
    if order < 1:
        raise SeriesError("empty truncation: order must be at least 1")
    if backend.kind == 'exact':
        coeffs = [0] * order
        for g, sign in pentagonal_terms((order - 1) // k + 1):
            coeffs[k * g] = sign
        return Series(tuple(coeffs), order, backend)
    if backend.kind == 'parity':
        bits = np.zeros(order, dtype=np.uint8)
        for g, _ in pentagonal_terms((order - 1) // k + 1):
            bits[k * g] = 1
        return Series(_bits_to_int(bits), order, backend)
    arr = np.zeros(order, dtype=np.int64)
    for g, sign in pentagonal_terms((order - 1) // k + 1):
        arr[k * g] = sign % backend.modulus
    arr.flags.writeable = False
    return Series(arr, order, backend)


def dilate(a, d):
    """Substitute q -> q^d, keeping the truncation order."""
    if d < 1:
        raise SeriesError(f"dilation must be positive, got {d}")
    if d == 1:
        return a
    order = a.order
    if a.backend.kind == 'parity':
        bits = np.zeros(order, dtype=np.uint8)
        bits[::d] = a.to_numpy()[:(order - 1) // d + 1]
        return Series(_bits_to_int(bits), order, a.backend)
    if a.backend.kind == 'residue':
        arr = np.zeros(order, dtype=np.int64)
        arr[::d] = a._data[:(order - 1) // d + 1]
        arr.flags.writeable = False
        return Series(arr, order, a.backend)
    coeffs = [0] * order
    coeffs[::d] = a._data[:(order - 1) // d + 1]
    return Series(tuple(coeffs), order, a.backend)


def mul(a, b):
    """Truncated product; the sparser operand drives the convolution."""
    _check_compatible(a, b)
    order = min(a.order, b.order)
    a, b = a.truncate(order), b.truncate(order)
    if a.nonzero_count() > b.nonzero_count():
        a, b = b, a
    kind = a.backend.kind
    if kind == 'parity':
        mask = (1 << order) - 1
        dense = b._data
        out = 0
        for i in _set_bit_positions(a._data, order):
            out ^= dense << int(i)
        return Series(out & mask, order, a.backend)
    terms = _sparse_terms(a, order)
    if kind == 'exact':
        dense = b._data
        out = [0] * order
        for i, c in terms:
            out[i:] = [x + c * y for x, y in zip(out[i:], dense)]
        return Series(tuple(out), order, a.backend)
    m = a.backend.modulus
    idx, val = _term_arrays(terms)
    if kernels.fits_kernel(val, m):
        out = kernels.sparse_convolve(b._data, idx, val, m)
    else:
        acc = [0] * order
        dense = [int(v) for v in b._data]
        for i, c in terms:
            acc[i:] = [(x + c * y) % m for x, y in zip(acc[i:], dense)]
        out = np.array(acc, dtype=np.int64)
    out.flags.writeable = False
    return Series(out, order, a.backend)


def divide(a, b):
    """Truncated quotient a / b; b must have a unit constant term."""
    _check_compatible(a, b)
    order = min(a.order, b.order)
    kind = a.backend.kind
    b0 = b[0]
    if kind == 'parity':
        if b0 != 1:
            raise SeriesError("constant term is not a unit mod 2")
        return mul(a.truncate(order), inverse(b.truncate(order)))
    terms = _sparse_terms(b, order)
    if kind == 'exact':
        if b0 not in (1, -1):
            raise SeriesError(f"constant term {b0} is not a unit over the integers")
        num = a._data
        tail = terms[1:]
        out = [0] * order
        for n in range(order):
            acc = num[n]
            for i, c in tail:
                if i > n:
                    break
                acc -= c * out[n - i]
            out[n] = acc * b0
        return Series(tuple(out), order, a.backend)
    m = a.backend.modulus
    if gcd(b0, m) != 1:
        raise SeriesError(f"constant term {b0} is not invertible mod {m}")
    inv0 = kernels.centered(pow(b0, -1, m), m)
    idx, val = _term_arrays(terms)
    if kernels.fits_kernel(np.append(val, inv0), m):
        out = kernels.sparse_solve(a._data[:order], idx, val, inv0, m)
    else:
        num = [int(v) for v in a._data[:order]]
        tail = terms[1:]
        acc_out = [0] * order
        for n in range(order):
            acc = num[n]
            for i, c in tail:
                if i > n:
                    break
                acc -= c * acc_out[n - i]
            acc_out[n] = (acc * inv0) % m
        out = np.array(acc_out, dtype=np.int64)
    out.flags.writeable = False
    return Series(out, order, a.backend)


def inverse(a):
    """1 / a to the order of ``a``.

    The parity backend uses a^{-1} = prod_{2^i < N} a(q^{2^i}) (mod 2), which
    follows from a(q)^{2^m} = a(q^{2^m}) = 1 + O(q^N) once 2^m >= N.
    """
    if a.backend.kind != 'parity':
        return divide(one(a.order, a.backend), a)
    if a[0] != 1:
        raise SeriesError("constant term is not a unit mod 2")
    result = one(a.order, a.backend)
    d = 1
    while d < a.order:
        result = mul(result, dilate(a, d))
        d <<= 1
    return result


def reduce(a, modulus):
    """Reduce coefficients into [0, modulus), returning a residue(modulus) series."""
    if modulus < 2:
        raise SeriesError(f"modulus must be at least 2, got {modulus}")
    target = Backend.residue(modulus)
    kind = a.backend.kind
    if kind == 'exact':
        values = [c % modulus for c in a._data]
    elif kind == 'residue' and a.backend.modulus % modulus == 0:
        values = [int(c) % modulus for c in a._data]
    elif kind == 'parity' and modulus == 2:
        values = a.coefficients()
    else:
        raise SeriesError(f"cannot reduce {a.backend.tag} series mod {modulus}")
    return Series.from_coefficients(values, target, a.order)


def first_mismatch(a, b):
    """Lowest exponent where two same-backend series differ, or None."""
    _check_compatible(a, b)
    order = min(a.order, b.order)
    if a.backend.kind == 'parity':
        diff = (a._data ^ b._data) & ((1 << order) - 1)
        return (diff & -diff).bit_length() - 1 if diff else None
    if a.backend.kind == 'residue':
        idx = np.flatnonzero(a._data[:order] != b._data[:order])
        return int(idx[0]) if idx.size else None
    for n, (x, y) in enumerate(zip(a._data[:order], b._data[:order])):
        if x != y:
            return n
    return None


@dataclass(frozen=True)
class EtaQuotient:
    """prod f_k^{e_k}; pairs are merged by k, zero exponents dropped, sorted by k."""

    factors: tuple = ()

    def __post_init__(self):
        merged = {}
        for k, e in self.factors:
            if int(k) != k or k < 1:
                raise SeriesError(f"dilation must be a positive integer, got {k}")
            merged[int(k)] = merged.get(int(k), 0) + int(e)
        object.__setattr__(self, 'factors', tuple(sorted((k, e) for k, e in merged.items() if e)))

    @classmethod
    def from_mapping(cls, mapping):
        return cls(tuple(mapping.items()))

    def as_dict(self):
        return dict(self.factors)

    def __str__(self):
        return ','.join(f"{k}:{e}" for k, e in self.factors)


PEND_QUOTIENT = EtaQuotient(((2, 1), (12, 1), (1, -1), (4, -1), (6, -1)))
A_QUOTIENT = EtaQuotient(((3, 2), (1, -3)))
P_QUOTIENT = EtaQuotient(((1, -1),))

_PAIR = re.compile(r'\s*(\d+)\s*:\s*([+-]?\d+)\s*$')


def parse_quotient(text):
    """Parse the ``k:e,k:e`` grammar, e.g. ``2:1,12:1,1:-1,4:-1,6:-1``."""
    if not text or not text.strip():
        raise QuotientParseError("empty quotient", 0)
    pairs = []
    offset = 0
    for piece in text.split(','):
        stripped = len(piece) - len(piece.lstrip())
        match = _PAIR.match(piece)
        if not match:
            raise QuotientParseError(f"expected 'k:e', got '{piece.strip()}'", offset + stripped)
        k, e = int(match.group(1)), int(match.group(2))
        if k < 1:
            raise QuotientParseError("dilation must be positive", offset + match.start(1))
        pairs.append((k, e))
        offset += len(piece) + 1
    return EtaQuotient(tuple(pairs))


def parity_factors(eq, order):
    """Dilations k whose product prod f_k is congruent to ``eq`` mod 2 below ``order``.

    Negative exponents unfold through f_k^{-1} = prod_{i>=0} f_{2^i k} and
    repeated factors carry upward through f_k^2 = f_{2k}; anything with
    k >= order is 1 + O(q^order) and dropped.
    """
    exponents = {}
    for k, e in eq.factors:
        if e > 0:
            if k < order:
                exponents[k] = exponents.get(k, 0) + e
            continue
        d = k
        while d < order:
            exponents[d] = exponents.get(d, 0) - e
            d *= 2
    heap = list(exponents)
    heapq.heapify(heap)
    result = []
    while heap:
        k = heapq.heappop(heap)
        e = exponents.pop(k)
        if e % 2:
            result.append(k)
        carry = e // 2
        if carry and 2 * k < order:
            if 2 * k not in exponents:
                exponents[2 * k] = 0
                heapq.heappush(heap, 2 * k)
            exponents[2 * k] += carry
    return result


def expand_quotient(eq, order, backend=EXACT):
    """Expand an eta quotient (or its ``k:e`` text) to ``order`` coefficients."""
    if isinstance(eq, str):
        eq = parse_quotient(eq)
    if order < 1:
        raise SeriesError("empty truncation: order must be at least 1")
    result = one(order, backend)
    if backend.kind == 'parity':
        factors = parity_factors(eq, order)
        logger.debug(f"Parity normal form of {eq}: {len(factors)} factors")
        for k in factors:
            result = mul(result, eta_series(k, order, backend))
        return result
    for k, e in eq.factors:
        factor = eta_series(k, order, backend)
        step = mul if e > 0 else divide
        for _ in range(abs(e)):
            result = step(result, factor)
    logger.debug(f"Expanded {eq} to order {order} in {backend.tag}")
    return result
