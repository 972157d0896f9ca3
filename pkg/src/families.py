"""Congruence families: prime cases, progression generators and table checks."""
import logging
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field

import numpy as np
from sympy import isprime
from tqdm import tqdm

from config.settings import settings

logger = logging.getLogger(__name__)

CASE_I = 'CaseI'
CASE_II = 'CaseII'

# Level k uses modulus p^(e(k+1)), offset step p^(e(k+1)-1), point index (p^(ek)-1)/8
CASE_EXPONENTS = {
    CASE_I: 4,
    CASE_II: 6,
}


class FamilyError(ValueError):
    pass


@dataclass(frozen=True)
class PrimeCase:
    p: int
    delta: int
    pend_delta_parity: int
    case_label: str

    @property
    def period(self):
        return CASE_EXPONENTS[self.case_label]

    def to_dict(self):
        return {
            'p': self.p,
            'delta': self.delta,
            'pend_delta_parity': self.pend_delta_parity,
            'case': self.case_label,
        }


@dataclass(frozen=True)
class ProgressionFamily:
    """Indices A*n + B (n >= 0) expected to be ``expected_residue`` mod ``check_modulus``.

    ``modulus`` None marks a point value: the single index B.
    """

    modulus: int | None
    residue: int
    check_modulus: int
    expected_residue: int
    provenance: str

    def __post_init__(self):
        if self.modulus is not None and self.modulus < 1:
            raise FamilyError(f"progression modulus must be positive, got {self.modulus}")
        if self.residue < 0:
            raise FamilyError(f"progression offset must be nonnegative, got {self.residue}")
        if self.check_modulus < 2:
            raise FamilyError(f"check modulus must be at least 2, got {self.check_modulus}")

    @property
    def is_point(self):
        return self.modulus is None

    def indices(self, order):
        if self.is_point:
            return np.array([self.residue] if self.residue < order else [], dtype=np.int64)
        return np.arange(self.residue, order, self.modulus, dtype=np.int64)

    def sort_key(self):
        return (self.modulus or 0, self.residue, self.provenance)


@dataclass
class FamilyReport:
    family: ProgressionFamily
    n_checked: int = 0
    max_index: int | None = None
    counterexamples: list = field(default_factory=list)
    status: str = 'insufficient-range'
    error: str | None = None

    def to_dict(self):
        body = {
            'A': self.family.modulus,
            'B': self.family.residue,
            'mod': self.family.check_modulus,
            'expected': self.family.expected_residue,
            'status': self.status,
            'n_checked': self.n_checked,
            'max_index': self.max_index,
            'counterexamples': [list(pair) for pair in self.counterexamples],
            'provenance': self.family.provenance,
        }
        if self.error:
            body['error'] = self.error
        return body


def _check_prime(p):
    if p < 5 or not isprime(p):
        raise FamilyError(f"expected a prime p >= 5, got {p}")


def _series_of(table):
    return getattr(table, 'series', table)


def classify(p, pend_parities):
    """Case I when pend((p^2-1)/8) is odd, Case II when it is even."""
    _check_prime(p)
    series = _series_of(pend_parities)
    delta = (p * p - 1) // 8
    if delta >= series.order:
        raise FamilyError(f"need pend({delta}) but the table stops at order {series.order}")
    parity = series[delta] % 2
    return PrimeCase(p, delta, parity, CASE_I if parity else CASE_II)


def theorem_families(case, k):
    """Zero families at level k, then the odd point values at levels k and k+1."""
    if k < 0:
        raise FamilyError(f"level must be nonnegative, got {k}")
    p, e = case.p, case.period
    modulus = p ** (e * k + e)
    offset = (modulus - 1) // 8
    label = case.case_label.lower().replace('case', 'case-')
    families = [
        ProgressionFamily(modulus, p ** (e * k + e - 1) * j + offset, 2, 0, f"{label},k={k},j={j}")
        for j in range(1, p)
    ]
    for level in (k, k + 1):
        families.append(ProgressionFamily(None, (p ** (e * level) - 1) // 8, 2, 1, f"{label},point,k={level}"))
    return families


def max_level(case, order):
    """Largest k whose zero-family modulus fits in a table of ``order`` (at least 0)."""
    k = 0
    while case.p ** (case.period * (k + 2)) <= order:
        k += 1
    return k


def sellers_families(alpha_max):
    """pend(27n+19) and pend(3^(2a+1) n + (17*3^(2a)-1)/8), all 0 mod 3."""
    if alpha_max < 1:
        raise FamilyError(f"alpha_max must be at least 1, got {alpha_max}")
    families = [ProgressionFamily(27, 19, 3, 0, 'sellers,27n+19')]
    for alpha in range(1, alpha_max + 1):
        families.append(ProgressionFamily(
            3 ** (2 * alpha + 1), (17 * 3 ** (2 * alpha) - 1) // 8, 3, 0, f"sellers,alpha={alpha}"))
    return families


def ramanujan_families():
    return [
        ProgressionFamily(5, 4, 5, 0, 'ramanujan,p(5n+4)'),
        ProgressionFamily(7, 5, 7, 0, 'ramanujan,p(7n+5)'),
        ProgressionFamily(11, 6, 11, 0, 'ramanujan,p(11n+6)'),
    ]


def _residues(series, modulus):
    kind = series.backend.kind
    if kind == 'exact':
        return None
    if series.backend.modulus != modulus:
        raise FamilyError(f"table is {series.backend.tag} but the family is checked mod {modulus}")
    return series.to_numpy()


def verify_family(family, table):
    """Check every in-range index of ``family`` against a coefficient table."""
    series = _series_of(table)
    m = family.check_modulus
    residues = _residues(series, m)
    indices = family.indices(series.order)
    report = FamilyReport(family)
    if indices.size == 0:
        logger.warning(f"No index of {family.provenance} lies below order {series.order}")
        return report
    if residues is None:
        observed = [series[int(i)] % m for i in indices]
    else:
        observed = (residues[indices] % m).tolist()
    report.n_checked = int(indices.size)
    report.max_index = int(indices[-1])
    report.counterexamples = [(int(i), int(v)) for i, v in zip(indices, observed) if v != family.expected_residue]
    report.status = 'refuted' if report.counterexamples else 'verified'
    if report.counterexamples:
        logger.warning(f"{family.provenance}: {len(report.counterexamples)} counterexamples, "
                       f"first at {report.counterexamples[0][0]}")
    return report


def verify_families(families, table, max_workers=None, show_progress=None):
    """Verify families concurrently; reports come back sorted by (A, B, provenance)."""
    max_workers = max_workers or settings.MAX_WORKERS
    show_progress = settings.SHOW_PROGRESS if show_progress is None else show_progress
    with ThreadPoolExecutor(max_workers=max_workers) as executor:
        reports = list(tqdm(
            executor.map(lambda family: verify_family(family, table), families),
            total=len(families),
            desc="Verifying families",
            disable=not show_progress,
        ))
    return sorted(reports, key=lambda report: report.family.sort_key())
