import logging
import threading
from concurrent.futures import ThreadPoolExecutor

from tqdm import tqdm

from config.settings import settings
from src.cache import CacheError, TableCache
from src.families import (
    classify, max_level, ramanujan_families, sellers_families, theorem_families, verify_families,
)
from src.newman import fit_alpha, newman_order, replication_moduli, scan_residuals, step3_order
from src.partitions import build_table
from src.series import EXACT, PARITY, Backend, first_mismatch
from src.theta import EULER_SPEC, PHI_SPEC, PSI_SPEC, identity_checks, jtp_check

logger = logging.getLogger(__name__)

VERIFIED = 'verified'
REFUTED = 'refuted'
INSUFFICIENT = 'insufficient-range'
ERROR = 'error'


def default_order(backend):
    if backend.kind == 'parity':
        return settings.PARITY_TRUNCATION
    if backend.kind == 'residue':
        return settings.RESIDUE_TRUNCATION
    return settings.EXACT_TRUNCATION


def aggregate_status(statuses):
    """Refuted, then error, then insufficient-range, then verified; empty is insufficient."""
    statuses = list(statuses)
    for status in (REFUTED, ERROR, INSUFFICIENT):
        if status in statuses:
            return status
    return VERIFIED if statuses else INSUFFICIENT


class VerificationCampaign:
    """Builds (or loads) coefficient tables and runs the verification targets"""

    def __init__(self, cache_dir=None, max_workers=None, show_progress=None):
        self.cache = TableCache(cache_dir) if cache_dir else None
        self.max_workers = max_workers or settings.MAX_WORKERS
        self.show_progress = settings.SHOW_PROGRESS if show_progress is None else show_progress
        self.lock = threading.Lock()
        self._tables = {}

    def table(self, kind, order, backend):
        key = (kind, order, backend)
        with self.lock:
            if key in self._tables:
                return self._tables[key]

        table = None
        if self.cache:
            try:
                table = self.cache.load(kind, order, backend)
            except (CacheError, OSError) as e:
                logger.error(f"Ignoring unreadable cache entry for {kind} ({backend.tag}): {e}")
        if table is None:
            table = build_table(kind, order, backend)
            if self.cache:
                try:
                    self.cache.store(table)
                except OSError as e:
                    logger.error(f"Could not cache {kind} table: {e}")

        with self.lock:
            self._tables[key] = table
        return table

    def verify_identity(self, order=None, backend=PARITY):
        """pend(n) and a(n) agree mod 2 for every n below ``order``."""
        order = order or default_order(backend)
        pend = self.table('pend', order, backend).series.to_parity()
        a = self.table('a', order, backend).series.to_parity()
        mismatch = first_mismatch(pend, a)
        if mismatch is not None:
            logger.warning(f"pend and a differ mod 2 at n={mismatch}")
        return {
            'target': 'identity',
            'order': order,
            'backend': backend.tag,
            'first_mismatch': mismatch,
            'status': VERIFIED if mismatch is None else REFUTED,
        }

    def verify_theta(self, order=None, jtp_order=None):
        order = order or settings.THETA_TRUNCATION
        jtp_order = jtp_order or settings.JTP_TRUNCATION
        checks = identity_checks(order)
        checks += [jtp_check(spec, jtp_order) for spec in (PHI_SPEC, PSI_SPEC, EULER_SPEC)]
        return {
            'target': 'theta',
            'checks': [check.to_dict() for check in checks],
            'status': VERIFIED if all(checks) else REFUTED,
        }

    def verify_newman(self, primes=None, n_max=None, step3_n_max=None, replicate=False):
        """Residual scans for n = 0..n_max (three-term relation) and 0..step3_n_max (derived relation).

        Every table is sized to cover both ranges for every prime. Replication repeats the
        three-term scans over a range ten times wider and the derived scans over the same range.
        """
        primes = primes or settings.NEWMAN_PRIMES
        n_max = settings.NEWMAN_N_MAX if n_max is None else n_max
        step3_n_max = settings.STEP3_N_MAX if step3_n_max is None else step3_n_max

        def order_for(newman_n):
            return max(max(newman_order(p, newman_n), step3_order(p, step3_n_max)) for p in primes)

        table = self.table('a', order_for(n_max), EXACT)
        fits = [fit_alpha(p, table) for p in primes]

        jobs = []
        for fit in fits:
            jobs.append((fit, table, n_max, 'newman'))
            jobs.append((fit, table, step3_n_max, 'step3'))
        if replicate:
            wide = 10 * n_max
            order = order_for(wide)
            for modulus in replication_moduli(settings.REPLICATION_PRIMES, seed=settings.REPLICATION_SEED):
                residue_table = self.table('a', order, Backend.residue(modulus))
                for fit in fits:
                    jobs.append((fit, residue_table, wide, 'newman'))
                    jobs.append((fit, residue_table, step3_n_max, 'step3'))

        checks = [
            scan_residuals(fit.p, limit, tbl, fit.alpha, relation)
            for fit, tbl, limit, relation in tqdm(jobs, desc="Residual scans", disable=not self.show_progress)
        ]
        return {
            'target': 'newman',
            'n_max': n_max,
            'step3_n_max': step3_n_max,
            'alphas': [fit.to_dict() for fit in fits],
            'checks': [check.to_dict() for check in checks],
            'status': aggregate_status(check.status for check in checks),
        }

    def verify_theorem(self, primes=None, order=None, k=None):
        primes = primes or settings.THEOREM_PRIMES
        order = order or default_order(PARITY)
        table = self.table('pend', order, PARITY)
        cases = [classify(p, table) for p in primes]
        families = set()
        for case in cases:
            levels = [k] if k is not None else range(max_level(case, order) + 1)
            for level in levels:
                families.update(theorem_families(case, level))
        reports = verify_families(sorted(families, key=lambda f: f.sort_key()), table,
                                  self.max_workers, self.show_progress)
        return {
            'target': 'theorem',
            'order': order,
            'cases': [case.to_dict() for case in cases],
            'families': [report.to_dict() for report in reports],
            'status': aggregate_status(report.status for report in reports),
        }

    def verify_sellers(self, order=None, alpha_max=None):
        order = order or settings.SELLERS_TRUNCATION
        alpha_max = alpha_max or settings.SELLERS_ALPHA_MAX
        table = self.table('pend', order, Backend.residue(3))
        reports = verify_families(sellers_families(alpha_max), table, self.max_workers, self.show_progress)
        return {
            'target': 'sellers',
            'order': order,
            'families': [report.to_dict() for report in reports],
            'status': aggregate_status(report.status for report in reports),
        }

    def verify_ramanujan(self, order=None):
        order = order or default_order(Backend.residue(5))
        reports = []
        for family in ramanujan_families():
            table = self.table('p', order, Backend.residue(family.check_modulus))
            reports += verify_families([family], table, 1, False)
        return {
            'target': 'ramanujan',
            'order': order,
            'families': [report.to_dict() for report in reports],
            'status': aggregate_status(report.status for report in reports),
        }

    def run_target(self, name, **options):
        """Run one target, turning domain failures into an ``error`` report."""
        runner = getattr(self, f"verify_{name}", None)
        if runner is None:
            return {'target': name, 'status': ERROR, 'error': f"unknown target '{name}'"}
        try:
            report = runner(**options)
            logger.info(f"Target {name} finished: {report['status']}")
            return report
        except (ValueError, OSError) as e:
            logger.error(f"Target {name} failed: {e}")
            return {'target': name, 'status': ERROR, 'error': str(e)}

    def run(self, targets):
        """Run ``[(name, options), ...]`` concurrently, keeping the given order."""
        with ThreadPoolExecutor(max_workers=self.max_workers) as executor:
            reports = list(executor.map(lambda item: self.run_target(item[0], **item[1]), targets))
        return {
            'targets': reports,
            'status': aggregate_status(report['status'] for report in reports),
        }
