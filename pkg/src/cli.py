import argparse
import logging
import sys

from sympy import isprime

from config.settings import settings
from src.campaign import INSUFFICIENT, VERIFIED, VerificationCampaign
from src.families import FamilyError
from src.newman import NewmanError
from src.partitions import PartitionError, pend_bruteforce
from src.report import FORMATS, envelope, render, render_values
from src.series import EXACT, PARITY, Backend, SeriesError, expand_quotient, parse_quotient
from src.theta import ThetaError
from src.utils import decimal_int, decimal_list, parse_index_range, save_report_to_file, setup_logging

logger = logging.getLogger(__name__)

EXIT_OK = 0
EXIT_FAILURE = 1
EXIT_INSUFFICIENT = 2
EXIT_USAGE = 3

TARGETS = ('identity', 'theta', 'newman', 'theorem', 'sellers', 'ramanujan')


class UsageError(Exception):
    pass


class ArgumentParser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_USAGE, f"{self.prog}: error: {message}\n")


def resolve_backend(name, modulus):
    if name == 'parity':
        if modulus not in (None, 2):
            raise UsageError(f"the parity backend works mod 2, not mod {modulus}")
        return PARITY
    if name == 'residue':
        if modulus is None:
            raise UsageError("--backend residue needs --mod")
        return Backend.residue(modulus)
    if modulus is not None:
        return Backend.residue(modulus)
    return EXACT


def status_exit_code(status):
    if status == VERIFIED:
        return EXIT_OK
    if status == INSUFFICIENT:
        return EXIT_INSUFFICIENT
    return EXIT_FAILURE


def emit(text, output=None):
    if output:
        save_report_to_file(text, output)
        logger.info(f"Report written to {output}")
    else:
        sys.stdout.write(text)


def cmd_pend(args):
    low, high = args.index
    backend = resolve_backend(args.backend, args.mod)
    campaign = VerificationCampaign(cache_dir=args.cache_dir, show_progress=False)
    table = campaign.table('pend', high + 1, backend)
    values = table.series.coefficients()[low:high + 1]

    mismatches = []
    if args.oracle:
        top = min(high, settings.ORACLE_LIMIT)
        if high > top:
            logger.warning(f"Oracle only covers n <= {settings.ORACLE_LIMIT}")
        for n in range(low, top + 1):
            expected = pend_bruteforce(n)
            if backend.modulus:
                expected %= backend.modulus
            if values[n - low] != expected:
                mismatches.append((n, values[n - low], expected))
        for n, got, expected in mismatches:
            print(f"❌ pend({n}): table {got}, brute force {expected}", file=sys.stderr)

    emit(render_values(values, args.format or 'text', start=low), args.output)
    return EXIT_FAILURE if mismatches else EXIT_OK


def cmd_expand(args):
    quotient = parse_quotient(args.quotient)
    order = args.order if args.order is not None else args.N
    if order is None:
        raise UsageError("expand needs a truncation order")
    series = expand_quotient(quotient, order, resolve_backend(args.backend, args.mod))
    emit(render_values(series.coefficients(), args.format or 'text'), args.output)
    return EXIT_OK


def _check_primes(primes):
    for p in primes or []:
        if p < 5 or not isprime(p):
            raise UsageError(f"--p expects primes >= 5, got {p}")


def build_targets(args):
    options = {
        'identity': {'order': args.N, 'backend': resolve_backend(args.backend or 'parity', args.mod)},
        'theta': {'order': args.N, 'jtp_order': args.jtp_N},
        'newman': {'primes': args.p, 'n_max': args.n_max, 'step3_n_max': args.step3_n_max,
                   'replicate': args.replicate},
        'theorem': {'primes': args.p, 'order': args.N, 'k': args.k},
        'sellers': {'order': args.N, 'alpha_max': args.alpha_max},
        'ramanujan': {'order': args.N},
    }
    names = TARGETS if args.target == 'all' else (args.target,)
    return [(name, options[name]) for name in names]


def cmd_verify(args):
    _check_primes(args.p)
    targets = build_targets(args)
    campaign = VerificationCampaign(cache_dir=args.cache_dir, max_workers=args.workers)
    result = campaign.run(targets)
    body = result if args.target == 'all' else result['targets'][0]

    fmt = args.format or 'json'
    if args.envelope:
        if fmt == 'json':
            body = envelope(body)
        else:
            logger.warning("--envelope only applies to json output")
    emit(render(body, fmt), args.output)
    return status_exit_code(result['status'])


def build_parser():
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument('--format', choices=FORMATS, help='Output format')
    common.add_argument('--output', help='Write the output to this file instead of stdout')
    common.add_argument('--cache-dir', default=settings.CACHE_DIR, help='Coefficient table cache directory')
    common.add_argument('--backend', choices=('exact', 'parity', 'residue'), help='Coefficient backend')
    common.add_argument('--mod', type=decimal_int, help='Residue modulus')
    common.add_argument('--N', type=decimal_int, help='Truncation order')
    common.add_argument('--verbose', action='store_true', help='Enable debug logging')

    parser = ArgumentParser(prog='pendlab', description="PEND partition values and congruence verification.")
    sub = parser.add_subparsers(dest='command', required=True, parser_class=ArgumentParser)

    pend = sub.add_parser('pend', parents=[common], help='Print pend(n) for n or a..b')
    pend.add_argument('index', type=parse_index_range, help='n or a..b (inclusive)')
    pend.add_argument('--oracle', action='store_true', help='Cross-check against brute-force enumeration')
    pend.set_defaults(handler=cmd_pend)

    expand = sub.add_parser('expand', parents=[common], help='Expand an eta quotient k:e,k:e,...')
    expand.add_argument('quotient', help="Eta quotient, e.g. '2:1,12:1,1:-1,4:-1,6:-1'")
    expand.add_argument('order', nargs='?', type=decimal_int, help='Number of coefficients')
    expand.set_defaults(handler=cmd_expand)

    verify = sub.add_parser('verify', parents=[common], help='Run a verification target')
    verify.add_argument('target', choices=TARGETS + ('all',))
    verify.add_argument('--p', type=decimal_list, help='Comma-separated primes')
    verify.add_argument('--k', type=decimal_int, help='Family level (default: every level in range)')
    verify.add_argument('--n-max', type=decimal_int, help='Largest n for residual scans')
    verify.add_argument('--step3-n-max', type=decimal_int, help='Largest n for the derived relation scans')
    verify.add_argument('--jtp-N', type=decimal_int, help='Truncation for triple product checks')
    verify.add_argument('--alpha-max', type=decimal_int, help='Highest Sellers family')
    verify.add_argument('--replicate', action='store_true', help='Repeat residual scans mod random 60-bit primes')
    verify.add_argument('--envelope', action='store_true', help='Wrap the json report with a timestamp')
    verify.add_argument('--workers', type=decimal_int, default=settings.MAX_WORKERS, help='Worker threads')
    verify.set_defaults(handler=cmd_verify)
    return parser


def main(argv=None):
    parser = build_parser()
    args = parser.parse_args(argv)
    setup_logging('DEBUG' if args.verbose else settings.LOG_LEVEL, settings.LOG_FILE)
    try:
        return args.handler(args)
    except (UsageError, SeriesError, ThetaError, PartitionError, NewmanError, FamilyError) as e:
        print(f"❌ {e}", file=sys.stderr)
        return EXIT_USAGE
