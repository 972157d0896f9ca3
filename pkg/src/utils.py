import argparse
import logging
import os
import re

_DECIMAL = re.compile(r'^\d+$')
_RANGE = re.compile(r'^(\d+)(?:\.\.(\d+))?$')


def setup_logging(log_level="WARNING", log_file=None):
    """Setup logging configuration"""
    handlers = [logging.StreamHandler()]

    if log_file:
        os.makedirs(os.path.dirname(log_file) or '.', exist_ok=True)
        handlers.append(logging.FileHandler(log_file))

    logging.basicConfig(
        level=getattr(logging, log_level.upper()),
        format='%(asctime)s - %(name)s - %(levelname)s - %(message)s',
        handlers=handlers,
        force=True  # Override any existing configuration
    )
    return logging.getLogger(__name__)


def decimal_int(text):
    """argparse type accepting plain decimal digits only (no signs, 0x, 1e6 or underscores)"""
    if not _DECIMAL.match(text):
        raise argparse.ArgumentTypeError(f"expected a decimal integer, got '{text}'")
    return int(text)


def decimal_list(text):
    """Comma-separated decimal integers, e.g. '5,7,11'"""
    items = [item.strip() for item in text.split(',')]
    return [decimal_int(item) for item in items if item]


def parse_index_range(text):
    """'7' -> (7, 7); '0..7' -> (0, 7), both ends inclusive"""
    match = _RANGE.match(text.strip())
    if not match:
        raise argparse.ArgumentTypeError(f"expected n or a..b, got '{text}'")
    low = int(match.group(1))
    high = int(match.group(2)) if match.group(2) is not None else low
    if high < low:
        raise argparse.ArgumentTypeError(f"empty range '{text}'")
    return low, high


def save_report_to_file(text, path):
    """Write a rendered report, creating parent folders as needed"""
    os.makedirs(os.path.dirname(path) or '.', exist_ok=True)
    with open(path, 'w', encoding='utf-8') as f:
        f.write(text)
    return path
