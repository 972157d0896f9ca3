# Configuration settings for the PEND partition toolkit
import os

from dotenv import load_dotenv

load_dotenv()


def _int_list(value):
    return [int(item) for item in value.split(',') if item.strip()]


class Settings:
    CACHE_DIR = os.getenv("PENDLAB_CACHE")
    LOG_LEVEL = os.getenv("PENDLAB_LOG_LEVEL", "WARNING")
    LOG_FILE = os.getenv("PENDLAB_LOG_FILE")

    PARITY_TRUNCATION = int(os.getenv("PENDLAB_PARITY_N", 1_000_000))
    RESIDUE_TRUNCATION = int(os.getenv("PENDLAB_RESIDUE_N", 10_000))
    EXACT_TRUNCATION = int(os.getenv("PENDLAB_EXACT_N", 5_000))
    THETA_TRUNCATION = int(os.getenv("PENDLAB_THETA_N", 2_000))
    JTP_TRUNCATION = int(os.getenv("PENDLAB_JTP_N", 500))
    SELLERS_TRUNCATION = int(os.getenv("PENDLAB_SELLERS_N", 100_000))
    SELLERS_ALPHA_MAX = int(os.getenv("PENDLAB_SELLERS_ALPHA", 3))

    ENUMERATION_LIMIT = int(os.getenv("PENDLAB_ENUMERATION_LIMIT", 90))
    ORACLE_LIMIT = int(os.getenv("PENDLAB_ORACLE_LIMIT", 60))

    NEWMAN_PRIMES = _int_list(os.getenv("PENDLAB_NEWMAN_PRIMES", "5,7,11,13"))
    NEWMAN_N_MAX = int(os.getenv("PENDLAB_NEWMAN_N_MAX", 30))
    STEP3_N_MAX = int(os.getenv("PENDLAB_STEP3_N_MAX", 10))
    REPLICATION_PRIMES = int(os.getenv("PENDLAB_REPLICATION_PRIMES", 3))
    REPLICATION_SEED = int(os.getenv("PENDLAB_REPLICATION_SEED", 20240601))

    THEOREM_PRIMES = _int_list(os.getenv("PENDLAB_THEOREM_PRIMES", "5,7,11"))

    MAX_WORKERS = int(os.getenv("PENDLAB_MAX_WORKERS", 4))
    SHOW_PROGRESS = os.getenv("PENDLAB_PROGRESS", "1") == "1"


settings = Settings()
