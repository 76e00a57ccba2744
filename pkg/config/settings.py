"""Configurações centralizadas da aplicação."""
import os
from dotenv import load_dotenv

load_dotenv()


def _flag(name: str, default: str = "0") -> bool:
    return os.getenv(name, default).strip().lower() in ("1", "true", "yes", "on")


class Settings:
    # Execução
    JOBS = int(os.getenv("VERSTORE_JOBS", "1"))
    LOG_LEVEL = os.getenv("VERSTORE_LOG_LEVEL", "WARNING")

    # Solvers FPTAS
    EPSILON = os.getenv("VERSTORE_EPSILON", "1/4")
    K_MAX = int(os.getenv("VERSTORE_K_MAX", "3"))
    STATE_GUARD = int(os.getenv("VERSTORE_STATE_GUARD", "500000"))
    VERIFY_DP = _flag("VERSTORE_VERIFY_DP")

    # Oráculo
    ORACLE_LIMIT = int(os.getenv("VERSTORE_ORACLE_LIMIT", "8"))
    ORACLE_MAX_CONFIGS = int(os.getenv("VERSTORE_ORACLE_MAX_CONFIGS", "2000000"))

    # Heurística da árvore extraída
    PRUNE_NATURAL = 2
    PRUNE_COMPRESSED = 10
    DEFAULT_ROOT = 0

    # Limite de custo (inteiros de 64 bits)
    COST_LIMIT = 2**63 - 1

settings = Settings()
