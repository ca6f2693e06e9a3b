# config.py
import os

BASE_DIR = os.path.dirname(os.path.abspath(__file__))

# Потолок порядка группы: хватает на ℓ⁴ при ℓ ∈ {3, 5, 7}
ORDER_CAP = int(os.environ.get("STEINITZ_ORDER_CAP", "2500"))

DEFAULT_PRIME_BOUND = 1000
# Подгруппа W считается стабильной, если не росла на последних N простых
STABILITY_WINDOW = 50

FIXTURES_DIR = os.environ.get("STEINITZ_FIXTURES", os.path.join(BASE_DIR, "fixtures"))
# Метки проверок и сценариев: всегда из встроенного каталога
ANCHORS_FILE = os.path.join(BASE_DIR, "fixtures", "anchors.json")

LOG_FILE = os.environ.get("STEINITZ_LOG_FILE")
LOG_LEVEL = os.environ.get("STEINITZ_LOG_LEVEL", "WARNING")
LOG_FORMAT = '%(asctime)s %(levelname)s: %(message)s [in %(pathname)s:%(lineno)d]'
FAILURES_LOG_FORMAT = '%(asctime)s %(levelname)s: %(message)s'

# Параметры проверочных наборов
DEFAULT_SEED = 1
POWERS_INSTANCES = 500
POWERS_MAX_DIVISOR = 36
RAMIFICATION_PROFILES = 200
EFIELDS_MAX_ORDER = 625
W_ORACLE_MODULI = (2, 3, 4, 5, 8, 9)

# Поля, на которых гоняются наборы (имена фикстур)
SUITE_FIELDS = ("rationals", "q_sqrt_m5", "q_sqrt_m23")


def fixtures_dir(override=None):
    """Каталог фикстур: явный аргумент, затем STEINITZ_FIXTURES, затем встроенный."""
    if override:
        return override
    return os.environ.get("STEINITZ_FIXTURES", FIXTURES_DIR)
