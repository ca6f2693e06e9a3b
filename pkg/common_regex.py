# common_regex.py
import re

# Циклическая группа: C8, c27
CYCLIC_REGEX = re.compile(r'^[cC](\d+)$')
# Прямое произведение циклических: C9xC3, C3xC3xC3
DIRECT_CYCLIC_REGEX = re.compile(r'^[cC]\d+(?:[xX][cC]\d+)+$')
# Гейзенберг: heis3, heisenberg5
HEISENBERG_REGEX = re.compile(r'^heis(?:enberg)?(\d+)$', re.IGNORECASE)
# Модулярная группа: mod3_4
MODULAR_REGEX = re.compile(r'^mod(?:ular)?(\d+)_(\d+)$', re.IGNORECASE)
# Двупорождённая группа порядка ℓ³: tg3_1_0 (ℓ, a, c)
TWO_GEN_REGEX = re.compile(r'^tg(\d+)_(\d+)_(\d+)$', re.IGNORECASE)

# Поля: Q, QQ, rationals
RATIONALS_REGEX = re.compile(r'^(?:Q|QQ|rationals)$')
# Мнимое квадратичное: Q(sqrt-5), Q(sqrt(-5)), imag5
IMAG_QUADRATIC_REGEX = re.compile(r'^(?:Q\(sqrt\(?-(\d+)\)?\)|imag(\d+))$', re.IGNORECASE)
