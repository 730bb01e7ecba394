# Index conventions for the Hodge-Tate and opposedness tests
FW_SHIFT_CALIBRATED = -4
FW_SHIFT_LITERAL = 0
SAITO_SHIFT_DEFAULT = -2

# Nondegeneracy probe
PROBE_TRIALS_DEFAULT = 200
PROBE_SAMPLE_VALUES = ("1", "-1", "2", "-2", "1/2", "-1/2")

DEFAULT_THREADS = 4
THREADS_ENV = "HODGEFORGE_THREADS"

WHEEL_D_MIN = 2
WHEEL_D_MAX = 9
WHEEL_EULER_X = 12

# Ample class multipliers tried on the blown-up toric 3-fold
AMPLE_MULTIPLIERS = (2, 4, 8, 16, 32, 64, 128)

REPORT_SCHEMA = "hodgeforge/v1"
