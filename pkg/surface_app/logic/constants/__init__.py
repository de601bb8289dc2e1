from .constants import (
    DEFAULT_DISTANCES,
    DEFAULT_P_MAX,
    DEFAULT_P_MIN,
    DEFAULT_P_STEPS,
    MAX_API_CYCLES,
    MAX_API_SHOTS,
    MAX_API_TRIALS,
    MAX_DUMP_DISTANCE,
    REPLAY_COLUMNS,
)
