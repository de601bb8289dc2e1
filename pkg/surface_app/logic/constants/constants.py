DEFAULT_DISTANCES = [3, 5, 7]
DEFAULT_P_MIN = 3e-3
DEFAULT_P_MAX = 1.2e-2
DEFAULT_P_STEPS = 8

# the lattice debug dump gets unreadable well before this
MAX_DUMP_DISTANCE = 25

# requests above these sizes are sent to the CLI instead
MAX_API_TRIALS = 5000
MAX_API_CYCLES = 1_000_000
MAX_API_SHOTS = 200_000

REPLAY_COLUMNS = ["cycle", "kind", "nodes", "edges", "weight", "time_us"]
