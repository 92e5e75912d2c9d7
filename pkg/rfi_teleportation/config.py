"""
DESCRIPTION:
    Default parameters shared by the library and the command-line front end.

CONFIGURATION:
    All defaults are adjustable in the "CONFIGURATION" section below. Every
    value can also be overridden per call (library) or per invocation (flags).
"""

### CONFIGURATION ###
TOOL_VERSION = '1.0.0'

DEFAULT_TOLERANCE = 1e-9  # Absolute entrywise tolerance for every numerical comparison
ELEMENT_CAP = 10080  # Largest group order accepted by the closure and the subgroup search

DEFAULT_SEED = 7  # Seed for random input states and for the equivariant basis search
DEFAULT_TRIALS = 8  # Random pure input states per frame pair
ONB_RETRIES = 32  # Attempts of the randomized orbit orthogonalization

PERFECT_SLACK = 10  # Fidelity counts as perfect when >= 1 - PERFECT_SLACK * tolerance
MAX_DIMENSION_GUARANTEED = 4  # Commuting Hadamards exist for every permutation action up to this size

DEFAULT_OUTPUT_DIR = 'output'
DEMO_NAMES = ['z2']
### END OF CONFIGURATION ###
