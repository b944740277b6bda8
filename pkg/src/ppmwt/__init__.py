"""Secret communication over the pure-loss bosonic wiretap channel.

Coherent-state PPM with direct detection, a Reed-Solomon erasure code and a
finite-field extractor, plus the finite-length error and secrecy bounds and
the parameter optimizer built on them.
"""

from ppmwt.params import InfeasibleError, SchemeParams

__all__ = ["InfeasibleError", "SchemeParams"]
__version__ = "0.1.0"
