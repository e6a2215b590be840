"""Exception types raised across the package."""


class AlphabetMismatchError(ValueError):
    """Two objects that must share an alphabet do not."""


class InfeasibleError(RuntimeError):
    """A constraint set is empty (e.g. no test channel meets the distortion target)."""


class SolverError(RuntimeError):
    """A numerical solver failed to return a usable solution."""


class UnsupportedSizeError(ValueError):
    """Alphabet or blocklength exceeds an enumeration cap."""
