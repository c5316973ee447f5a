class ChainSpecError(ValueError):
    """Chain geometry or coupling lists are inconsistent."""


class NoiseFieldError(ValueError):
    """A noise entry names a bond or site that is not part of the chain."""


class MappingError(ValueError):
    """Branched <-> effective linear mapping is undefined for the given spec."""


class NumericError(ArithmeticError):
    """Non-finite Hamiltonian entries or a failed eigendecomposition."""


class ScheduleError(ValueError):
    pass


class MetricError(ValueError):
    pass


class OracleSizeError(ValueError):
    pass


class ScanError(ValueError):
    pass


class SingularParameterError(ValueError):
    pass
