"""
Exception hierarchy of the aeroacm package
"""


class AcmError(Exception):
    """ base class of all aeroacm errors """


class DomainError(AcmError, ValueError):
    """ argument outside the domain of the operation """


class NotHermitian(AcmError, ValueError):
    pass


class NotPSD(AcmError, ValueError):
    pass


class Singular(AcmError, ValueError):
    """ matrix is not (numerically) positive definite """


class DimensionMismatch(AcmError, ValueError):
    pass


class IndexOutOfRange(AcmError, IndexError):
    pass


class EmptyTable(AcmError):
    """ no ACM mode is feasible for the rate curve """


class OutOfRange(AcmError):
    """ distance at or beyond the maximum communication distance """


class BelowMinimumSeparation(AcmError):
    """ distance below the minimum aircraft separation """


class EmptySamples(AcmError, ValueError):
    pass


class InvalidAxis(AcmError, ValueError):
    pass


class ConfigError(AcmError, ValueError):
    """ invalid scenario parameter, `key` names the offending entry """

    def __init__(self, key, msg=''):
        self.key = key
        super().__init__("{}: {}".format(key, msg) if msg else str(key))
