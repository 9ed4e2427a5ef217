"""Exception hierarchy. Each class carries the CLI exit code it maps to."""


class QSteinError(Exception):
    exit_code = 10


class NotHermitian(QSteinError, ValueError):
    exit_code = 11


class NotPSD(QSteinError, ValueError):
    exit_code = 12


class TraceNotOne(QSteinError, ValueError):
    exit_code = 13


class NegativePowerOfKernel(QSteinError, ValueError):
    exit_code = 14


class DimensionMismatch(QSteinError, ValueError):
    exit_code = 15


class DimensionCapExceeded(QSteinError, ValueError):
    exit_code = 16

    def __init__(self, dim, cap):
        super().__init__(f"dimension {dim} exceeds dim_cap={cap}")
        self.dim = dim
        self.cap = cap


class SupportViolation(QSteinError, ValueError):
    exit_code = 17


class NegativeRate(QSteinError, ValueError):
    exit_code = 18


class EpsilonOutOfRange(QSteinError, ValueError):
    exit_code = 19


class RateUnreachable(QSteinError, ValueError):
    exit_code = 20


class DegenerateFamily(QSteinError, ValueError):
    exit_code = 21


class ExpectationMismatch(QSteinError, ValueError):
    exit_code = 22


class TypeCapExceeded(QSteinError, ValueError):
    exit_code = 23


class InternalInconsistency(QSteinError, RuntimeError):
    exit_code = 24


class InvalidDistribution(QSteinError, ValueError):
    exit_code = 25
