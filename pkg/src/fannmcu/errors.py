"""Exception hierarchy.

Every domain error derives from :class:`FannMcuError` so the CLI can map
them all to one exit code.
"""


class FannMcuError(Exception):
    """Base class for all domain errors raised by fannmcu."""


# model-core
class UnsupportedVersion(FannMcuError):
    pass


class NotFullyConnected(FannMcuError):
    pass


class MalformedField(FannMcuError):
    pass


class HeaderMismatch(FannMcuError):
    pass


class RaggedRow(FannMcuError):
    pass


class WeightCountMismatch(FannMcuError):
    pass


# engine
class DimensionMismatch(FannMcuError):
    pass


class FormatMismatch(FannMcuError):
    pass


# quantize
class Unquantizable(FannMcuError):
    pass


class UnboundedActivation(FannMcuError):
    pass


# memplan
class NetworkTooLarge(FannMcuError):
    pass


class TargetFileError(FannMcuError):
    pass


# codegen
class FlavorMismatch(FannMcuError):
    pass


class GoldenMismatch(FannMcuError):
    def __init__(self, message, diff=""):
        super().__init__(message)
        self.diff = diff


# costsim
class InconsistentPlan(FannMcuError):
    pass
