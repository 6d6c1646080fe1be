"""Exception taxonomy for the toolkit.

Every failure mode that a caller can meaningfully branch on gets its own
class.  All of them derive from CompassError; input/shape problems that the
CLI maps to exit code 2 derive from InputError.
"""
from __future__ import annotations


class CompassError(Exception):
    """Base class for all toolkit errors."""


class InputError(CompassError):
    """Malformed or out-of-contract input (CLI exit code 2)."""


# model space ---------------------------------------------------------------

class InvalidTriangle(InputError):
    """Side lengths do not bound a (unique) model triangle."""


class DegenerateSide(InputError):
    """A hinge/angle computation received a side at or below tolerance."""


class DomainError(InputError):
    """Arguments outside the mathematical domain of the operation."""


class PreconditionFailed(InputError):
    """A named precondition of the operation does not hold."""

    def __init__(self, condition: str):
        super().__init__(condition)
        self.condition = condition


# ODE / comparison solvers --------------------------------------------------

class StepTooLarge(InputError):
    """Integration step incompatible with the horizon."""


class ProfileUndefined(InputError):
    """Curvature profile evaluated outside its domain or non-finite."""


class ProfileOrderViolated(InputError):
    """The pointwise ordering hypothesis between two profiles fails."""


# finite metric spaces ------------------------------------------------------

class MetricError(InputError):
    """A distance-matrix axiom fails."""


class NotSymmetric(MetricError):
    def __init__(self, i: int, j: int):
        super().__init__(f"d[{i}][{j}] != d[{j}][{i}]")
        self.indices = (i, j)


class NegativeEntry(MetricError):
    def __init__(self, i: int, j: int):
        super().__init__(f"d[{i}][{j}] < 0")
        self.indices = (i, j)


class NonzeroDiagonal(MetricError):
    def __init__(self, i: int):
        super().__init__(f"d[{i}][{i}] != 0")
        self.index = i


class DuplicatePoint(MetricError):
    def __init__(self, i: int, j: int):
        super().__init__(f"points {i} and {j} are at distance 0")
        self.indices = (i, j)


class TriangleViolation(MetricError):
    def __init__(self, i: int, j: int, k: int, slack: float = 0.0):
        super().__init__(f"d[{i}][{k}] > d[{i}][{j}] + d[{j}][{k}] (by {slack:g})")
        self.indices = (i, j, k)
        self.slack = slack


class Disconnected(InputError):
    """Graph ingestion found unreachable vertex pairs."""


class NonpositiveWeight(InputError):
    """Graph ingestion found an edge weight <= 0."""


class ComparisonUndefined(CompassError):
    """No valid comparison triangle exists for the requested triple."""


class DegenerateTriple(CompassError):
    """A comparison involving duplicate points was requested."""


class NotOnGeodesic(InputError):
    """The probe point does not lie on a geodesic between the endpoints."""


class NotAGeodesicChain(InputError):
    """The chain is not a discrete geodesic toward the site."""


# Gromov-Hausdorff ----------------------------------------------------------

class EmptySet(InputError):
    """An operation received an empty point set."""


class TooLarge(InputError):
    """Instance exceeds the exhaustive-search size cap."""


class NonpositiveScale(InputError):
    """Rescaling factor must be positive."""


# lattices ------------------------------------------------------------------

class RankTooLarge(InputError):
    """Exhaustive lattice check requested above the supported rank."""


# semi-concave flows --------------------------------------------------------

class NotConcave(InputError):
    """Operation requires a concave function (lambda bound <= 0)."""


class NotOneLipschitz(InputError):
    """Operation requires all branch gradients to have norm <= 1."""


class TooFewSamples(InputError):
    """Sampled-function check needs at least three samples."""


# cones / products ----------------------------------------------------------

class NegativeRadius(InputError):
    """Cone points need radius >= 0."""


class NoMidpoint(InputError):
    """No sample point realizes an approximate midpoint within tolerance."""


class WeightsInvalid(InputError):
    """Weights must be nonnegative and sum to 1."""


class PointsTooFarApart(InputError):
    """Point cloud exceeds the curve family's pair-distance bound."""
