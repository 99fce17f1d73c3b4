"""Exception types shared across the package."""


class InvalidInputError(ValueError):
    """An argument violates a documented precondition (bad shape, non-unit norm, ...)."""


class PreconditionError(ValueError):
    """A query-level precondition failed (e.g. start state in collision).

    Distinct from a planning failure: the caller handed us an invalid
    problem, no search was attempted.
    """


class SingularRotationError(ValueError):
    """Rotation magnitude at or too close to the 2*pi singularity."""


class ScenarioError(ValueError):
    """Scenario file failed to parse or validate; message carries field context."""
