"""Exception types shared across the package."""


class SpecError(ValueError):
    """Invalid construction: bad family parameters, malformed function
    documents, or a monotonicity violation on the declared domain box."""


class DomainError(ValueError):
    """Evaluation outside the admissible domain: non-positive inputs to
    fractional powers or logarithms, points outside the positive orthant,
    or values that make the requested quantity undefined."""


class HypothesisError(DomainError):
    """A verification routine was handed an input that fails the hypothesis
    it needs (for example a function with no constant substitution
    elasticity)."""
