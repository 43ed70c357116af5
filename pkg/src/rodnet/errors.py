"""Exception types shared across the package."""


class DomainError(ValueError):
    """An input lies outside the domain where a quantity is defined."""


class SingularShapeError(DomainError):
    """A step-length tensor would be singular (det L = 0)."""


class SolverFailure(RuntimeError):
    """No admissible minimizer was found.

    ``diagnostics`` carries whatever the solver had at hand when it gave up,
    typically the scanned grid and energies.
    """

    def __init__(self, message, diagnostics=None):
        super().__init__(message)
        self.diagnostics = diagnostics or {}


class ConfigError(ValueError):
    """Bad experiment configuration; ``field`` and ``line`` point at the culprit."""

    def __init__(self, message, field=None, line=None):
        where = []
        if line is not None:
            where.append(f"line {line}")
        if field is not None:
            where.append(f"field '{field}'")
        prefix = f"[{', '.join(where)}] " if where else ""
        super().__init__(prefix + message)
        self.field = field
        self.line = line
