"""Exception hierarchy shared across the package."""


class FlowQuboError(Exception):
    """Base class for every error raised by this package."""


class DimensionError(FlowQuboError):
    """An assignment, matrix or index does not match the model size."""


class ModelError(FlowQuboError):
    """A model is malformed: unknown variables, bad senses, invalid values."""


class ReformulationError(FlowQuboError):
    """A binary program cannot be compiled into a QUBO as requested."""


class ExhaustiveLimitError(FlowQuboError):
    """An exhaustive operation was asked to enumerate more states than allowed."""


class SampleFormatError(FlowQuboError):
    """A sample file violates the expected schema."""


class EnergyMismatchError(SampleFormatError):
    """Imported energies disagree with recomputation against the given model.

    ``mismatches`` holds ``(assignment, stated, recomputed)`` triples.
    """

    def __init__(self, mismatches):
        self.mismatches = list(mismatches)
        lines = ", ".join(
            "%s: stated %r vs recomputed %r" % ("".join(map(str, a)), s, r)
            for a, s, r in self.mismatches[:5]
        )
        more = "" if len(self.mismatches) <= 5 else " (+%d more)" % (len(self.mismatches) - 5)
        super().__init__("energy mismatch beyond tolerance for %d record(s): %s%s"
                         % (len(self.mismatches), lines, more))


class SolverError(FlowQuboError):
    """A solver failed to run (as opposed to proving a model infeasible)."""
