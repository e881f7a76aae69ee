"""Exception types. The CLI maps them onto exit codes via ``exit_code``."""


class OpinetError(Exception):
    exit_code = 1


class WrongRegime(OpinetError, ValueError):
    """An operation needs a dynamics regime the input is not in."""


class InvalidNetwork(OpinetError, ValueError):
    def __init__(self, issues):
        self.issues = list(issues)
        super().__init__("; ".join(repr(e) for e in self.issues))


class HorizonZero(OpinetError, ValueError):
    pass


class DimensionMismatch(OpinetError, ValueError):
    pass


class InsufficientData(OpinetError, ValueError):
    def __init__(self, needed: int, have: int):
        self.needed = needed
        self.have = have
        super().__init__(f"need {needed} opinion vectors, have {have}")


class ZeroInnateOpinion(OpinetError, ValueError):
    def __init__(self, indices):
        self.indices = sorted(int(i) for i in indices)
        super().__init__(f"zero innate opinion at individuals {[i + 1 for i in self.indices]}")


class NotSolvable(OpinetError):
    exit_code = 2

    def __init__(self, report, message=None):
        self.report = report
        super().__init__(message or f"not solvable: {report.verdict} (rank {report.rank_P})")


class ZeroInnate(NotSolvable):
    """A nonzero diagonal sits on an individual whose innate opinion is zero."""


class EmptyWindowSet(OpinetError):
    exit_code = 2


class DegenerateSource(OpinetError, ValueError):
    pass


class AllSamplesDegenerate(OpinetError):
    exit_code = 2


class InvariantBreach(OpinetError):
    exit_code = 3


class SingularSystem(InvariantBreach):
    pass
