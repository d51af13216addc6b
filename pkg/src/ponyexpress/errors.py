"""Exception hierarchy shared by the solvers and the command line."""


class PonyError(Exception):
    """Base class for solver-side failures."""


class DegenerateSpeed(PonyError):
    pass


class CoincidentPoints(PonyError):
    pass


class NoRoot(PonyError):
    pass


class DegenerateInstance(PonyError):
    pass


class Unreachable(PonyError):
    pass


class GridTooLarge(PonyError):
    def __init__(self, message: str, min_eps_prime: float):
        super().__init__(message)
        self.min_eps_prime = min_eps_prime


class InvalidN(PonyError):
    pass


class GeometryInfeasible(PonyError):
    pass


class TooLarge(PonyError):
    pass


class InfeasiblePlan(PonyError):
    pass
