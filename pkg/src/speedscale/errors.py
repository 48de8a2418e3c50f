"""Exception hierarchy.

Three families map onto the CLI exit codes: input problems (2), infeasibility
(3) and internal audit failures (4).
"""


class SpeedScaleError(Exception):
    exit_code = 1


class InputError(SpeedScaleError):
    exit_code = 2


class InfeasibleError(SpeedScaleError):
    exit_code = 3


class AuditError(SpeedScaleError):
    exit_code = 4


# -- profile / instance validation -------------------------------------------

class ProfileError(InputError):
    pass


class EmptyProfile(ProfileError):
    pass


class NonMonotoneSpeeds(ProfileError):
    def __init__(self, indices, message=None):
        self.indices = tuple(indices)
        super().__init__(message or f"speeds/powers not strictly increasing or not positive at {self.indices}")


class SuperfluousSpeed(ProfileError):
    """Interior speed levels that are convex combinations of their neighbours."""

    def __init__(self, indices):
        self.indices = tuple(indices)
        super().__init__(f"superfluous speed level(s) {self.indices}: shrinking energies not strictly increasing")


class JobError(InputError):
    def __init__(self, job, message):
        self.job = job
        super().__init__(f"job {job}: {message}")


class NonPositiveVolume(JobError):
    def __init__(self, job):
        super().__init__(job, "volume must be > 0")


class NonPositiveWeight(JobError):
    def __init__(self, job):
        super().__init__(job, "weight must be > 0")


class NegativeRelease(JobError):
    def __init__(self, job):
        super().__init__(job, "release must be >= 0")


class OrderingError(InputError):
    pass


class OrderingSizeMismatch(OrderingError):
    pass


class NotUnitInstance(InputError):
    pass


class NotFifoSchedule(InputError):
    pass


class SpeedOutOfRange(InputError):
    def __init__(self, job, speed):
        self.job = job
        super().__init__(f"job {job}: average speed {speed} outside [s_1, s_k]")


class TargetOutOfRange(InputError):
    pass


class EpsilonTooLarge(InputError):
    pass


class TooLarge(InputError):
    pass


class ParseError(InputError):
    pass


class PreconditionViolated(InputError):
    pass


class BudgetOutOfRange(PreconditionViolated):
    pass


class NotTwoSpeeds(PreconditionViolated):
    pass


class AlphaOutOfRange(PreconditionViolated):
    pass


# -- infeasibility -------------------------------------------------------------

class InfeasibleSchedule(InfeasibleError):
    pass


class Infeasible(InfeasibleError):
    """An LP (or every LP of an enumeration) has no feasible point."""


# -- audits --------------------------------------------------------------------

class ReconstructionMismatch(AuditError):
    pass


class AuditFailed(AuditError):
    pass


class Unbounded(AuditError):
    pass
