# ------------------------------------------------------------------------------
# Purpose:       errors defines the exceptions raised by remirl.
#                remirl is a package for fitting relational event models and
#                recovering behavioral rewards from dyadic event sequences.
#
# Authors:       remirl contributors
#
# Copyright:     (c) 2026 remirl contributors
# License:       MIT, see LICENSE
# ------------------------------------------------------------------------------

__docformat__ = "google"


class RemIrlError(ValueError):
    '''
    Base class of every error remirl raises for bad input or unusable data.
    The class name is the error name reported by the command-line tool.
    '''
    @property
    def name(self) -> str:
        return self.__class__.__name__

    def to_dict(self) -> dict[str, str]:
        return {'error': self.name, 'message': str(self)}


# event histories and ingestion
class NonMonotoneTimestamps(RemIrlError):
    pass

class SelfDirectedEvent(RemIrlError):
    pass

class MixedTimestampPresence(RemIrlError):
    pass

class EndTimeBeforeLastEvent(RemIrlError):
    pass

class EmptyActionSpace(RemIrlError):
    pass

class MalformedRow(RemIrlError):
    def __init__(self, line_number: int, message: str) -> None:
        super().__init__(f'line {line_number}: {message}')
        self.line_number: int = line_number

class UnknownColumn(RemIrlError):
    pass

class EmptyFile(RemIrlError):
    pass

class EventOutsideActionSpace(RemIrlError):
    pass


# statistics
class UnknownStatistic(RemIrlError):
    pass

class CovariateDimensionMismatch(RemIrlError):
    pass


# likelihoods and fitting
class MissingTimestamps(RemIrlError):
    pass

class MissingEndTime(RemIrlError):
    pass

class DegenerateStatistic(RemIrlError):
    pass


# MDP construction
class UnclassifiableEvent(RemIrlError):
    pass

class UnobservedStateAction(RemIrlError):
    pass

class StateSpaceTooLarge(RemIrlError):
    pass


# IRL
class EmptyDemonstrations(RemIrlError):
    pass

class RealizedStateNotInCandidates(RemIrlError):
    pass


# configuration (bad flags, bad config objects)
class InvalidConfig(RemIrlError):
    pass
