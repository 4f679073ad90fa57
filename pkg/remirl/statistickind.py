# ------------------------------------------------------------------------------
# Purpose:       statistickind defines the kinds of sufficient statistics that
#                can be requested of remirl.
#                remirl is a package for fitting relational event models and
#                recovering behavioral rewards from dyadic event sequences.
#
# Authors:       remirl contributors
#
# Copyright:     (c) 2026 remirl contributors
# License:       MIT, see LICENSE
# ------------------------------------------------------------------------------

from enum import IntEnum

from remirl.errors import UnknownStatistic


class StatisticKind(IntEnum):
    # 1 if the candidate reverses the most recent event (type ignored), else 0
    Reciprocity = 1

    # how often the candidate (sender, receiver, type) already happened
    Inertia = 2

    # share of past events sent by the candidate's sender
    SenderActivity = 3

    # share of past events received by the candidate's receiver
    ReceiverPopularity = 4

    # one column of a per-action covariate matrix
    Covariate = 5

    @classmethod
    def fromName(cls, name: str) -> tuple['StatisticKind', bool, int]:
        '''
        Map a statistic name (as typed on the command line) to
        (kind, raw_count, covariate_index).
        '''
        name = name.strip().lower()
        if name in _NAMES:
            kind, raw = _NAMES[name]
            return kind, raw, 0
        for prefix in ('covariate', 'cov_', 'cov'):
            if name.startswith(prefix) and name[len(prefix):].isdecimal():
                return cls.Covariate, False, int(name[len(prefix):])
        raise UnknownStatistic(f'unknown statistic {name!r}')

    @classmethod
    def isFraction(cls, val: int) -> bool:
        return val in (cls.Inertia, cls.SenderActivity, cls.ReceiverPopularity)

    @classmethod
    def isHistoryFree(cls, val: int) -> bool:
        return val == cls.Covariate


_NAMES: dict[str, tuple[StatisticKind, bool]] = {
    'reciprocity': (StatisticKind.Reciprocity, False),
    'inertia': (StatisticKind.Inertia, False),
    'inertiacount': (StatisticKind.Inertia, True),
    'senderactivity': (StatisticKind.SenderActivity, False),
    'receiverpopularity': (StatisticKind.ReceiverPopularity, False),
}
