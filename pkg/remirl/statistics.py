# ------------------------------------------------------------------------------
# Purpose:       statistics computes the sufficient statistics u(a, A) of every
#                candidate action given an event-history prefix.
#                remirl is a package for fitting relational event models and
#                recovering behavioral rewards from dyadic event sequences.
#
# Authors:       remirl contributors
#
# Copyright:     (c) 2026 remirl contributors
# License:       MIT, see LICENSE
# ------------------------------------------------------------------------------

__docformat__ = "google"

import typing as t

import numpy as np

from remirl.errors import CovariateDimensionMismatch, InvalidConfig
from remirl.events import ActionSpace, ActionTriple, DyadicEvent, EventHistory, EventUtils
from remirl.statistickind import StatisticKind

# a prefix can be given as events or as bare (sender, receiver, type) triples
Prefix = t.Sequence[DyadicEvent] | t.Sequence[ActionTriple]


class StatisticSpec:
    def __init__(
        self,
        kind: StatisticKind,
        window: int | None = None,
        raw: bool = False,
        covariate_index: int = 0
    ) -> None:
        '''
        One requested sufficient statistic.

        Args:
            kind (StatisticKind): which statistic.
            window (int | None): memory length in events (None = full history).
            raw (bool): Inertia only; count repetitions instead of taking
                their fraction of the prefix.
            covariate_index (int): Covariate only; which covariate column.
        '''
        if window is not None and window < 0:
            raise InvalidConfig(f'statistic window must be non-negative, got {window}')
        if covariate_index < 0:
            raise InvalidConfig(f'covariate index must be non-negative, got {covariate_index}')
        self.kind: StatisticKind = kind
        self.window: int | None = window
        self.raw: bool = raw and kind == StatisticKind.Inertia
        self.covariate_index: int = covariate_index

    @property
    def label(self) -> str:
        name: str
        if self.kind == StatisticKind.Covariate:
            name = f'cov{self.covariate_index}'
        elif self.raw:
            name = 'inertiacount'
        else:
            name = self.kind.name.lower()
        if self.window is not None:
            name += f'@{self.window}'
        return name

    def __eq__(self, other) -> bool:
        if not isinstance(other, StatisticSpec):
            return False
        return repr(self) == repr(other)

    def __hash__(self) -> int:
        return hash(repr(self))

    def __repr__(self) -> str:
        return f'StatisticSpec({self.label})'


class _WindowCounts:
    # running counts over the last `window` events (all events when None)
    def __init__(self, window: int | None, n_actions: int, n_actors: int) -> None:
        self.window: int | None = window
        self.actions: np.ndarray = np.zeros(n_actions, dtype=np.int64)
        self.senders: np.ndarray = np.zeros(n_actors, dtype=np.int64)
        self.receivers: np.ndarray = np.zeros(n_actors, dtype=np.int64)
        self.length: int = 0


class StatisticTracker:
    def __init__(
        self,
        space: ActionSpace,
        specs: t.Sequence[StatisticSpec],
        covariates: np.ndarray | None = None
    ) -> None:
        '''
        Incremental statistic matrix: push realized events one at a time and
        read the |A| x d matrix for the current prefix after each push.

        Args:
            space (ActionSpace): the candidate actions (rows).
            specs (Sequence[StatisticSpec]): the statistics (columns).
            covariates (np.ndarray | None): per-action covariates, |A| x p.
        '''
        if not specs:
            raise InvalidConfig('at least one statistic is required')
        self.space: ActionSpace = space
        self.specs: tuple[StatisticSpec, ...] = tuple(specs)
        self.covariates: np.ndarray | None = Statistics._check_covariates(space, specs, covariates)
        self._history: list[int] = []
        self._counts: dict[int | None, _WindowCounts] = {
            spec.window: _WindowCounts(spec.window, len(space), space.n_actors)
            for spec in self.specs
        }

    def push(self, action_index: int) -> None:
        self._history.append(action_index)
        arr: np.ndarray = self.space.array
        s, r, _ = arr[action_index]
        for wc in self._counts.values():
            wc.actions[action_index] += 1
            wc.senders[s] += 1
            wc.receivers[r] += 1
            wc.length += 1
            if wc.window is not None and len(self._history) > wc.window:
                old: int = self._history[-wc.window - 1]
                os_, or_, _ = arr[old]
                wc.actions[old] -= 1
                wc.senders[os_] -= 1
                wc.receivers[or_] -= 1
                wc.length -= 1

    def push_event(self, event: DyadicEvent) -> None:
        self.push(self.space.index(event.triple))

    def matrix(self) -> np.ndarray:
        arr: np.ndarray = self.space.array
        out: np.ndarray = np.zeros((len(self.space), len(self.specs)))
        for j, spec in enumerate(self.specs):
            wc: _WindowCounts = self._counts[spec.window]
            if spec.kind == StatisticKind.Reciprocity:
                if wc.length > 0:
                    ls, lr, _ = arr[self._history[-1]]
                    out[:, j] = (arr[:, 0] == lr) & (arr[:, 1] == ls)
            elif spec.kind == StatisticKind.Covariate:
                if self.covariates is not None:
                    out[:, j] = self.covariates[:, spec.covariate_index]
            elif StatisticKind.isFraction(spec.kind) and wc.length > 0:
                counts: np.ndarray
                if spec.kind == StatisticKind.Inertia:
                    counts = wc.actions
                elif spec.kind == StatisticKind.SenderActivity:
                    counts = wc.senders[arr[:, 0]]
                else:
                    counts = wc.receivers[arr[:, 1]]
                if spec.raw:
                    out[:, j] = counts
                else:
                    out[:, j] = counts / wc.length
        return out


class Statistics:
    @staticmethod
    def _windowed(prefix: Prefix, window: int | None) -> list[ActionTriple]:
        triples: list[ActionTriple] = [
            e.triple if isinstance(e, DyadicEvent) else tuple(e)  # type: ignore[misc]
            for e in prefix
        ]
        if window is None:
            return triples
        if window == 0:
            return []
        return triples[-window:]

    @staticmethod
    def _check_covariates(
        space: ActionSpace,
        specs: t.Sequence[StatisticSpec],
        covariates: np.ndarray | None
    ) -> np.ndarray | None:
        if covariates is None:
            return None
        covariates = np.asarray(covariates, dtype=float)
        if covariates.ndim != 2 or covariates.shape[0] != len(space):
            raise CovariateDimensionMismatch(
                f'covariates must be {len(space)} x p, got shape {covariates.shape}'
            )
        for spec in specs:
            if spec.kind == StatisticKind.Covariate and spec.covariate_index >= covariates.shape[1]:
                raise CovariateDimensionMismatch(
                    f'{spec.label} requested but only {covariates.shape[1]} covariates exist'
                )
        return covariates

    @staticmethod
    def reciprocity(candidate: ActionTriple, prefix: Prefix, window: int | None = None) -> int:
        triples: list[ActionTriple] = Statistics._windowed(prefix, window)
        if not triples:
            return 0
        last: ActionTriple = triples[-1]
        return int(candidate[0] == last[1] and candidate[1] == last[0])

    @staticmethod
    def inertia(
        candidate: ActionTriple,
        prefix: Prefix,
        window: int | None = None,
        raw: bool = False
    ) -> float:
        triples: list[ActionTriple] = Statistics._windowed(prefix, window)
        if not triples:
            return 0.
        count: int = sum(1 for tr in triples if tr == tuple(candidate))
        if raw:
            return float(count)
        return count / len(triples)

    @staticmethod
    def sender_activity(candidate: ActionTriple, prefix: Prefix, window: int | None = None) -> float:
        triples: list[ActionTriple] = Statistics._windowed(prefix, window)
        if not triples:
            return 0.
        return sum(1 for tr in triples if tr[0] == candidate[0]) / len(triples)

    @staticmethod
    def receiver_popularity(
        candidate: ActionTriple,
        prefix: Prefix,
        window: int | None = None
    ) -> float:
        triples: list[ActionTriple] = Statistics._windowed(prefix, window)
        if not triples:
            return 0.
        return sum(1 for tr in triples if tr[1] == candidate[1]) / len(triples)

    @staticmethod
    def statistic(
        spec: StatisticSpec,
        candidate: ActionTriple,
        prefix: Prefix,
        covariate_row: t.Sequence[float] | None = None
    ) -> float:
        '''
        Evaluate one statistic for one candidate (the scalar path; see
        `statistics_matrix` for the vectorized one).
        '''
        if spec.kind == StatisticKind.Reciprocity:
            return float(Statistics.reciprocity(candidate, prefix, spec.window))
        if spec.kind == StatisticKind.Inertia:
            return Statistics.inertia(candidate, prefix, spec.window, spec.raw)
        if spec.kind == StatisticKind.SenderActivity:
            return Statistics.sender_activity(candidate, prefix, spec.window)
        if spec.kind == StatisticKind.ReceiverPopularity:
            return Statistics.receiver_popularity(candidate, prefix, spec.window)
        if covariate_row is None:
            return 0.
        if spec.covariate_index >= len(covariate_row):
            raise CovariateDimensionMismatch(
                f'{spec.label} requested but only {len(covariate_row)} covariates exist'
            )
        return float(covariate_row[spec.covariate_index])

    @staticmethod
    def statistics_matrix(
        space: ActionSpace,
        prefix: t.Sequence[DyadicEvent],
        specs: t.Sequence[StatisticSpec],
        covariates: np.ndarray | None = None
    ) -> np.ndarray:
        '''
        The |A| x d statistic matrix for one history prefix: a row per action
        (in the space's ordering), a column per spec.

        Args:
            space (ActionSpace): candidate actions.
            prefix (Sequence[DyadicEvent]): realized events, oldest first.
            specs (Sequence[StatisticSpec]): requested statistics (non-empty).
            covariates (np.ndarray | None): per-action covariates, |A| x p.

        Returns:
            np.ndarray: the statistic matrix.
        '''
        tracker = StatisticTracker(space, specs, covariates)
        for e in prefix:
            tracker.push_event(e)
        return tracker.matrix()

    @staticmethod
    def history_tensor(
        space: ActionSpace,
        history: EventHistory,
        specs: t.Sequence[StatisticSpec],
        covariates: np.ndarray | None = None
    ) -> np.ndarray:
        '''
        Statistic matrices for every prefix A_0 .. A_M of a history, stacked
        into an (M+1) x |A| x d array.  Slice i is computed from the first i
        events only.
        '''
        tracker = StatisticTracker(space, specs, covariates)
        indices: np.ndarray = EventUtils.action_indices(space, history)
        out: np.ndarray = np.empty((len(indices) + 1, len(space), len(tracker.specs)))
        for i in range(len(indices) + 1):
            out[i] = tracker.matrix()
            if i < len(indices):
                tracker.push(int(indices[i]))
        return out

    @staticmethod
    def parse_specs(text: str) -> list[StatisticSpec]:
        '''
        Parse `name[@window],...`, e.g. `reciprocity,inertia@50,cov0`.
        '''
        specs: list[StatisticSpec] = []
        for item in text.split(','):
            item = item.strip()
            if not item:
                continue
            name, _, windowText = item.partition('@')
            window: int | None = None
            if windowText:
                if not windowText.strip().isdecimal():
                    raise InvalidConfig(f'bad window in statistic {item!r}')
                window = int(windowText)
            kind, raw, covIdx = StatisticKind.fromName(name)
            specs.append(StatisticSpec(kind, window, raw, covIdx))
        if not specs:
            raise InvalidConfig('no statistics given')
        return specs

    @staticmethod
    def format_specs(specs: t.Sequence[StatisticSpec]) -> str:
        return ','.join(spec.label for spec in specs)
