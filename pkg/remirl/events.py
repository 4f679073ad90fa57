# ------------------------------------------------------------------------------
# Purpose:       events defines dyadic events, event histories and action spaces,
#                plus the CSV ingestion used by remirl.
#                remirl is a package for fitting relational event models and
#                recovering behavioral rewards from dyadic event sequences.
#
# Authors:       remirl contributors
#
# Copyright:     (c) 2026 remirl contributors
# License:       MIT, see LICENSE
# ------------------------------------------------------------------------------

__docformat__ = "google"

import io
import re
import typing as t
from pathlib import Path

import numpy as np
import pandas as pd

from remirl.errors import (
    NonMonotoneTimestamps, SelfDirectedEvent, MixedTimestampPresence,
    EndTimeBeforeLastEvent, EmptyActionSpace, MalformedRow, UnknownColumn,
    EmptyFile, EventOutsideActionSpace, CovariateDimensionMismatch, InvalidConfig
)

# (sender, receiver, action_type)
ActionTriple = tuple[int, int, int]
Permissibility = t.Callable[[int, int, int], bool]

COVARIATE_PREFIX: str = 'cov_'
_KNOWN_COLUMNS: tuple[str, ...] = ('time', 'sender', 'receiver', 'type')
_PARSER_LINE: re.Pattern = re.compile(r'line (\d+)')


class DyadicEvent(t.NamedTuple):
    '''
    One directed interaction.  Actors and types are dense indices; the labels
    live in the roster returned by `EventUtils.parse_event_csv`.
    '''
    sender: int
    receiver: int
    action_type: int = 0
    timestamp: float | None = None
    covariates: tuple[float, ...] | None = None

    @property
    def triple(self) -> ActionTriple:
        return (self.sender, self.receiver, self.action_type)


class EventHistory:
    def __init__(
        self,
        events: t.Iterable[DyadicEvent],
        origin_time: float = 0.,
        end_time: float | None = None
    ) -> None:
        '''
        A validated, time-ordered sequence of dyadic events.  Build these with
        `EventUtils.validate_history` rather than directly.

        Args:
            events (Iterable[DyadicEvent]): the events, oldest first.
            origin_time (float): timestamp of the place-holder origin event.
            end_time (float | None): end of the observation window, if known.
        '''
        self.events: tuple[DyadicEvent, ...] = tuple(events)
        self.origin_time: float = origin_time
        self.end_time: float | None = end_time

    @property
    def is_timestamped(self) -> bool:
        return len(self.events) > 0 and self.events[0].timestamp is not None

    def timestamps(self) -> np.ndarray:
        if not self.is_timestamped:
            return np.zeros(0)
        return np.array([e.timestamp for e in self.events], dtype=float)

    def __len__(self) -> int:
        return len(self.events)

    def __iter__(self) -> t.Iterator[DyadicEvent]:
        return iter(self.events)

    def __getitem__(self, idx: int) -> DyadicEvent:
        return self.events[idx]

    def __eq__(self, other) -> bool:
        if not isinstance(other, EventHistory):
            return False
        return (
            self.events == other.events
            and self.origin_time == other.origin_time
            and self.end_time == other.end_time
        )

    def __repr__(self) -> str:
        return (
            f'EventHistory(M={len(self.events)}, origin={self.origin_time}, '
            f'end={self.end_time})'
        )


class ActionSpace:
    def __init__(
        self,
        n_actors: int,
        n_types: int,
        actions: t.Sequence[ActionTriple],
        permissibility: Permissibility | None = None
    ) -> None:
        self.n_actors: int = n_actors
        self.n_types: int = n_types
        self.actions: tuple[ActionTriple, ...] = tuple(actions)
        self.permissibility: Permissibility | None = permissibility
        self.array: np.ndarray = np.array(self.actions, dtype=np.int64).reshape(-1, 3)
        self._index: dict[ActionTriple, int] = {a: i for i, a in enumerate(self.actions)}

    def __len__(self) -> int:
        return len(self.actions)

    def __contains__(self, triple: ActionTriple) -> bool:
        return triple in self._index

    def index(self, triple: ActionTriple) -> int:
        try:
            return self._index[triple]
        except KeyError:
            raise EventOutsideActionSpace(
                f'action (sender={triple[0]}, receiver={triple[1]}, type={triple[2]}) '
                'is not in the action space'
            ) from None

    def __repr__(self) -> str:
        return f'ActionSpace(N={self.n_actors}, C={self.n_types}, size={len(self.actions)})'


class ParsedEvents(t.NamedTuple):
    events: list[DyadicEvent]
    roster: list[str]
    covariate_names: list[str]
    has_types: bool


class EventUtils:
    @staticmethod
    def validate_history(
        events: t.Sequence[DyadicEvent],
        end_time: float | None = None,
        origin_time: float = 0.,
        covariate_dim: int | None = None
    ) -> EventHistory:
        '''
        Check a list of events and wrap it in an `EventHistory`.

        Args:
            events (Sequence[DyadicEvent]): events in file order.
            end_time (float | None): end of the observation window.
            origin_time (float): time of the origin marker (default 0).
            covariate_dim (int | None): declared covariate length; if None, the
                first event's covariate length is used.

        Returns:
            EventHistory: the validated history.

        Raises:
            SelfDirectedEvent, MixedTimestampPresence, NonMonotoneTimestamps,
            EndTimeBeforeLastEvent, CovariateDimensionMismatch
        '''
        if not events:
            return EventHistory((), origin_time, end_time)

        timed: bool = events[0].timestamp is not None
        if covariate_dim is None:
            covariate_dim = len(events[0].covariates or ())

        prevTime: float = origin_time
        for i, e in enumerate(events):
            if e.sender == e.receiver:
                raise SelfDirectedEvent(f'event {i} is sent by actor {e.sender} to itself')
            if (e.timestamp is not None) != timed:
                raise MixedTimestampPresence(
                    f'event {i} timestamp presence differs from event 0'
                )
            if len(e.covariates or ()) != covariate_dim:
                raise CovariateDimensionMismatch(
                    f'event {i} has {len(e.covariates or ())} covariates, '
                    f'expected {covariate_dim}'
                )
            if timed:
                if t.TYPE_CHECKING:
                    assert e.timestamp is not None
                if e.timestamp < prevTime:
                    raise NonMonotoneTimestamps(
                        f'event {i} at time {e.timestamp} precedes time {prevTime}'
                    )
                prevTime = e.timestamp

        if timed and end_time is not None and end_time < prevTime:
            raise EndTimeBeforeLastEvent(
                f'end time {end_time} is before the last event at {prevTime}'
            )

        return EventHistory(events, origin_time, end_time)

    @staticmethod
    def enumerate_action_space(
        n_actors: int,
        n_types: int = 1,
        permissibility: Permissibility | None = None
    ) -> ActionSpace:
        '''
        List every legal (sender, receiver, type) triple, sender-major, then
        receiver, then type.  Self-directed triples are never included.

        Args:
            n_actors (int): group size N (at least 2).
            n_types (int): number of action types |C| (at least 1).
            permissibility (callable | None): optional predicate
                `(sender, receiver, type) -> bool`; triples it rejects are left out.

        Returns:
            ActionSpace: the enumerated space (N(N-1)|C| actions when unmasked).
        '''
        if n_actors < 2:
            raise InvalidConfig(f'an action space needs at least 2 actors, got {n_actors}')
        if n_types < 1:
            raise InvalidConfig(f'an action space needs at least 1 type, got {n_types}')

        actions: list[ActionTriple] = []
        for s in range(n_actors):
            for r in range(n_actors):
                if s == r:
                    continue
                for c in range(n_types):
                    if permissibility is None or permissibility(s, r, c):
                        actions.append((s, r, c))

        if not actions:
            raise EmptyActionSpace('the permissibility mask rejects every action')
        return ActionSpace(n_actors, n_types, actions, permissibility)

    @staticmethod
    def team_permissibility(
        roster: t.Sequence[str],
        teams: t.Sequence[tuple[str, str]]
    ) -> Permissibility:
        '''
        Team communication rules: a driver may only speak to its own captain;
        a captain may speak to its own driver and to every other captain.

        Args:
            roster (Sequence[str]): actor labels, indexed by ActorId.
            teams (Sequence[tuple[str, str]]): (captain, driver) label pairs.
        '''
        ids: dict[str, int] = {label: i for i, label in enumerate(roster)}
        captainOf: dict[int, int] = {}
        captains: set[int] = set()
        for captain, driver in teams:
            for label in (captain, driver):
                if label not in ids:
                    raise InvalidConfig(f'team member {label!r} is not in the roster')
            captains.add(ids[captain])
            captainOf[ids[driver]] = ids[captain]

        def permits(s: int, r: int, _c: int) -> bool:
            if s in captainOf:
                return captainOf[s] == r
            if s in captains:
                return r in captains or captainOf.get(r) == s
            return False

        return permits

    @staticmethod
    def window(history: EventHistory, k: int, at_index: int) -> list[DyadicEvent]:
        '''
        The min(k, at_index) most recent events strictly before position
        `at_index`, most recent last.
        '''
        if k < 0:
            raise InvalidConfig(f'window length must be non-negative, got {k}')
        if not 0 <= at_index <= len(history):
            raise InvalidConfig(f'index {at_index} outside history of {len(history)} events')
        return list(history.events[max(0, at_index - k):at_index])

    @staticmethod
    def action_index(space: ActionSpace, event: DyadicEvent) -> int:
        return space.index(event.triple)

    @staticmethod
    def action_indices(space: ActionSpace, events: t.Iterable[DyadicEvent]) -> np.ndarray:
        return np.array([space.index(e.triple) for e in events], dtype=np.int64)

    @staticmethod
    def action_covariates(history: EventHistory, space: ActionSpace) -> np.ndarray:
        '''
        Per-action covariate vectors: the mean covariates of the events that
        realized each action, zero for actions never realized.
        '''
        dim: int = len(history.events[0].covariates or ()) if len(history) else 0
        sums: np.ndarray = np.zeros((len(space), dim))
        counts: np.ndarray = np.zeros(len(space))
        if dim == 0:
            return sums
        for e in history:
            idx: int = space.index(e.triple)
            sums[idx] += np.asarray(e.covariates, dtype=float)
            counts[idx] += 1
        np.divide(sums, counts[:, None], out=sums, where=counts[:, None] > 0)
        return sums

    @staticmethod
    def read_csv_frame(text: bytes | str) -> tuple[list[str], pd.DataFrame]:
        '''
        Read CSV text as stripped string cells.  Missing trailing cells become
        '' and rows with no content are dropped.  A row's index plus one is its
        line number, counting non-empty lines only (the header is line 1).

        Returns:
            tuple[list[str], pd.DataFrame]: the header cells and the data rows.

        Raises:
            EmptyFile, MalformedRow
        '''
        if isinstance(text, bytes):
            try:
                text = text.decode('utf-8-sig')
            except UnicodeDecodeError as e:
                raise MalformedRow(1, f'not valid UTF-8 ({e})') from None
        try:
            raw: pd.DataFrame = pd.read_csv(
                io.StringIO(text.lstrip('\ufeff')),
                header=None,
                dtype=str,
                keep_default_na=False,
                skip_blank_lines=True,
            )
        except pd.errors.EmptyDataError:
            raise EmptyFile('no header row') from None
        except pd.errors.ParserError as e:
            found: re.Match | None = _PARSER_LINE.search(str(e))
            raise MalformedRow(int(found.group(1)) if found else 0, str(e)) from None

        raw = raw.fillna('').apply(lambda col: col.str.strip())
        header: list[str] = raw.iloc[0].tolist()
        rows: pd.DataFrame = raw.iloc[1:]
        rows = rows[(rows != '').any(axis=1)]
        return header, rows

    @staticmethod
    def _numeric_column(cells: pd.Series, what: str) -> pd.Series:
        # blank cells become NaN; every other cell must hold a finite number
        filled: pd.Series = cells.where(cells != '')
        values: pd.Series
        try:
            values = filled.astype(float)
        except ValueError:
            values = pd.to_numeric(filled, errors='coerce')
        bad: pd.Series = (cells != '') & ~np.isfinite(values)
        if bad.any():
            idx = bad.idxmax()
            raise MalformedRow(int(idx) + 1, f'{what} {cells.loc[idx]!r} is not a finite number')
        return values

    @staticmethod
    def parse_event_csv(text: bytes | str) -> ParsedEvents:
        '''
        Parse the event-list CSV schema: header `time,sender,receiver,type[,cov_*...]`
        where `time` and `type` are optional.  Actor labels are interned into
        the roster in order of first appearance.  A blank `time` cell gives an
        untimed event (validation then rejects the mix).

        Args:
            text (bytes | str): the file contents (UTF-8 when bytes).

        Returns:
            ParsedEvents: events (unvalidated), roster, covariate column names,
                and whether a type column was present.

        Raises:
            EmptyFile, UnknownColumn, MalformedRow
        '''
        header, rows = EventUtils.read_csv_frame(text)
        seen: set[str] = set()
        for col in header:
            if col in seen:
                raise UnknownColumn(f'duplicate column {col!r}')
            seen.add(col)
            if col not in _KNOWN_COLUMNS and not col.startswith(COVARIATE_PREFIX):
                raise UnknownColumn(f'unknown column {col!r}')
        for required in ('sender', 'receiver'):
            if required not in seen:
                raise UnknownColumn(f'missing required column {required!r}')
        rows = rows.set_axis(header, axis=1)
        covNames: list[str] = [c for c in header if c.startswith(COVARIATE_PREFIX)]

        for col in ('sender', 'receiver'):
            blank: pd.Series = rows[col] == ''
            if blank.any():
                raise MalformedRow(int(blank.idxmax()) + 1, f'empty {col} label')
        # senders and receivers interleaved row by row give first-appearance order
        roster: list[str] = pd.unique(rows[['sender', 'receiver']].to_numpy().ravel()).tolist()
        ids: dict[str, int] = {label: i for i, label in enumerate(roster)}
        senders: list[int] = [ids[label] for label in rows['sender']]
        receivers: list[int] = [ids[label] for label in rows['receiver']]

        types: list[int] = [0] * len(rows)
        if 'type' in seen:
            ok: pd.Series = rows['type'].str.fullmatch(r'[0-9]+')
            if not ok.all():
                idx = (~ok).idxmax()
                raise MalformedRow(
                    int(idx) + 1, f'type {rows["type"].loc[idx]!r} is not a non-negative integer'
                )
            types = rows['type'].astype(int).tolist()

        timestamps: list[float | None] = [None] * len(rows)
        if 'time' in seen:
            times: pd.Series = EventUtils._numeric_column(rows['time'], 'time')
            timestamps = [None if np.isnan(x) else float(x) for x in times]

        covariates: list[tuple[float, ...] | None] = [None] * len(rows)
        if covNames:
            covFrame: pd.DataFrame = pd.concat(
                [EventUtils._numeric_column(rows[c], c) for c in covNames], axis=1
            )
            if covFrame.isna().to_numpy().any():
                idx = covFrame.isna().any(axis=1).idxmax()
                raise MalformedRow(int(idx) + 1, 'empty covariate cell')
            covariates = [tuple(float(x) for x in row) for row in covFrame.to_numpy()]

        events: list[DyadicEvent] = [
            DyadicEvent(s, r, c, ts, cov)
            for s, r, c, ts, cov in zip(senders, receivers, types, timestamps, covariates)
        ]
        return ParsedEvents(events, roster, covNames, 'type' in seen)

    @staticmethod
    def read_event_csv(path: str | Path) -> ParsedEvents:
        return EventUtils.parse_event_csv(Path(path).read_bytes())

    @staticmethod
    def load_event_file(
        path: str | Path,
        end_time: float | None = None,
        teams: t.Sequence[tuple[str, str]] | None = None
    ) -> 'LoadedEvents':
        '''
        Read an event-list CSV and build everything a fit needs: the validated
        history, the action space (every ordered actor pair and observed type,
        masked by `teams` when given) and the per-action covariates.  A
        timestamped history without an explicit end time ends at its last event.
        '''
        parsed: ParsedEvents = EventUtils.read_event_csv(path)
        if end_time is None and parsed.events and parsed.events[-1].timestamp is not None:
            end_time = max(e.timestamp for e in parsed.events if e.timestamp is not None)
        history: EventHistory = EventUtils.validate_history(
            parsed.events, end_time, covariate_dim=len(parsed.covariate_names)
        )
        nTypes: int = max((e.action_type for e in parsed.events), default=0) + 1
        permissibility: Permissibility | None = (
            EventUtils.team_permissibility(parsed.roster, teams) if teams else None
        )
        space: ActionSpace = EventUtils.enumerate_action_space(
            len(parsed.roster), nTypes, permissibility
        )
        covariates: np.ndarray | None = (
            EventUtils.action_covariates(history, space) if parsed.covariate_names else None
        )
        return LoadedEvents(history, space, parsed.roster, parsed.covariate_names, covariates)

    @staticmethod
    def write_event_csv(
        history: EventHistory,
        roster: t.Sequence[str],
        covariate_names: t.Sequence[str] | None = None,
        include_type: bool = True
    ) -> str:
        '''
        Serialize a history in the event-list CSV schema (floats with 17
        significant digits, LF line endings).
        '''
        if covariate_names is None:
            dim: int = len(history.events[0].covariates or ()) if len(history) else 0
            covariate_names = [f'{COVARIATE_PREFIX}{j}' for j in range(dim)]

        timed: bool = history.is_timestamped
        columns: dict[str, t.Any] = {}
        if timed:
            columns['time'] = history.timestamps()
        columns['sender'] = [roster[e.sender] for e in history]
        columns['receiver'] = [roster[e.receiver] for e in history]
        if include_type:
            columns['type'] = np.array([e.action_type for e in history], dtype=int)
        if covariate_names:
            covariates: np.ndarray = np.array(
                [e.covariates for e in history], dtype=float
            ).reshape(len(history), len(covariate_names))
            for j, name in enumerate(covariate_names):
                columns[name] = covariates[:, j]

        frame = pd.DataFrame(columns)
        return frame.to_csv(index=False, lineterminator='\n', float_format='%.17g')


class LoadedEvents(t.NamedTuple):
    history: EventHistory
    space: ActionSpace
    roster: list[str]
    covariate_names: list[str]
    covariates: np.ndarray | None
