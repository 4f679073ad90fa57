# ------------------------------------------------------------------------------
# Purpose:       mdp builds finite Markov decision processes and state-action
#                trajectories from dyadic event histories.
#                remirl is a package for fitting relational event models and
#                recovering behavioral rewards from dyadic event sequences.
#
# Authors:       remirl contributors
#
# Copyright:     (c) 2026 remirl contributors
# License:       MIT, see LICENSE
# ------------------------------------------------------------------------------

__docformat__ = "google"

import itertools
import logging
import typing as t

import numpy as np

from remirl.errors import (
    InvalidConfig, UnclassifiableEvent, UnobservedStateAction, StateSpaceTooLarge
)
from remirl.events import ActionSpace, DyadicEvent, EventHistory, EventUtils
from remirl.statistickind import StatisticKind
from remirl.statistics import Statistics, StatisticSpec

logger = logging.getLogger(__name__)

# Dense transition tensors beyond this many entries are refused (8 bytes each).
MAX_DENSE_ENTRIES: int = 1 << 27
# Largest |row sum - 1| accepted in transition and policy rows.
ROW_SUM_TOL: float = 1e-12


class Mdp:
    def __init__(
        self,
        transitions: np.ndarray,
        features: np.ndarray | None = None,
        state_labels: t.Sequence[str] | None = None,
        action_labels: t.Sequence[str] | None = None
    ) -> None:
        '''
        A finite MDP without its reward.

        Args:
            transitions (np.ndarray): P[a][s][s'], shape n_actions x n_states x n_states.
            features (np.ndarray | None): state features f(s), n_states x d
                (default: one-hot).
            state_labels (Sequence[str] | None): names of the states.
            action_labels (Sequence[str] | None): names of the actions.
        '''
        transitions = np.asarray(transitions, dtype=float)
        if transitions.ndim != 3 or transitions.shape[1] != transitions.shape[2]:
            raise InvalidConfig(f'transitions must be A x S x S, got {transitions.shape}')
        if np.any(transitions < 0) or not np.allclose(transitions.sum(axis=2), 1., rtol=0, atol=ROW_SUM_TOL):
            raise InvalidConfig('every transition row must be a probability distribution')
        self.transitions: np.ndarray = transitions

        nStates: int = transitions.shape[1]
        if features is None:
            features = MdpBuilder.one_hot_features(nStates)
        self.features: np.ndarray = np.asarray(features, dtype=float)
        if self.features.ndim != 2 or self.features.shape[0] != nStates:
            raise InvalidConfig(f'features must have {nStates} rows, got {self.features.shape}')

        self.state_labels: list[str] = (
            list(state_labels) if state_labels is not None else [str(s) for s in range(nStates)]
        )
        self.action_labels: list[str] = (
            list(action_labels) if action_labels is not None
            else [str(a) for a in range(transitions.shape[0])]
        )
        if len(self.state_labels) != nStates or len(self.action_labels) != transitions.shape[0]:
            raise InvalidConfig('label counts must match the transition tensor')

    @property
    def n_states(self) -> int:
        return self.transitions.shape[1]

    @property
    def n_actions(self) -> int:
        return self.transitions.shape[0]

    @property
    def n_features(self) -> int:
        return self.features.shape[1]

    def __repr__(self) -> str:
        return f'Mdp(S={self.n_states}, A={self.n_actions}, d={self.n_features})'


class Trajectory:
    def __init__(self, steps: t.Iterable[tuple[int, int]]) -> None:
        # (state index, action index) per decision point
        self.steps: tuple[tuple[int, int], ...] = tuple((int(s), int(a)) for s, a in steps)

    @property
    def states(self) -> np.ndarray:
        return np.array([s for s, _ in self.steps], dtype=np.int64)

    @property
    def actions(self) -> np.ndarray:
        return np.array([a for _, a in self.steps], dtype=np.int64)

    def __len__(self) -> int:
        return len(self.steps)

    def __eq__(self, other) -> bool:
        return isinstance(other, Trajectory) and self.steps == other.steps

    def __repr__(self) -> str:
        return f'Trajectory({list(self.steps)})'


class EgoScheme:
    # egocentric view of a two-team (captain + driver) group
    STATE_LABELS: tuple[str, ...] = (
        'silence',
        'fromOwnDriver',
        'fromOtherCaptain',
        'otherCaptainToDriver',
        'otherDriverToCaptain',
    )
    ACTION_LABELS: tuple[str, ...] = ('noop', 'toOwnDriver', 'toOtherCaptain')

    SILENCE, FROM_OWN_DRIVER, FROM_OTHER_CAPTAIN, OTHER_CAPTAIN_TO_DRIVER, OTHER_DRIVER_TO_CAPTAIN = (
        range(5)
    )
    NOOP, TO_OWN_DRIVER, TO_OTHER_CAPTAIN = range(3)

    def __init__(self, ego: int, own_driver: int, other_captain: int, other_driver: int) -> None:
        if len({ego, own_driver, other_captain, other_driver}) != 4:
            raise InvalidConfig('ego and its three roles must be four distinct actors')
        self.ego: int = ego
        self.own_driver: int = own_driver
        self.other_captain: int = other_captain
        self.other_driver: int = other_driver

    @property
    def role_map(self) -> dict[str, int]:
        return {
            'own_driver': self.own_driver,
            'other_captain': self.other_captain,
            'other_driver': self.other_driver,
        }

    def state_of(self, event: DyadicEvent) -> int:
        '''
        The state the ego observes right after `event`.
        '''
        pair: tuple[int, int] = (event.sender, event.receiver)
        if event.sender == self.ego and event.receiver in (self.own_driver, self.other_captain):
            return self.SILENCE
        if pair == (self.own_driver, self.ego):
            return self.FROM_OWN_DRIVER
        if pair == (self.other_captain, self.ego):
            return self.FROM_OTHER_CAPTAIN
        if pair == (self.other_captain, self.other_driver):
            return self.OTHER_CAPTAIN_TO_DRIVER
        if pair == (self.other_driver, self.other_captain):
            return self.OTHER_DRIVER_TO_CAPTAIN
        raise UnclassifiableEvent(
            f'event {event.sender}->{event.receiver} does not fit the ego scheme of actor {self.ego}'
        )

    def action_of(self, event: DyadicEvent) -> int:
        '''
        The ego's action that `event` reveals (noop when someone else acted).
        '''
        if event.sender != self.ego:
            return self.NOOP
        if event.receiver == self.own_driver:
            return self.TO_OWN_DRIVER
        return self.TO_OTHER_CAPTAIN

    def __repr__(self) -> str:
        return (
            f'EgoScheme(ego={self.ego}, own_driver={self.own_driver}, '
            f'other_captain={self.other_captain}, other_driver={self.other_driver})'
        )


class MdpBuilder:
    @staticmethod
    def one_hot_features(n_states: int) -> np.ndarray:
        return np.eye(n_states)

    @staticmethod
    def ego_scheme_from_roles(
        roster: t.Sequence[str],
        ego: str,
        roles: t.Mapping[str, str]
    ) -> EgoScheme:
        ids: dict[str, int] = {label: i for i, label in enumerate(roster)}
        needed: tuple[str, ...] = ('own_driver', 'other_captain', 'other_driver')
        for role in roles:
            if role not in needed:
                raise InvalidConfig(f'unknown role {role!r}')
        for label in [ego] + [roles.get(r, '') for r in needed]:
            if label not in ids:
                raise InvalidConfig(f'actor {label!r} is missing or not in the roster')
        return EgoScheme(
            ids[ego], ids[roles['own_driver']], ids[roles['other_captain']], ids[roles['other_driver']]
        )

    @staticmethod
    def ego_scheme_from_teams(
        roster: t.Sequence[str],
        ego: str,
        teams: t.Sequence[tuple[str, str]]
    ) -> EgoScheme:
        '''
        Derive the ego's roles from (captain, driver) pairs; the ego must be the
        captain of one of exactly two teams.
        '''
        if len(teams) != 2:
            raise InvalidConfig(f'the ego scheme needs exactly two teams, got {len(teams)}')
        own: list[tuple[str, str]] = [tm for tm in teams if tm[0] == ego]
        other: list[tuple[str, str]] = [tm for tm in teams if tm[0] != ego]
        if len(own) != 1 or len(other) != 1:
            raise InvalidConfig(f'{ego!r} must captain exactly one of the two teams')
        return MdpBuilder.ego_scheme_from_roles(roster, ego, {
            'own_driver': own[0][1],
            'other_captain': other[0][0],
            'other_driver': other[0][1],
        })

    @staticmethod
    def build_ego_trajectory(history: EventHistory, scheme: EgoScheme) -> Trajectory:
        '''
        Convert an event list into the ego's state-action trajectory.  After
        every event there is a decision point: the state comes from that event,
        the action from the next one (noop unless the ego sent it).  The last
        event yields no step because the decision following it is not observed.

        Raises:
            UnclassifiableEvent: an event does not fit the scheme.
        '''
        states: list[int] = [scheme.state_of(e) for e in history]
        steps: list[tuple[int, int]] = [
            (states[i], scheme.action_of(history[i + 1])) for i in range(len(history) - 1)
        ]
        return Trajectory(steps)

    @staticmethod
    def estimate_transitions(
        trajectories: t.Sequence[Trajectory],
        n_states: int,
        n_actions: int,
        smoothing: float = 1.
    ) -> np.ndarray:
        '''
        Empirical P[a][s][s'] from consecutive trajectory steps, with additive
        smoothing: (count + smoothing) / (row total + smoothing * n_states).

        Raises:
            UnobservedStateAction: smoothing is 0 and some (s, a) was never left.
        '''
        if smoothing < 0:
            raise InvalidConfig(f'smoothing must be non-negative, got {smoothing}')
        counts: np.ndarray = np.zeros((n_actions, n_states, n_states))
        for traj in trajectories:
            for (s, a), (nextState, _) in zip(traj.steps, traj.steps[1:]):
                if not (0 <= s < n_states and 0 <= a < n_actions and 0 <= nextState < n_states):
                    raise InvalidConfig(f'trajectory step ({s}, {a}) is out of bounds')
                counts[a, s, nextState] += 1

        totals: np.ndarray = counts.sum(axis=2, keepdims=True)
        if smoothing == 0:
            unseen: np.ndarray = np.argwhere(totals[:, :, 0] == 0)
            if len(unseen):
                a, s = unseen[0]
                raise UnobservedStateAction(
                    f'state {s} under action {a} has no observed successor'
                )
        return (counts + smoothing) / (totals + smoothing * n_states)

    @staticmethod
    def ego_mdp(trajectories: t.Sequence[Trajectory], smoothing: float = 1.) -> Mdp:
        '''
        The 5-state / 3-action ego MDP with estimated transitions and one-hot
        state features.
        '''
        nStates: int = len(EgoScheme.STATE_LABELS)
        nActions: int = len(EgoScheme.ACTION_LABELS)
        transitions: np.ndarray = MdpBuilder.estimate_transitions(
            trajectories, nStates, nActions, smoothing
        )
        return Mdp(transitions, None, EgoScheme.STATE_LABELS, EgoScheme.ACTION_LABELS)

    @staticmethod
    def n_group_states(n_actions: int, k: int) -> int:
        return sum(n_actions ** j for j in range(k + 1))

    @staticmethod
    def group_state_index(window: t.Sequence[int], n_actions: int) -> int:
        '''
        Length-lexicographic index of a window of action indices (oldest first).
        '''
        index: int = MdpBuilder.n_group_states(n_actions, len(window) - 1) if len(window) else 0
        number: int = 0
        for a in window:
            number = number * n_actions + int(a)
        return index + number

    @staticmethod
    def _group_windows(n_actions: int, k: int) -> t.Iterator[tuple[int, ...]]:
        for length in range(k + 1):
            yield from itertools.product(range(n_actions), repeat=length)

    @staticmethod
    def _action_label(space: ActionSpace, idx: int, roster: t.Sequence[str] | None) -> str:
        s, r, c = space.actions[idx]
        names: t.Sequence[str] = roster if roster is not None else [str(i) for i in range(space.n_actors)]
        label: str = f'{names[s]}>{names[r]}'
        if space.n_types > 1:
            label += f':{c}'
        return label

    @staticmethod
    def build_group_mdp(
        space: ActionSpace,
        k: int,
        max_states: int = 10 ** 6,
        roster: t.Sequence[str] | None = None
    ) -> Mdp:
        '''
        The truncated-history MDP of the whole group: a state is the window of
        the (at most) k most recent actions, and taking action a moves with
        probability 1 to the window with a appended and truncated to k.

        Args:
            space (ActionSpace): the group's actions.
            k (int): history length kept in a state (>= 0).
            max_states (int): refuse state spaces larger than this.
            roster (Sequence[str] | None): actor labels for state/action labels.

        Raises:
            StateSpaceTooLarge
        '''
        if k < 0:
            raise InvalidConfig(f'k must be non-negative, got {k}')
        nActions: int = len(space)
        nStates: int = MdpBuilder.n_group_states(nActions, k)
        if nStates > max_states:
            raise StateSpaceTooLarge(f'{nStates} states exceed the cap of {max_states}')
        if nActions * nStates * nStates > MAX_DENSE_ENTRIES:
            raise StateSpaceTooLarge(
                f'{nStates} states x {nActions} actions is too large for a dense transition tensor'
            )

        transitions: np.ndarray = np.zeros((nActions, nStates, nStates))
        labels: list[str] = []
        actionLabels: list[str] = [MdpBuilder._action_label(space, a, roster) for a in range(nActions)]
        for s, window in enumerate(MdpBuilder._group_windows(nActions, k)):
            labels.append('|'.join(actionLabels[a] for a in window))
            for a in range(nActions):
                nextWindow: tuple[int, ...] = (window + (a,))[-k:] if k > 0 else ()
                transitions[a, s, MdpBuilder.group_state_index(nextWindow, nActions)] = 1.

        return Mdp(transitions, None, labels, actionLabels)

    @staticmethod
    def rem_feature_mdp(
        space: ActionSpace,
        k: int,
        specs: t.Sequence[StatisticSpec],
        covariates: np.ndarray | None = None,
        max_states: int = 10 ** 6,
        roster: t.Sequence[str] | None = None
    ) -> Mdp:
        '''
        `build_group_mdp` whose state features are REM statistics: the feature
        vector of a window is the statistic vector of its last action evaluated
        against the window's earlier actions.  The empty window has zero features.
        '''
        for spec in specs:
            if StatisticKind.isHistoryFree(spec.kind):
                continue
            if spec.window is None or spec.window > max(k - 1, 0):
                logger.warning(
                    '%s looks further back than the %d earlier actions a state keeps',
                    spec.label, max(k - 1, 0)
                )

        mdp: Mdp = MdpBuilder.build_group_mdp(space, k, max_states, roster)
        features: np.ndarray = np.zeros((mdp.n_states, len(specs)))
        for s, window in enumerate(MdpBuilder._group_windows(len(space), k)):
            if not window:
                continue
            prefix: list = [space.actions[a] for a in window[:-1]]
            last: int = window[-1]
            covRow: np.ndarray | None = None if covariates is None else covariates[last]
            features[s] = [
                Statistics.statistic(spec, space.actions[last], prefix, covRow) for spec in specs
            ]
        return Mdp(mdp.transitions, features, mdp.state_labels, mdp.action_labels)

    @staticmethod
    def build_group_trajectory(history: EventHistory, space: ActionSpace, k: int) -> Trajectory:
        '''
        The group-as-agent trajectory on `build_group_mdp(space, k)`: before each
        event the state is the window of the k preceding events, and the action
        is the event itself.
        '''
        indices: np.ndarray = EventUtils.action_indices(space, history)
        steps: list[tuple[int, int]] = []
        for i in range(len(indices)):
            window: np.ndarray = indices[max(0, i - k):i]
            steps.append((MdpBuilder.group_state_index(window, len(space)), int(indices[i])))
        return Trajectory(steps)
