import logging
from pathlib import Path

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from remirl import EventUtils, DyadicEvent, Statistics, MdpBuilder, EgoScheme, Mdp, Trajectory
from remirl.irl import SoftPolicy
from remirl.errors import (
    UnclassifiableEvent, UnobservedStateAction, StateSpaceTooLarge, InvalidConfig
)

MTS_PATH = Path("tests/test_data/mts_events.csv")
ROSTER = ['D1', 'C1', 'C2', 'D2']
TEAMS = [('C1', 'D1'), ('C2', 'D2')]
MIRROR = {'D1': 'D2', 'D2': 'D1', 'C1': 'C2', 'C2': 'C1'}
PERMITTED = [('D1', 'C1'), ('C1', 'D1'), ('C1', 'C2'), ('C2', 'C1'), ('C2', 'D2'), ('D2', 'C2')]

S = {label: i for i, label in enumerate(EgoScheme.STATE_LABELS)}
A = {label: i for i, label in enumerate(EgoScheme.ACTION_LABELS)}


def history_of(pairs):
    ids = {label: i for i, label in enumerate(ROSTER)}
    return EventUtils.validate_history([DyadicEvent(ids[s], ids[r]) for s, r in pairs])


def scheme_for(ego: str) -> EgoScheme:
    return MdpBuilder.ego_scheme_from_teams(ROSTER, ego, TEAMS)


class TestEgoTrajectory:
    def test_hand_conversion(self):
        history = history_of([('D1', 'C1'), ('C1', 'C2'), ('C1', 'D1'), ('C2', 'C1')])
        traj = MdpBuilder.build_ego_trajectory(history, scheme_for('C1'))
        assert traj.steps == (
            (S['fromOwnDriver'], A['toOtherCaptain']),
            (S['silence'], A['toOwnDriver']),
            (S['silence'], A['noop']),
        )

    def test_single_event(self):
        traj = MdpBuilder.build_ego_trajectory(history_of([('C2', 'D2')]), scheme_for('C1'))
        assert len(traj) == 0

    def test_all_states(self):
        history = history_of([
            ('C2', 'D2'), ('D2', 'C2'), ('C2', 'C1'), ('D1', 'C1'), ('C1', 'D1'), ('C2', 'D2')
        ])
        traj = MdpBuilder.build_ego_trajectory(history, scheme_for('C1'))
        assert traj.states.tolist() == [
            S['otherCaptainToDriver'], S['otherDriverToCaptain'], S['fromOtherCaptain'],
            S['fromOwnDriver'], S['silence'],
        ]
        assert traj.actions.tolist() == [A['noop'], A['noop'], A['noop'], A['toOwnDriver'], A['noop']]

    def test_unclassifiable(self):
        with pytest.raises(UnclassifiableEvent):
            MdpBuilder.build_ego_trajectory(history_of([('D1', 'C1'), ('D1', 'C2')]), scheme_for('C1'))

    @settings(max_examples=50)
    @given(st.lists(st.sampled_from(PERMITTED), min_size=0, max_size=40))
    def test_mirror_symmetry(self, pairs):
        mirrored = [(MIRROR[s], MIRROR[r]) for s, r in pairs]
        own = MdpBuilder.build_ego_trajectory(history_of(pairs), scheme_for('C1'))
        other = MdpBuilder.build_ego_trajectory(history_of(mirrored), scheme_for('C2'))
        assert own == other

    @settings(max_examples=50)
    @given(st.lists(st.sampled_from(PERMITTED), min_size=1, max_size=40))
    def test_step_count_and_ego_actions(self, pairs):
        traj = MdpBuilder.build_ego_trajectory(history_of(pairs), scheme_for('C1'))
        assert len(traj) == len(pairs) - 1
        # the first event precedes every decision point
        egoSent = sum(1 for s, _ in pairs[1:] if s == 'C1')
        assert int(np.sum(traj.actions != A['noop'])) == egoSent

    def test_roles(self):
        scheme = MdpBuilder.ego_scheme_from_roles(
            ROSTER, 'C1', {'own_driver': 'D1', 'other_captain': 'C2', 'other_driver': 'D2'}
        )
        assert scheme.role_map == {'own_driver': 0, 'other_captain': 2, 'other_driver': 3}
        with pytest.raises(InvalidConfig):
            MdpBuilder.ego_scheme_from_roles(ROSTER, 'C1', {'own_driver': 'D1', 'other_captain': 'C2'})
        with pytest.raises(InvalidConfig):
            MdpBuilder.ego_scheme_from_teams(ROSTER, 'D1', TEAMS)


class TestTransitions:
    def test_unobserved_is_uniform(self):
        P = MdpBuilder.estimate_transitions([], 5, 3)
        assert np.array_equal(P, np.full((3, 5, 5), 0.2))

    def test_single_observation(self):
        traj = Trajectory([(0, 1), (3, 0)])
        P = MdpBuilder.estimate_transitions([traj], 5, 3)
        assert P[1, 0].tolist() == [1 / 6, 1 / 6, 1 / 6, 2 / 6, 1 / 6]
        assert np.all(P[0, 0] == 0.2)

    def test_no_smoothing(self):
        traj = Trajectory([(0, 0), (1, 0), (0, 0), (0, 0), (1, 0), (1, 0)])
        P = MdpBuilder.estimate_transitions([traj], 2, 1, smoothing=0.)
        assert P[0].tolist() == [[1 / 3, 2 / 3], [0.5, 0.5]]

    def test_no_smoothing_needs_counts(self):
        with pytest.raises(UnobservedStateAction):
            MdpBuilder.estimate_transitions([Trajectory([(0, 0), (1, 0)])], 2, 1, smoothing=0.)

    def test_mts_ego_mdp(self):
        parsed = EventUtils.read_event_csv(MTS_PATH)
        history = EventUtils.validate_history(parsed.events)
        for ego in ('C1', 'C2'):
            scheme = MdpBuilder.ego_scheme_from_teams(parsed.roster, ego, TEAMS)
            traj = MdpBuilder.build_ego_trajectory(history, scheme)
            mdp = MdpBuilder.ego_mdp([traj])
            assert (mdp.n_states, mdp.n_actions) == (5, 3)
            assert len(traj) == 297
            assert np.all(mdp.transitions > 0)
            assert np.allclose(mdp.transitions.sum(axis=2), 1., rtol=0, atol=1e-12)
            assert np.array_equal(mdp.features, np.eye(5))


class TestGroupMdp:
    def test_memoryless(self):
        mdp = MdpBuilder.build_group_mdp(EventUtils.enumerate_action_space(3), 0)
        assert mdp.n_states == 1
        assert np.all(mdp.transitions == 1.)

    def test_k1(self):
        mdp = MdpBuilder.build_group_mdp(EventUtils.enumerate_action_space(2), 1)
        assert mdp.n_states == 3
        for s in range(3):
            assert mdp.transitions[0, s, 1] == 1.
            assert mdp.transitions[1, s, 2] == 1.
        assert mdp.state_labels == ['', '0>1', '1>0']

    def test_k2_size(self):
        mdp = MdpBuilder.build_group_mdp(EventUtils.enumerate_action_space(2), 2)
        assert mdp.n_states == 7

    def test_too_large(self):
        with pytest.raises(StateSpaceTooLarge):
            MdpBuilder.build_group_mdp(EventUtils.enumerate_action_space(4), 6)
        with pytest.raises(StateSpaceTooLarge):
            MdpBuilder.build_group_mdp(EventUtils.enumerate_action_space(3), 2, max_states=20)

    @given(st.integers(min_value=0, max_value=3), st.lists(st.integers(0, 3), max_size=6))
    def test_deterministic_window_arithmetic(self, k, actions):
        mdp = MdpBuilder.build_group_mdp(EventUtils.enumerate_action_space(2, 2), k)
        assert np.all(mdp.transitions.max(axis=2) == 1.)
        assert np.allclose(mdp.transitions.sum(axis=2), 1., rtol=0, atol=1e-12)
        state = 0
        for i, a in enumerate(actions):
            state = int(np.argmax(mdp.transitions[a, state]))
            window = actions[max(0, i + 1 - k):i + 1] if k > 0 else []
            assert state == MdpBuilder.group_state_index(window, 4)

    def test_one_hot(self):
        assert np.array_equal(MdpBuilder.one_hot_features(5), np.eye(5))
        assert MdpBuilder.one_hot_features(1).tolist() == [[1.]]

    def test_group_trajectory_follows_transitions(self):
        space = EventUtils.enumerate_action_space(3)
        events = [DyadicEvent(0, 1), DyadicEvent(1, 0), DyadicEvent(2, 0), DyadicEvent(0, 2)]
        history = EventUtils.validate_history(events)
        mdp = MdpBuilder.build_group_mdp(space, 2)
        traj = MdpBuilder.build_group_trajectory(history, space, 2)
        assert traj.steps[0][0] == 0
        for (s, a), (nextState, _) in zip(traj.steps, traj.steps[1:]):
            assert mdp.transitions[a, s, nextState] == 1.


class TestRemFeatureMdp:
    def test_reciprocity_feature(self):
        space = EventUtils.enumerate_action_space(2)
        specs = Statistics.parse_specs('reciprocity')
        mdp = MdpBuilder.rem_feature_mdp(space, 2, specs)
        state = MdpBuilder.group_state_index([space.index((0, 1, 0)), space.index((1, 0, 0))], 2)
        assert mdp.features[state].tolist() == [1.]
        assert mdp.features[0].tolist() == [0.]

    def test_k1_has_no_prior_event(self, caplog):
        space = EventUtils.enumerate_action_space(3)
        with caplog.at_level(logging.WARNING, logger='remirl.mdp'):
            mdp = MdpBuilder.rem_feature_mdp(space, 1, Statistics.parse_specs('reciprocity'))
        assert not mdp.features.any()
        assert 'looks further back' in caplog.text

    def test_features_are_statistics(self):
        space = EventUtils.enumerate_action_space(3)
        specs = Statistics.parse_specs('reciprocity@1,inertia@2,senderactivity@2')
        mdp = MdpBuilder.rem_feature_mdp(space, 3, specs)
        window = [space.index((0, 1, 0)), space.index((0, 2, 0)), space.index((0, 1, 0))]
        prefix = [space.actions[i] for i in window[:-1]]
        expected = Statistics.statistics_matrix(
            space, [DyadicEvent(*p) for p in prefix], specs
        )[window[-1]]
        assert np.allclose(mdp.features[MdpBuilder.group_state_index(window, len(space))], expected)


class TestMdpType:
    def test_rejects_bad_rows(self):
        with pytest.raises(InvalidConfig):
            Mdp(np.array([[[0.5, 0.4], [0., 1.]]]))
        with pytest.raises(InvalidConfig):
            Mdp(np.ones((1, 2, 3)))

    def test_row_sum_tolerance(self):
        almost = np.array([[[0.5, 0.5 + 1e-10], [0., 1.]]])
        with pytest.raises(InvalidConfig):
            Mdp(almost)
        thirds = np.full((2, 3, 3), 1. / 3)
        assert Mdp(thirds).n_states == 3

    def test_policy_row_sum_tolerance(self):
        with pytest.raises(InvalidConfig):
            SoftPolicy(np.array([[0.25, 0.75 + 1e-10]]))
        assert SoftPolicy(np.full((2, 3), 1. / 3)).n_states == 2
