from pathlib import Path

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from remirl import EventUtils, DyadicEvent, EventHistory
from remirl.errors import (
    NonMonotoneTimestamps, SelfDirectedEvent, MixedTimestampPresence,
    EndTimeBeforeLastEvent, EmptyActionSpace, MalformedRow, UnknownColumn,
    EmptyFile, EventOutsideActionSpace, CovariateDimensionMismatch, InvalidConfig
)

MTS_PATH = Path("tests/test_data/mts_events.csv")


@st.composite
def histories(draw, timed: bool = True, n_covariates: int = 0):
    n_actors = draw(st.integers(min_value=2, max_value=5))
    n = draw(st.integers(min_value=0, max_value=25))
    events = []
    now = 0.
    for _ in range(n):
        s = draw(st.integers(min_value=0, max_value=n_actors - 1))
        r = draw(st.integers(min_value=0, max_value=n_actors - 2))
        if r >= s:
            r += 1
        timestamp = None
        if timed:
            now += draw(st.floats(min_value=0., max_value=100., allow_nan=False))
            timestamp = now
        covs = None
        if n_covariates:
            covs = tuple(draw(st.lists(
                st.floats(min_value=-1e6, max_value=1e6, allow_nan=False),
                min_size=n_covariates, max_size=n_covariates
            )))
        c = draw(st.integers(min_value=0, max_value=2))
        events.append(DyadicEvent(s, r, c, timestamp, covs))
    return n_actors, events


class TestValidate:
    def test_empty_history(self):
        history = EventUtils.validate_history([], end_time=10.)
        assert len(history) == 0
        assert history.end_time == 10.

    def test_non_monotone(self):
        events = [DyadicEvent(0, 1, timestamp=1.), DyadicEvent(1, 0, timestamp=0.5)]
        with pytest.raises(NonMonotoneTimestamps):
            EventUtils.validate_history(events)

    def test_self_directed(self):
        with pytest.raises(SelfDirectedEvent):
            EventUtils.validate_history([DyadicEvent(0, 0, timestamp=1.)])

    def test_mixed_timestamps(self):
        events = [DyadicEvent(0, 1, timestamp=1.), DyadicEvent(1, 0)]
        with pytest.raises(MixedTimestampPresence):
            EventUtils.validate_history(events)

    def test_end_before_last(self):
        with pytest.raises(EndTimeBeforeLastEvent):
            EventUtils.validate_history([DyadicEvent(0, 1, timestamp=5.)], end_time=4.)

    def test_ties_allowed(self):
        events = [DyadicEvent(0, 1, timestamp=2.), DyadicEvent(1, 0, timestamp=2.)]
        history = EventUtils.validate_history(events, end_time=2.)
        assert len(history) == 2

    def test_covariate_length(self):
        events = [DyadicEvent(0, 1, covariates=(1.,)), DyadicEvent(1, 0, covariates=(1., 2.))]
        with pytest.raises(CovariateDimensionMismatch):
            EventUtils.validate_history(events)


class TestActionSpace:
    def test_four_actors(self):
        space = EventUtils.enumerate_action_space(4)
        assert len(space) == 12

    def test_two_actors(self):
        space = EventUtils.enumerate_action_space(2)
        assert space.actions == ((0, 1, 0), (1, 0, 0))

    def test_ordering_sender_major(self):
        space = EventUtils.enumerate_action_space(3, 2)
        assert space.actions[:4] == ((0, 1, 0), (0, 1, 1), (0, 2, 0), (0, 2, 1))
        assert space.index((2, 1, 1)) == len(space) - 1

    @given(st.integers(min_value=2, max_value=6), st.integers(min_value=1, max_value=3))
    def test_unmasked_size(self, n, c):
        space = EventUtils.enumerate_action_space(n, c)
        assert len(space) == n * (n - 1) * c
        assert all(s != r for s, r, _ in space.actions)

    def test_team_mask(self):
        roster = ['D1', 'C1', 'C2', 'D2']
        mask = EventUtils.team_permissibility(roster, [('C1', 'D1'), ('C2', 'D2')])
        space = EventUtils.enumerate_action_space(4, 1, mask)
        named = {(roster[s], roster[r]) for s, r, _ in space.actions}
        assert named == {
            ('D1', 'C1'), ('C1', 'D1'), ('C1', 'C2'),
            ('C2', 'C1'), ('C2', 'D2'), ('D2', 'C2'),
        }

    def test_mask_removes_everything(self):
        with pytest.raises(EmptyActionSpace):
            EventUtils.enumerate_action_space(3, 1, lambda s, r, c: False)

    def test_too_few_actors(self):
        with pytest.raises(InvalidConfig):
            EventUtils.enumerate_action_space(1)

    def test_outside_space(self):
        space = EventUtils.enumerate_action_space(2)
        with pytest.raises(EventOutsideActionSpace):
            EventUtils.action_index(space, DyadicEvent(0, 1, 1))


class TestWindow:
    def setup_method(self):
        self.history = EventUtils.validate_history(
            [DyadicEvent(i % 3, (i + 1) % 3) for i in range(5)]
        )

    def test_origin(self):
        assert EventUtils.window(self.history, 1, 0) == []

    def test_suffix(self):
        assert EventUtils.window(self.history, 2, 5) == list(self.history.events[3:5])

    def test_k_exceeds_history(self):
        assert EventUtils.window(self.history, 10, 3) == list(self.history.events[:3])

    @given(st.integers(min_value=0, max_value=8), st.integers(min_value=0, max_value=5))
    def test_nested(self, k, i):
        small = EventUtils.window(self.history, k, i)
        large = EventUtils.window(self.history, k + 1, i)
        assert large[len(large) - len(small):] == small
        assert len(large) - len(small) in (0, 1)


class TestCsv:
    def test_single_row(self):
        parsed = EventUtils.parse_event_csv(b"time,sender,receiver\n0.5,D1,C1\n")
        assert parsed.roster == ['D1', 'C1']
        assert parsed.events == [DyadicEvent(0, 1, 0, 0.5, None)]

    def test_no_time_column(self):
        parsed = EventUtils.parse_event_csv("sender,receiver,type\nA,B,1\nB,A,0\n")
        history = EventUtils.validate_history(parsed.events)
        assert not history.is_timestamped
        assert parsed.has_types
        assert history[0].action_type == 1

    def test_self_directed_row(self):
        parsed = EventUtils.parse_event_csv(b"time,sender,receiver\n0.5,D1,D1\n")
        with pytest.raises(SelfDirectedEvent):
            EventUtils.validate_history(parsed.events)

    def test_crlf_and_bom(self):
        parsed = EventUtils.parse_event_csv(b"\xef\xbb\xbftime,sender,receiver\r\n1,A,B\r\n2,B,A\r\n")
        assert len(parsed.events) == 2
        assert parsed.events[1].timestamp == 2.

    def test_covariates_in_header_order(self):
        parsed = EventUtils.parse_event_csv("sender,receiver,cov_b,cov_a\nA,B,1.5,-2\n")
        assert parsed.covariate_names == ['cov_b', 'cov_a']
        assert parsed.events[0].covariates == (1.5, -2.)

    def test_malformed_row_line_number(self):
        with pytest.raises(MalformedRow) as excinfo:
            EventUtils.parse_event_csv("time,sender,receiver\n1,A,B\nxyz,B,A\n")
        assert excinfo.value.line_number == 3

    def test_blank_time_cell(self):
        parsed = EventUtils.parse_event_csv("time,sender,receiver\n1,A,B\n,B,A\n")
        assert parsed.events[1].timestamp is None
        with pytest.raises(MixedTimestampPresence):
            EventUtils.validate_history(parsed.events)

    def test_extra_field(self):
        with pytest.raises(MalformedRow) as excinfo:
            EventUtils.parse_event_csv("sender,receiver\nA,B\nB,A,C\n")
        assert excinfo.value.line_number == 3

    def test_blank_cells(self):
        with pytest.raises(MalformedRow):
            EventUtils.parse_event_csv("sender,receiver\nA,\n")
        with pytest.raises(MalformedRow):
            EventUtils.parse_event_csv("sender,receiver,cov_x\nA,B,1\nB,A,\n")
        with pytest.raises(MalformedRow):
            EventUtils.parse_event_csv("time,sender,receiver\ninf,A,B\n")

    def test_blank_lines_skipped(self):
        parsed = EventUtils.parse_event_csv("sender,receiver\n\nA,B\n , \nB,A\n")
        assert parsed.roster == ['A', 'B']
        assert [e.triple for e in parsed.events] == [(0, 1, 0), (1, 0, 0)]

    def test_quoted_labels(self):
        parsed = EventUtils.parse_event_csv('sender,receiver\n"Smith, J",B\n')
        assert parsed.roster == ['Smith, J', 'B']

    def test_write_text(self):
        history = EventUtils.validate_history([DyadicEvent(0, 1, timestamp=0.1)])
        text = EventUtils.write_event_csv(history, ['A', 'B'], include_type=False)
        assert text == 'time,sender,receiver\n0.10000000000000001,A,B\n'
        text = EventUtils.write_event_csv(
            EventUtils.validate_history([DyadicEvent(1, 0, 2)]), ['A', 'B']
        )
        assert text == 'sender,receiver,type\nB,A,2\n'

    def test_bad_type(self):
        with pytest.raises(MalformedRow):
            EventUtils.parse_event_csv("sender,receiver,type\nA,B,-1\n")

    def test_unknown_column(self):
        with pytest.raises(UnknownColumn):
            EventUtils.parse_event_csv("time,sender,receiver,weight\n1,A,B,3\n")

    def test_empty_file(self):
        with pytest.raises(EmptyFile):
            EventUtils.parse_event_csv(b"")

    def test_mts_fixture(self):
        parsed = EventUtils.read_event_csv(MTS_PATH)
        assert len(parsed.events) == 298
        assert sorted(parsed.roster) == ['C1', 'C2', 'D1', 'D2']
        history = EventUtils.validate_history(parsed.events)
        assert history.is_timestamped

    def test_load_event_file_defaults(self):
        loaded = EventUtils.load_event_file(MTS_PATH, teams=[('C1', 'D1'), ('C2', 'D2')])
        assert len(loaded.space) == 6
        assert loaded.history.end_time == loaded.history.timestamps()[-1]
        assert loaded.covariates is None

    @settings(max_examples=50)
    @given(histories(timed=True, n_covariates=2))
    def test_round_trip(self, drawn):
        n_actors, events = drawn
        roster = [f'actor{i}' for i in range(n_actors)]
        history = EventUtils.validate_history(events)
        text = EventUtils.write_event_csv(history, roster)
        parsed = EventUtils.parse_event_csv(text)
        # labels are re-interned in first-appearance order
        relabel = [roster.index(label) for label in parsed.roster]
        restored = [
            DyadicEvent(relabel[e.sender], relabel[e.receiver], e.action_type, e.timestamp, e.covariates)
            for e in parsed.events
        ]
        assert EventUtils.validate_history(restored) == history


class TestActionCovariates:
    def test_mean_per_action(self):
        events = [
            DyadicEvent(0, 1, covariates=(1., 4.)),
            DyadicEvent(0, 1, covariates=(3., 0.)),
            DyadicEvent(1, 0, covariates=(5., 5.)),
        ]
        history = EventUtils.validate_history(events)
        space = EventUtils.enumerate_action_space(3)
        covs = EventUtils.action_covariates(history, space)
        assert covs.shape == (6, 2)
        assert np.array_equal(covs[space.index((0, 1, 0))], [2., 2.])
        assert np.array_equal(covs[space.index((1, 0, 0))], [5., 5.])
        assert np.array_equal(covs[space.index((2, 0, 0))], [0., 0.])

    def test_history_wrapper(self):
        history = EventHistory([DyadicEvent(0, 1, timestamp=1.)], 0., 3.)
        assert history.timestamps().tolist() == [1.]
