import io
import json
from pathlib import Path

import numpy as np
import pandas as pd
import pytest

from remirl import fit_rem_file, ego_rewards_file, FitConfig, MaxEntConfig, Mdp, Report, Trajectory
from remirl.errors import InvalidConfig, MalformedRow
from remirl.__main__ import run_cli

MTS_PATH = "tests/test_data/mts_events.csv"


class TestSimulate:
    def test_byte_identical_reruns(self, tmp_path):
        first = tmp_path / 'first.csv'
        second = tmp_path / 'second.csv'
        argv = ['simulate', '--actors', '4', '--events', '200', '--seed', '7', '--theta=1,-0.5']
        assert run_cli(argv + ['--output', str(first)]) == 0
        assert run_cli(argv + ['--output', str(second)]) == 0
        assert first.read_bytes() == second.read_bytes()
        lines = first.read_text(encoding='utf-8').splitlines()
        assert lines[0] == 'sender,receiver'
        assert len(lines) == 201

    def test_stdout(self, capsys):
        assert run_cli(['simulate', '--events', '5', '--timestamps', '--types', '2']) == 0
        out = capsys.readouterr().out
        assert out.splitlines()[0] == 'time,sender,receiver,type'


class TestFitAndEquivalence:
    def test_fit_then_check(self, tmp_path, capsys):
        events = tmp_path / 'events.csv'
        fit = tmp_path / 'fit.json'
        report = tmp_path / 'equiv.json'
        assert run_cli([
            'simulate', '--actors', '4', '--events', '300', '--seed', '3',
            '--theta=1.5,0.5', '--stats', 'reciprocity,inertia', '--output', str(events)
        ]) == 0
        assert run_cli(['fit-rem', '--input', str(events), '--output', str(fit)]) == 0
        assert run_cli(['check-equivalence', '--input', str(events), '--fit', str(fit),
                        '--output', str(report)]) == 0

        fitted = json.loads(fit.read_text(encoding='utf-8'))
        assert fitted['converged']
        assert fitted['stats'] == 'reciprocity,inertia'
        assert len(fitted['se']) == 2
        result = json.loads(report.read_text(encoding='utf-8'))
        assert result['abs_diff'] < 1e-10
        assert result['birl_ll'] == pytest.approx(fitted['loglik'], abs=1e-10)
        assert 'Output saved in' in capsys.readouterr().err

    def test_theta_on_mts(self, capsys):
        assert run_cli([
            'check-equivalence', '--input', MTS_PATH, '--teams', 'C1:D1,C2:D2',
            '--stats', 'reciprocity,inertia@5', '--theta=0.7,-0.2'
        ]) == 0
        result = json.loads(capsys.readouterr().out)
        assert set(result) == {'rem_ll', 'birl_ll', 'abs_diff'}
        assert result['abs_diff'] < 1e-10

    def test_timestamped_fit_to_stdout(self, capsys):
        code = run_cli([
            'fit-rem', '--input', MTS_PATH, '--mode', 'timestamped',
            '--teams', 'C1:D1,C2:D2', '--stats', 'reciprocity,inertia@1'
        ])
        assert code in (0, 2)
        fitted = json.loads(capsys.readouterr().out)
        assert fitted['mode'] == 'timestamped'


class TestEgoPipeline:
    def test_build_maxent_report(self, tmp_path, capsys):
        rewards = []
        for ego in ('C1', 'C2'):
            traj = tmp_path / f'{ego}.csv'
            assert run_cli(['build-mdp', '--input', MTS_PATH, '--ego', ego, '--output', str(traj)]) == 0
            mdpJson = json.loads(traj.with_suffix('.json').read_text(encoding='utf-8'))
            assert len(mdpJson['state_labels']) == 5
            assert len(mdpJson['action_labels']) == 3
            assert len(traj.read_text(encoding='utf-8').splitlines()) == 298

            reward = tmp_path / f'{ego}_reward.json'
            code = run_cli([
                'irl', 'maxent', '--trajectory', str(traj), '--mdp', str(traj.with_suffix('.json')),
                '--output', str(reward), '--lr', '0.001', '--epochs', '200'
            ])
            model = json.loads(reward.read_text(encoding='utf-8'))
            assert code == (0 if model['converged'] else 2)
            assert len(model['state_rewards']) == 5
            assert model['gamma'] == 0.
            table = pd.read_csv(reward.with_suffix('.csv'))
            assert list(table.columns) == ['state_label', 'reward']
            assert table['state_label'].tolist() == model['state_labels']
            rewards.append(str(reward))

        assert run_cli(['report', '--rewards', *rewards, '--names', 'C1', 'C2']) == 0
        table = pd.read_csv(io.StringIO(capsys.readouterr().out))
        assert list(table.columns) == ['state_label', 'C1', 'C2']
        assert table['state_label'].tolist() == [
            'silence', 'fromOwnDriver', 'fromOtherCaptain', 'otherCaptainToDriver', 'otherDriverToCaptain'
        ]

    def test_explicit_roles(self, tmp_path):
        traj = tmp_path / 'c1.csv'
        mdp = tmp_path / 'c1_mdp.json'
        assert run_cli([
            'build-mdp', '--input', MTS_PATH, '--ego', 'C1', '--output', str(traj), '--mdp', str(mdp),
            '--roles', 'own_driver=D1,other_captain=C2,other_driver=D2'
        ]) == 0
        assert mdp.exists()

    def test_maxent_not_converged(self, tmp_path):
        traj = tmp_path / 'c1.csv'
        reward = tmp_path / 'c1_reward.json'
        assert run_cli(['build-mdp', '--input', MTS_PATH, '--ego', 'C1', '--output', str(traj)]) == 0
        assert run_cli([
            'irl', 'maxent', '--trajectory', str(traj), '--mdp', str(traj.with_suffix('.json')),
            '--output', str(reward), '--epochs', '0'
        ]) == 2
        model = json.loads(reward.read_text(encoding='utf-8'))
        assert not model['converged']
        assert model['gradient_norm'] > 1e-6
        assert reward.with_suffix('.csv').exists()


class TestErrors:
    def test_missing_file(self, tmp_path, capsys):
        assert run_cli(['fit-rem', '--input', str(tmp_path / 'nope.csv')]) == 1
        err = json.loads(capsys.readouterr().err.strip().splitlines()[-1])
        assert err['error'] == 'FileNotFoundError'

    def test_unknown_statistic(self, capsys):
        assert run_cli(['fit-rem', '--input', MTS_PATH, '--stats', 'transitivity']) == 1
        err = json.loads(capsys.readouterr().err.strip().splitlines()[-1])
        assert err['error'] == 'UnknownStatistic'

    def test_unclassifiable_ego_event(self, tmp_path, capsys):
        events = tmp_path / 'bad.csv'
        events.write_text('sender,receiver\nD1,C1\nD1,C2\nC2,D2\n', encoding='utf-8')
        assert run_cli(['build-mdp', '--input', str(events), '--ego', 'C1',
                        '--output', str(tmp_path / 'out.csv')]) == 1
        err = json.loads(capsys.readouterr().err.strip().splitlines()[-1])
        assert err['error'] == 'UnclassifiableEvent'

    def test_usage_error(self, capsys):
        assert run_cli(['fit-rem']) == 1
        err = json.loads(capsys.readouterr().err.strip().splitlines()[-1])
        assert err['error'] == 'InvalidConfig'

    def test_equivalence_needs_model(self, capsys):
        assert run_cli(['check-equivalence', '--input', MTS_PATH]) == 1


class TestApi:
    def test_fit_rem_file(self):
        result = fit_rem_file(MTS_PATH, 'reciprocity,inertia@1', teams=[('C1', 'D1'), ('C2', 'D2')])
        assert result is not None
        assert result.theta_hat.shape == (2,)

    def test_ego_rewards_file(self):
        out = ego_rewards_file(MTS_PATH, 'C2', config=MaxEntConfig(learning_rate=0.001, epochs=50))
        assert out is not None
        mdp, reward = out
        assert (mdp.n_states, mdp.n_actions) == (5, 3)
        assert reward.theta.shape == (5,)

    def test_bad_path_returns_none(self, tmp_path):
        missing = Path(tmp_path) / 'missing.csv'
        assert fit_rem_file(missing) is None
        assert ego_rewards_file(missing, 'C1') is None

    def test_config_left_unchanged(self):
        config = FitConfig(max_iter=50)
        result = fit_rem_file(
            MTS_PATH, 'reciprocity,inertia@1', mode='timestamped',
            teams=[('C1', 'D1'), ('C2', 'D2')], config=config
        )
        assert result is not None
        assert result.mode == 'timestamped'
        assert config.mode == 'ordinal'
        assert config.max_iter == 50

    def test_bad_mode_returns_none(self):
        assert fit_rem_file(MTS_PATH, mode='continuous', config=FitConfig()) is None


class TestReportCsv:
    def setup_method(self):
        self.mdp = Mdp(np.full((2, 3, 3), 1. / 3), state_labels=['a', 'b', 'c'], action_labels=['x', 'y'])

    def test_trajectories(self):
        trajectories = [Trajectory([(0, 1), (2, 0)]), Trajectory([(1, 1)])]
        text = Report.trajectory_csv(trajectories, self.mdp)
        assert text == 'step,state_label,action_label\n0,a,y\n1,c,x\n0,b,y\n'
        assert Report.parse_trajectory_csv(text, self.mdp) == trajectories

    def test_trajectory_errors(self):
        with pytest.raises(MalformedRow) as excinfo:
            Report.parse_trajectory_csv('step,state_label,action_label\n0,a,x\n1,z,x\n', self.mdp)
        assert excinfo.value.line_number == 3
        with pytest.raises(MalformedRow) as excinfo:
            Report.parse_trajectory_csv('step,state,action\n0,a,x\n', self.mdp)
        assert excinfo.value.line_number == 1
        with pytest.raises(MalformedRow):
            Report.parse_trajectory_csv('', self.mdp)
        with pytest.raises(MalformedRow):
            Report.parse_trajectory_csv('step,state_label,action_label\n0,a,x,1\n', self.mdp)

    def test_reward_table(self):
        text = Report.reward_table_csv(['a', 'b'], [0.1, -2.])
        assert text == 'state_label,reward\na,0.10000000000000001\nb,-2\n'

    def test_comparison(self):
        first = {'state_labels': ['a', 'b'], 'state_rewards': [1.5, 0.]}
        second = {'state_labels': ['a', 'b'], 'state_rewards': [0.25, -1.]}
        text = Report.comparison_csv([('C1', first), ('C2', second)])
        assert text == 'state_label,C1,C2\na,1.5,0.25\nb,0,-1\n'
        with pytest.raises(InvalidConfig):
            Report.comparison_csv([('C1', first), ('C1', second)])
        with pytest.raises(InvalidConfig):
            Report.comparison_csv([('C1', first), ('C2', {'state_labels': ['b', 'a'], 'state_rewards': [0., 0.]})])

    def test_json_floats_read_back_exactly(self):
        values = [0.1 + 0.2, 1. / 3, -2.5e-300, 123456789.12345679]
        assert json.loads(Report.to_json(values)) == values
