# ------------------------------------------------------------------------------
# Purpose:       report serializes remirl results (fits, MDPs, trajectories,
#                reward models and comparisons) to JSON and CSV, and reads
#                them back.
#                remirl is a package for fitting relational event models and
#                recovering behavioral rewards from dyadic event sequences.
#
# Authors:       remirl contributors
#
# Copyright:     (c) 2026 remirl contributors
# License:       MIT, see LICENSE
# ------------------------------------------------------------------------------

__docformat__ = "google"

import json
import typing as t
from pathlib import Path

import numpy as np
import pandas as pd

from remirl.errors import EmptyFile, InvalidConfig, MalformedRow
from remirl.events import EventUtils
from remirl.irl import Irl, RewardModel
from remirl.mdp import Mdp, Trajectory
from remirl.rem import FitResult
from remirl.statistics import Statistics

TRAJECTORY_HEADER: tuple[str, ...] = ('step', 'state_label', 'action_label')
FLOAT_FORMAT: str = '%.17g'


class Report:
    @staticmethod
    def to_json(obj: t.Any) -> str:
        # json writes floats with repr, the shortest text that reads back exactly
        return json.dumps(obj, indent=2) + '\n'

    @staticmethod
    def write_text(path: str | Path, text: str) -> None:
        with open(path, 'w', encoding='utf-8', newline='') as f:
            f.write(text)

    @staticmethod
    def read_json(path: str | Path) -> t.Any:
        try:
            return json.loads(Path(path).read_text(encoding='utf-8'))
        except json.JSONDecodeError as e:
            raise InvalidConfig(f'{path}: not valid JSON ({e.msg} at line {e.lineno})') from None

    @staticmethod
    def fit_result_json(result: FitResult) -> str:
        return Report.to_json(result.to_dict())

    @staticmethod
    def fit_result_from_dict(data: t.Mapping[str, t.Any]) -> FitResult:
        '''
        Rebuild a FitResult from its JSON form (as written by `fit_result_json`).
        '''
        try:
            se: t.Any = data.get('se')
            return FitResult(
                specs=Statistics.parse_specs(data['stats']),
                mode=data['mode'],
                theta_hat=np.asarray(data['theta'], dtype=float),
                loglik=float(data['loglik']),
                gradient_norm=float(data.get('gradient_norm', 0.)),
                n_iterations=int(data.get('iterations', 0)),
                converged=bool(data.get('converged', True)),
                std_errors=None if se is None else np.asarray(se, dtype=float),
            )
        except (KeyError, TypeError) as e:
            raise InvalidConfig(f'not a fit result: {e}') from None

    @staticmethod
    def mdp_to_dict(mdp: Mdp) -> dict[str, t.Any]:
        return {
            'n_states': mdp.n_states,
            'n_actions': mdp.n_actions,
            'state_labels': mdp.state_labels,
            'action_labels': mdp.action_labels,
            'features': mdp.features.tolist(),
            'transitions': mdp.transitions.tolist(),
        }

    @staticmethod
    def mdp_from_dict(data: t.Mapping[str, t.Any]) -> Mdp:
        try:
            return Mdp(
                np.asarray(data['transitions'], dtype=float),
                np.asarray(data['features'], dtype=float) if 'features' in data else None,
                data.get('state_labels'),
                data.get('action_labels'),
            )
        except (KeyError, TypeError) as e:
            raise InvalidConfig(f'not an MDP: {e}') from None

    @staticmethod
    def trajectory_csv(trajectories: t.Sequence[Trajectory], mdp: Mdp) -> str:
        '''
        One row per step, `step,state_label,action_label`; the step counter
        restarts at 0 for each trajectory.
        '''
        rows: list[tuple[int, str, str]] = [
            (i, mdp.state_labels[s], mdp.action_labels[a])
            for traj in trajectories
            for i, (s, a) in enumerate(traj.steps)
        ]
        frame = pd.DataFrame(rows, columns=list(TRAJECTORY_HEADER))
        return frame.to_csv(index=False, lineterminator='\n')

    @staticmethod
    def parse_trajectory_csv(text: str, mdp: Mdp) -> list[Trajectory]:
        states: dict[str, int] = {label: i for i, label in enumerate(mdp.state_labels)}
        actions: dict[str, int] = {label: i for i, label in enumerate(mdp.action_labels)}
        try:
            header, rows = EventUtils.read_csv_frame(text)
        except EmptyFile:
            header, rows = [], pd.DataFrame()
        if tuple(header) != TRAJECTORY_HEADER:
            raise MalformedRow(1, f'trajectory header must be {",".join(TRAJECTORY_HEADER)}')

        trajectories: list[list[tuple[int, int]]] = []
        for idx, stepText, stateLabel, actionLabel in rows.itertuples(name=None):
            if stateLabel not in states or actionLabel not in actions:
                raise MalformedRow(
                    int(idx) + 1, f'unknown state or action label {stateLabel!r}/{actionLabel!r}'
                )
            if stepText == '0' or not trajectories:
                trajectories.append([])
            trajectories[-1].append((states[stateLabel], actions[actionLabel]))
        return [Trajectory(steps) for steps in trajectories]

    @staticmethod
    def reward_model_to_dict(reward: RewardModel, mdp: Mdp) -> dict[str, t.Any]:
        return {
            'theta': reward.theta.tolist(),
            'gamma': reward.gamma,
            'state_rewards': Irl.state_rewards(mdp, reward).tolist(),
            'state_labels': mdp.state_labels,
            'converged': reward.converged,
            'gradient_norm': reward.gradient_norm,
        }

    @staticmethod
    def reward_table_csv(labels: t.Sequence[str], rewards: t.Sequence[float]) -> str:
        frame = pd.DataFrame({
            'state_label': list(labels),
            'reward': np.asarray(rewards, dtype=float),
        })
        return frame.to_csv(index=False, lineterminator='\n', float_format=FLOAT_FORMAT)

    @staticmethod
    def comparison_csv(agents: t.Sequence[tuple[str, t.Mapping[str, t.Any]]]) -> str:
        '''
        Side-by-side per-state rewards of several agents (one column each),
        from (agent name, reward model JSON) pairs.  All agents must share
        the same state labels.
        '''
        if len(agents) < 2:
            raise InvalidConfig('a comparison needs at least two reward models')
        for name, data in agents:
            if not isinstance(data, t.Mapping):
                raise InvalidConfig(f'{name} is not a reward model JSON object')
        labels: list[str] = list(agents[0][1].get('state_labels', []))
        frame = pd.DataFrame({'state_label': labels})
        for name, data in agents:
            if list(data.get('state_labels', [])) != labels:
                raise InvalidConfig(f'{name} has different state labels')
            values: list[float] = [float(x) for x in data.get('state_rewards', [])]
            if len(values) != len(labels):
                raise InvalidConfig(f'{name} has {len(values)} rewards for {len(labels)} states')
            if name in frame.columns:
                raise InvalidConfig(f'agent name {name!r} is used twice')
            frame[name] = np.asarray(values, dtype=float)
        return frame.to_csv(index=False, lineterminator='\n', float_format=FLOAT_FORMAT)
