# ------------------------------------------------------------------------------
# Purpose:       __main__.py is the remirl command line: event-list CSVs in,
#                REM fits, ego MDPs, recovered rewards and reports out.
#                remirl is a package for fitting relational event models and
#                recovering behavioral rewards from dyadic event sequences.
#                Usage:
#                   python3 -m remirl fit-rem --input events.csv --stats reciprocity,inertia
#                   python3 -m remirl build-mdp --input events.csv --ego C1 --output c1.csv
#                   python3 -m remirl irl maxent --trajectory c1.csv --mdp c1.json --output c1_reward.json
#                   python3 -m remirl simulate --theta 0 --events 100 --seed 7
#                   python3 -m remirl check-equivalence --input events.csv --fit fit.json
#                   python3 -m remirl report --rewards c1_reward.json c2_reward.json
#
# Authors:       remirl contributors
#
# Copyright:     (c) 2026 remirl contributors
# License:       MIT, see LICENSE
# ------------------------------------------------------------------------------
import sys
import json
import logging
import argparse
import typing as t
from pathlib import Path

import numpy as np

from remirl.errors import InvalidConfig, RemIrlError
from remirl.events import EventHistory, EventUtils, LoadedEvents, ParsedEvents
from remirl.statistics import Statistics, StatisticSpec
from remirl.rem import MODES, ORDINAL, FitConfig, FitResult, Rem, RemModel
from remirl.mdp import EgoScheme, Mdp, MdpBuilder, Trajectory
from remirl.irl import Irl, MaxEntConfig, RewardModel
from remirl.simulator import ChoiceRule, SimConfig, Simulator
from remirl.report import Report

EXIT_OK: int = 0
EXIT_INVALID: int = 1
EXIT_NOT_CONVERGED: int = 2

DEFAULT_TEAMS: str = 'C1:D1,C2:D2'

# ------------------------------------------------------------------------------


class _Parser(argparse.ArgumentParser):
    # usage errors exit 1 like every other validation error
    def error(self, message: str) -> t.NoReturn:
        raise InvalidConfig(f'{self.prog}: {message}')


def _parse_teams(text: str) -> list[tuple[str, str]]:
    teams: list[tuple[str, str]] = []
    for item in text.split(','):
        captain, sep, driver = item.strip().partition(':')
        if not sep or not captain or not driver:
            raise InvalidConfig(f'team {item!r} is not CAPTAIN:DRIVER')
        teams.append((captain, driver))
    return teams


def _parse_roles(text: str) -> dict[str, str]:
    roles: dict[str, str] = {}
    for item in text.split(','):
        role, sep, actor = item.strip().partition('=')
        if not sep or not role or not actor:
            raise InvalidConfig(f'role {item!r} is not ROLE=ACTOR')
        roles[role] = actor
    return roles


def _parse_theta(text: str, n_specs: int) -> np.ndarray:
    try:
        values: list[float] = [float(x) for x in text.split(',')]
    except ValueError:
        raise InvalidConfig(f'theta {text!r} is not a comma-separated list of numbers') from None
    if len(values) == 1:
        values = values * n_specs
    theta: np.ndarray = np.array(values)
    if theta.shape != (n_specs,) or not np.all(np.isfinite(theta)):
        raise InvalidConfig(f'theta needs {n_specs} finite values, got {text!r}')
    return theta


def _emit(text: str, output: str | None) -> None:
    if output is None:
        sys.stdout.write(text)
    else:
        Report.write_text(output, text)
        print(f'Output saved in {output}.', file=sys.stderr)


def _fit_rem(args: argparse.Namespace) -> int:
    teams: list[tuple[str, str]] | None = _parse_teams(args.teams) if args.teams else None
    loaded: LoadedEvents = EventUtils.load_event_file(args.input, args.end_time, teams)
    specs: list[StatisticSpec] = Statistics.parse_specs(args.stats)
    config = FitConfig(mode=args.mode, max_iter=args.max_iter, tol=args.tol)
    result: FitResult = Rem.fit_mle(loaded.history, specs, loaded.space, config, loaded.covariates)
    _emit(Report.fit_result_json(result), args.output)
    return EXIT_OK if result.converged else EXIT_NOT_CONVERGED


def _build_mdp(args: argparse.Namespace) -> int:
    parsed: ParsedEvents = EventUtils.read_event_csv(args.input)
    history: EventHistory = EventUtils.validate_history(parsed.events)
    scheme: EgoScheme
    if args.roles:
        scheme = MdpBuilder.ego_scheme_from_roles(parsed.roster, args.ego, _parse_roles(args.roles))
    else:
        scheme = MdpBuilder.ego_scheme_from_teams(parsed.roster, args.ego, _parse_teams(args.teams))
    trajectory: Trajectory = MdpBuilder.build_ego_trajectory(history, scheme)
    mdp: Mdp = MdpBuilder.ego_mdp([trajectory], args.smoothing)

    mdpPath: str = args.mdp or str(Path(args.output).with_suffix('.json'))
    _emit(Report.trajectory_csv([trajectory], mdp), args.output)
    _emit(Report.to_json(Report.mdp_to_dict(mdp)), mdpPath)
    return EXIT_OK


def _irl_maxent(args: argparse.Namespace) -> int:
    mdp: Mdp = Report.mdp_from_dict(Report.read_json(args.mdp))
    trajectories: list[Trajectory] = Report.parse_trajectory_csv(
        Path(args.trajectory).read_text(encoding='utf-8'), mdp
    )
    config = MaxEntConfig(
        learning_rate=args.lr,
        epochs=args.epochs,
        horizon=args.horizon,
        convergence_tol=args.tol,
        seed=args.seed,
    )
    reward: RewardModel = Irl.maxent_irl(mdp, trajectories, config)
    tablePath: str = args.table or str(Path(args.output).with_suffix('.csv'))
    _emit(Report.to_json(Report.reward_model_to_dict(reward, mdp)), args.output)
    _emit(Report.reward_table_csv(mdp.state_labels, Irl.state_rewards(mdp, reward)), tablePath)
    return EXIT_OK if reward.converged else EXIT_NOT_CONVERGED


def _simulate(args: argparse.Namespace) -> int:
    specs: list[StatisticSpec] = Statistics.parse_specs(args.stats)
    config = SimConfig(
        specs,
        _parse_theta(args.theta, len(specs)),
        args.events,
        seed=args.seed,
        rule=ChoiceRule.fromName(args.rule),
        epsilon=args.epsilon,
        timestamps=args.timestamps,
    )
    space = EventUtils.enumerate_action_space(args.actors, args.types)
    history: EventHistory = Simulator.simulate(space, config)
    roster: list[str] = [f'A{i + 1}' for i in range(args.actors)]
    _emit(EventUtils.write_event_csv(history, roster, include_type=args.types > 1), args.output)
    return EXIT_OK


def _check_equivalence(args: argparse.Namespace) -> int:
    teams: list[tuple[str, str]] | None = _parse_teams(args.teams) if args.teams else None
    loaded: LoadedEvents = EventUtils.load_event_file(args.input, None, teams)
    model: RemModel
    if args.fit:
        model = Report.fit_result_from_dict(Report.read_json(args.fit)).model
    elif args.theta is not None:
        specs: list[StatisticSpec] = Statistics.parse_specs(args.stats)
        model = RemModel(specs, _parse_theta(args.theta, len(specs)))
    else:
        raise InvalidConfig('check-equivalence needs --theta or --fit')
    report: dict[str, float] = Irl.rem_birl_equivalence(
        loaded.history, model, loaded.space, loaded.covariates
    )
    _emit(Report.to_json(report), args.output)
    return EXIT_OK


def _report(args: argparse.Namespace) -> int:
    names: list[str] = args.names or [Path(p).stem for p in args.rewards]
    if len(names) != len(args.rewards):
        raise InvalidConfig(f'{len(names)} names for {len(args.rewards)} reward files')
    agents = [(name, Report.read_json(p)) for name, p in zip(names, args.rewards)]
    _emit(Report.comparison_csv(agents), args.output)
    return EXIT_OK


def _make_parser() -> _Parser:
    parser = _Parser(
        prog='python3 -m remirl',
        description='Relational event models and inverse reinforcement learning on dyadic event lists'
    )
    parser.add_argument(
        '-v', '--verbose', action='count', default=0,
        help='log progress to stderr (-v info, -vv debug)'
    )
    commands = parser.add_subparsers(dest='command', required=True)

    fit = commands.add_parser('fit-rem', help='fit a relational event model (FitResult JSON)')
    fit.add_argument('--input', required=True, help='event-list CSV')
    fit.add_argument('--output', help='FitResult JSON path (default: stdout)')
    fit.add_argument(
        '--stats', default='reciprocity,inertia',
        help='statistics, e.g. reciprocity,inertia@50,senderactivity,cov0'
    )
    fit.add_argument('--mode', default=ORDINAL, choices=MODES, help='likelihood to maximize')
    fit.add_argument('--end-time', type=float, help='end of observation (default: last event time)')
    fit.add_argument('--teams', help='restrict candidates to team rules, e.g. C1:D1,C2:D2')
    fit.add_argument('--max-iter', type=int, default=10000, help='optimizer iteration limit')
    fit.add_argument('--tol', type=float, default=1e-8, help='gradient norm tolerance')
    fit.set_defaults(run=_fit_rem)

    build = commands.add_parser('build-mdp', help='ego trajectory CSV and transition JSON')
    build.add_argument('--input', required=True, help='event-list CSV')
    build.add_argument('--ego', required=True, help='label of the ego actor')
    build.add_argument(
        '--roles',
        help='own_driver=D1,other_captain=C2,other_driver=D2 (default: derived from --teams)'
    )
    build.add_argument('--teams', default=DEFAULT_TEAMS, help='CAPTAIN:DRIVER pairs')
    build.add_argument('--smoothing', type=float, default=1., help='additive transition smoothing')
    build.add_argument('--output', required=True, help='trajectory CSV path')
    build.add_argument('--mdp', help='MDP JSON path (default: --output with a .json suffix)')
    build.set_defaults(run=_build_mdp)

    irl = commands.add_parser('irl', help='inverse reinforcement learning')
    methods = irl.add_subparsers(dest='method', required=True)
    maxent = methods.add_parser('maxent', help='Maximum Entropy IRL (RewardModel JSON)')
    maxent.add_argument('--trajectory', required=True, help='trajectory CSV from build-mdp')
    maxent.add_argument('--mdp', required=True, help='MDP JSON from build-mdp')
    maxent.add_argument('--output', required=True, help='RewardModel JSON path')
    maxent.add_argument('--table', help='per-state reward CSV (default: --output with a .csv suffix)')
    maxent.add_argument('--epochs', type=int, default=1000, help='gradient ascent epochs')
    maxent.add_argument('--lr', type=float, default=0.01, help='learning rate')
    maxent.add_argument('--horizon', type=int, help='soft recursion horizon (default: longest trajectory)')
    maxent.add_argument('--tol', type=float, default=1e-6, help='gradient convergence tolerance')
    maxent.add_argument('--seed', type=int, default=0, help='seed for random initialization')
    maxent.set_defaults(run=_irl_maxent)

    sim = commands.add_parser('simulate', help='simulate an event list (CSV)')
    sim.add_argument('--actors', type=int, default=5, help='group size')
    sim.add_argument('--types', type=int, default=1, help='number of action types')
    sim.add_argument('--stats', default='reciprocity,inertia', help='statistics driving the rates')
    sim.add_argument(
        '--theta', default='0',
        help='coefficients, comma-separated; one value applies to every statistic '
        '(write --theta=-1,2 for a leading minus sign)'
    )
    sim.add_argument('--events', type=int, default=100, help='number of events')
    sim.add_argument('--seed', type=int, default=0, help='generator seed')
    sim.add_argument(
        '--rule', default='probability-matching',
        choices=['probability-matching', 'epsilon-greedy'], help='action choice rule'
    )
    sim.add_argument('--epsilon', type=float, default=0.1, help='exploration rate for epsilon-greedy')
    sim.add_argument('--timestamps', action='store_true', help='draw exponential waiting times')
    sim.add_argument('--output', help='event CSV path (default: stdout)')
    sim.set_defaults(run=_simulate)

    equiv = commands.add_parser(
        'check-equivalence', help='compare REM and step-wise IRL log-likelihoods (JSON)'
    )
    equiv.add_argument('--input', required=True, help='event-list CSV')
    equiv.add_argument('--fit', help='FitResult JSON whose statistics and theta to use')
    equiv.add_argument('--stats', default='reciprocity,inertia', help='statistics (with --theta)')
    equiv.add_argument('--theta', help='coefficients, comma-separated')
    equiv.add_argument('--teams', help='restrict candidates to team rules, e.g. C1:D1,C2:D2')
    equiv.add_argument('--output', help='report JSON path (default: stdout)')
    equiv.set_defaults(run=_check_equivalence)

    rep = commands.add_parser('report', help='side-by-side per-state rewards (CSV)')
    rep.add_argument('--rewards', required=True, nargs='+', help='RewardModel JSON files')
    rep.add_argument('--names', nargs='*', help='column names (default: file stems)')
    rep.add_argument('--output', help='comparison CSV path (default: stdout)')
    rep.set_defaults(run=_report)

    return parser


def run_cli(argv: t.Sequence[str] | None = None) -> int:
    '''
    Run one remirl command.

    Returns:
        int: 0 on success, 1 on invalid input, 2 when a fit did not converge.
    '''
    try:
        args: argparse.Namespace = _make_parser().parse_args(argv)
        level: int = logging.WARNING
        if args.verbose == 1:
            level = logging.INFO
        elif args.verbose > 1:
            level = logging.DEBUG
        logging.basicConfig(stream=sys.stderr, level=level, format='%(levelname)s %(name)s: %(message)s')
        return args.run(args)
    except RemIrlError as e:
        print(json.dumps(e.to_dict()), file=sys.stderr)
        return EXIT_INVALID
    except OSError as e:
        print(json.dumps({'error': type(e).__name__, 'message': str(e)}), file=sys.stderr)
        return EXIT_INVALID


def main() -> None:
    sys.exit(run_cli(sys.argv[1:]))

# ------------------------------------------------------------------------------


'''
    main entry point (parse arguments and run one command)
'''
if __name__ == "__main__":
    main()
