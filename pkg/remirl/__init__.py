# ------------------------------------------------------------------------------
# Purpose:       remirl is a package for fitting relational event models and
#                recovering behavioral rewards from dyadic event sequences.
#
# Authors:       remirl contributors
#
# Copyright:     (c) 2026 remirl contributors
# License:       MIT, see LICENSE
# ------------------------------------------------------------------------------

__docformat__ = "google"

import sys
import typing as t
from pathlib import Path

from remirl.errors import RemIrlError
from remirl.events import (
    ActionSpace, DyadicEvent, EventHistory, EventUtils, LoadedEvents, ParsedEvents
)
from remirl.statistickind import StatisticKind
from remirl.statistics import StatisticSpec, Statistics, StatisticTracker
from remirl.rem import FitConfig, FitResult, Rem, RemDesign, RemModel
from remirl.mdp import EgoScheme, Mdp, MdpBuilder, Trajectory
from remirl.irl import Irl, MaxEntConfig, RewardModel, SoftPolicy
from remirl.simulator import ChoiceRule, SimConfig, Simulator
from remirl.report import Report

DEFAULT_TEAMS: tuple[tuple[str, str], ...] = (('C1', 'D1'), ('C2', 'D2'))


def fit_rem_file(
    path: str | Path,
    stats: str = 'reciprocity,inertia',
    mode: str = 'ordinal',
    end_time: float | None = None,
    teams: t.Sequence[tuple[str, str]] | None = None,
    config: FitConfig | None = None
) -> FitResult | None:
    '''
    Fit a relational event model to an event-list CSV file.

    Args:
        path (str | Path): the event-list CSV (`time,sender,receiver,type,cov_*`).
        stats (str): comma-separated statistic names, each with an optional
            `@window` suffix.
            (default is 'reciprocity,inertia')
        mode (str): 'ordinal' or 'timestamped'.
            (default is 'ordinal')
        end_time (float | None): end of observation for the timestamped
            likelihood; defaults to the last event time.
        teams (Sequence[tuple[str, str]] | None): (captain, driver) pairs that
            restrict the action space to team communication rules.
            (default is None, every ordered pair is a candidate)
        config (FitConfig | None): optimizer settings.  `mode` overrides its
            mode in the fit; the object itself is left unchanged.

    Returns:
        FitResult | None: the fit, or None if the file or the fit failed.
    '''
    try:
        loaded: LoadedEvents = EventUtils.load_event_file(path, end_time, teams)
        specs: list[StatisticSpec] = Statistics.parse_specs(stats)
        fitConfig: FitConfig = (
            FitConfig(mode=mode) if config is None
            else FitConfig(mode, config.init_theta, config.max_iter, config.tol,
                           config.compute_se, config.hessian_step)
        )
        return Rem.fit_mle(loaded.history, specs, loaded.space, fitConfig, loaded.covariates)
    except (OSError, RemIrlError) as e:
        print(f'fitting {path} failed: {e}', file=sys.stderr)
        return None


def ego_rewards_file(
    path: str | Path,
    ego: str,
    roles: t.Mapping[str, str] | None = None,
    teams: t.Sequence[tuple[str, str]] = DEFAULT_TEAMS,
    smoothing: float = 1.,
    config: MaxEntConfig | None = None
) -> tuple[Mdp, RewardModel] | None:
    '''
    Recover one actor's per-state rewards from an event-list CSV: build the
    ego's trajectory, estimate the 5-state/3-action MDP, and run MaxEnt IRL.

    Args:
        path (str | Path): the event-list CSV.
        ego (str): the ego actor's label.
        roles (Mapping[str, str] | None): own_driver / other_captain /
            other_driver labels; derived from `teams` when None.
        teams (Sequence[tuple[str, str]]): (captain, driver) pairs.
            (default is (('C1', 'D1'), ('C2', 'D2')))
        smoothing (float): additive smoothing of the transition counts.
            (default is 1, add-one)
        config (MaxEntConfig | None): MaxEnt settings.

    Returns:
        tuple[Mdp, RewardModel] | None: the ego MDP and its reward model, or
            None on failure.
    '''
    try:
        parsed: ParsedEvents = EventUtils.read_event_csv(path)
        history: EventHistory = EventUtils.validate_history(parsed.events)
        scheme: EgoScheme = (
            MdpBuilder.ego_scheme_from_roles(parsed.roster, ego, roles) if roles is not None
            else MdpBuilder.ego_scheme_from_teams(parsed.roster, ego, teams)
        )
        trajectory: Trajectory = MdpBuilder.build_ego_trajectory(history, scheme)
        mdp: Mdp = MdpBuilder.ego_mdp([trajectory], smoothing)
        return mdp, Irl.maxent_irl(mdp, [trajectory], config)
    except (OSError, RemIrlError) as e:
        print(f'recovering rewards for {ego} from {path} failed: {e}', file=sys.stderr)
        return None
