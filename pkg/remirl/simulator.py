# ------------------------------------------------------------------------------
# Purpose:       simulator generates synthetic event histories from known REM
#                coefficients, and synthetic MDP trajectories from known rewards.
#                remirl is a package for fitting relational event models and
#                recovering behavioral rewards from dyadic event sequences.
#
# Authors:       remirl contributors
#
# Copyright:     (c) 2026 remirl contributors
# License:       MIT, see LICENSE
# ------------------------------------------------------------------------------

__docformat__ = "google"

import logging
import typing as t
from enum import IntEnum

import numpy as np
from scipy.special import logsumexp

from remirl.errors import InvalidConfig
from remirl.events import ActionSpace, DyadicEvent, EventHistory
from remirl.irl import Irl, SoftPolicy
from remirl.mdp import Mdp, Trajectory
from remirl.statistics import StatisticSpec, StatisticTracker

logger = logging.getLogger(__name__)


class ChoiceRule(IntEnum):
    # next action drawn with probability rate / total rate
    ProbabilityMatching = 1

    # highest-rate action with probability 1 - epsilon, else uniform
    EpsilonGreedy = 2

    @classmethod
    def fromName(cls, name: str) -> 'ChoiceRule':
        key: str = name.strip().lower().replace('_', '-')
        if key in ('probability-matching', 'thompson', 'pm'):
            return cls.ProbabilityMatching
        if key in ('epsilon-greedy', 'egreedy'):
            return cls.EpsilonGreedy
        raise InvalidConfig(f'unknown choice rule {name!r}')


class SimConfig:
    def __init__(
        self,
        specs: t.Sequence[StatisticSpec],
        theta: t.Sequence[float] | np.ndarray,
        n_events: int,
        seed: int = 0,
        rule: ChoiceRule = ChoiceRule.ProbabilityMatching,
        epsilon: float = 0.,
        timestamps: bool = False,
        covariates: np.ndarray | None = None
    ) -> None:
        '''
        Everything that determines a simulated history.

        Args:
            specs (Sequence[StatisticSpec]): statistics driving the rates.
            theta (Sequence[float] | np.ndarray): their coefficients.
            n_events (int): number of events to generate.
            seed (int): generator seed; equal configs give equal histories.
            rule (ChoiceRule): how the next action is chosen from the rates.
            epsilon (float): exploration probability for EpsilonGreedy.
            timestamps (bool): draw exponential waiting times from the total rate.
            covariates (np.ndarray | None): per-action covariates, |A| x p.
        '''
        self.specs: tuple[StatisticSpec, ...] = tuple(specs)
        self.theta: np.ndarray = np.asarray(theta, dtype=float)
        if self.theta.shape != (len(self.specs),) or not np.all(np.isfinite(self.theta)):
            raise InvalidConfig(f'theta must hold {len(self.specs)} finite coefficients')
        if n_events < 0:
            raise InvalidConfig(f'n_events must be non-negative, got {n_events}')
        if not 0. <= epsilon <= 1.:
            raise InvalidConfig(f'epsilon must lie in [0, 1], got {epsilon}')
        self.n_events: int = n_events
        self.seed: int = seed
        self.rule: ChoiceRule = rule
        self.epsilon: float = epsilon
        self.timestamps: bool = timestamps
        self.covariates: np.ndarray | None = covariates


class Simulator:
    @staticmethod
    def generator(seed: int | np.random.SeedSequence) -> np.random.Generator:
        '''
        The counter-based (Philox) generator used for every draw in remirl.
        '''
        if not isinstance(seed, np.random.SeedSequence):
            seed = np.random.SeedSequence(seed)
        return np.random.Generator(np.random.Philox(seed))

    @staticmethod
    def _draw(rng: np.random.Generator, probs: np.ndarray) -> int:
        cumulative: np.ndarray = np.cumsum(probs)
        idx: int = int(np.searchsorted(cumulative, rng.random() * cumulative[-1], side='right'))
        return min(idx, len(probs) - 1)

    @staticmethod
    def simulate(space: ActionSpace, config: SimConfig) -> EventHistory:
        if config.rule == ChoiceRule.EpsilonGreedy:
            return Simulator.simulate_egreedy(space, config)
        return Simulator.simulate_rem(space, config)

    @staticmethod
    def _run(
        space: ActionSpace,
        config: SimConfig,
        choose: t.Callable[[np.random.Generator, np.ndarray], int]
    ) -> EventHistory:
        rng: np.random.Generator = Simulator.generator(config.seed)
        tracker = StatisticTracker(space, config.specs, config.covariates)
        events: list[DyadicEvent] = []
        now: float = 0.
        for _ in range(config.n_events):
            scores: np.ndarray = tracker.matrix() @ config.theta
            timestamp: float | None = None
            if config.timestamps:
                now += rng.exponential(1. / np.exp(logsumexp(scores)))
                timestamp = now
            idx: int = choose(rng, scores)
            s, r, c = space.actions[idx]
            events.append(DyadicEvent(s, r, c, timestamp))
            tracker.push(idx)
        logger.debug('simulated %d events (seed %d)', len(events), config.seed)
        return EventHistory(events, 0., now if config.timestamps else None)

    @staticmethod
    def simulate_rem(space: ActionSpace, config: SimConfig) -> EventHistory:
        '''
        Probability matching: each event is drawn with probability proportional
        to its current rate exp(theta . u).  With timestamps on, the waiting
        time before it is exponential with the total rate, and the history's
        end time is the last event time.
        '''
        def choose(rng: np.random.Generator, scores: np.ndarray) -> int:
            return Simulator._draw(rng, np.exp(scores - scores.max()))

        return Simulator._run(space, config, choose)

    @staticmethod
    def simulate_egreedy(space: ActionSpace, config: SimConfig) -> EventHistory:
        '''
        Epsilon-greedy: with probability epsilon a uniformly random action,
        otherwise the highest-rate action (lowest index among ties).
        '''
        def choose(rng: np.random.Generator, scores: np.ndarray) -> int:
            if rng.random() < config.epsilon:
                return int(rng.integers(len(scores)))
            return int(np.argmax(scores))

        return Simulator._run(space, config, choose)

    @staticmethod
    def simulate_mdp(
        mdp: Mdp,
        reward: t.Sequence[float] | np.ndarray,
        n_trajectories: int,
        horizon: int,
        temperature: float = 1.,
        seed: int = 0,
        start_distribution: t.Sequence[float] | np.ndarray | None = None
    ) -> list[Trajectory]:
        '''
        Demonstrations from the soft policy of reward / temperature.  Each
        trajectory has `horizon` steps and its own generator spawned from the
        seed, so trajectory i does not depend on how many others are drawn.

        Args:
            mdp (Mdp): the MDP to walk.
            reward (Sequence[float] | np.ndarray): R(s), one per state.
            n_trajectories (int): number of trajectories.
            horizon (int): steps per trajectory (>= 1).
            temperature (float): policy temperature (> 0).
            seed (int): generator seed.
            start_distribution (Sequence[float] | np.ndarray | None): initial
                state distribution (default uniform).

        Returns:
            list[Trajectory]: in trajectory-index order.
        '''
        if temperature <= 0:
            raise InvalidConfig(f'temperature must be positive, got {temperature}')
        if n_trajectories < 0:
            raise InvalidConfig(f'n_trajectories must be non-negative, got {n_trajectories}')
        start: np.ndarray = (
            np.full(mdp.n_states, 1. / mdp.n_states) if start_distribution is None
            else np.asarray(start_distribution, dtype=float)
        )
        if start.shape != (mdp.n_states,) or np.any(start < 0) or abs(start.sum() - 1.) > 1e-9:
            raise InvalidConfig('start distribution must sum to 1 over the states')

        policy: SoftPolicy = Irl.soft_backward_pass(
            mdp, np.asarray(reward, dtype=float) / temperature, horizon
        )
        trajectories: list[Trajectory] = []
        for child in np.random.SeedSequence(seed).spawn(n_trajectories):
            rng: np.random.Generator = Simulator.generator(child)
            state: int = Simulator._draw(rng, start)
            steps: list[tuple[int, int]] = []
            for _ in range(horizon):
                action: int = Simulator._draw(rng, policy.probs[state])
                steps.append((state, action))
                state = Simulator._draw(rng, mdp.transitions[action, state])
            trajectories.append(Trajectory(steps))
        return trajectories
