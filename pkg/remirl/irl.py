# ------------------------------------------------------------------------------
# Purpose:       irl recovers state rewards from trajectories (Maximum Entropy
#                IRL), evaluates Bayesian-IRL step likelihoods, and checks that
#                the myopic step likelihood reproduces the REM likelihood.
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

import numpy as np
from scipy.special import logsumexp

from remirl.errors import EmptyDemonstrations, InvalidConfig, RealizedStateNotInCandidates
from remirl.events import ActionSpace, EventHistory
from remirl.mdp import ROW_SUM_TOL, Mdp, Trajectory
from remirl.rem import ORDINAL, Rem, RemDesign, RemModel

logger = logging.getLogger(__name__)

SUCCESSORS: str = 'successors'
ALL_STATES: str = 'all'


class RewardModel:
    def __init__(
        self,
        theta: t.Sequence[float] | np.ndarray,
        gamma: float = 0.,
        converged: bool = True,
        gradient_norm: float = 0.
    ) -> None:
        '''
        A linear state reward R(s) = theta . f(s) with its discount factor.

        Args:
            theta (Sequence[float] | np.ndarray): reward weights, one per feature.
            gamma (float): discount factor in [0, 1).
            converged (bool): whether the estimator that produced theta met
                its tolerance.
            gradient_norm (float): infinity norm of the final estimator gradient.
        '''
        self.theta: np.ndarray = np.asarray(theta, dtype=float).copy()
        if self.theta.ndim != 1 or not np.all(np.isfinite(self.theta)):
            raise InvalidConfig('reward weights must be a finite vector')
        if not 0. <= gamma < 1.:
            raise InvalidConfig(f'gamma must lie in [0, 1), got {gamma}')
        self.gamma: float = float(gamma)
        self.converged: bool = converged
        self.gradient_norm: float = gradient_norm

    def __repr__(self) -> str:
        return f'RewardModel(theta={self.theta.tolist()}, gamma={self.gamma})'


class SoftPolicy:
    def __init__(self, probs: np.ndarray) -> None:
        # probs[s][a]
        self.probs: np.ndarray = np.asarray(probs, dtype=float)
        if self.probs.ndim != 2:
            raise InvalidConfig(f'policy must be S x A, got shape {self.probs.shape}')
        if np.any(self.probs < 0) or not np.allclose(self.probs.sum(axis=1), 1., rtol=0, atol=ROW_SUM_TOL):
            raise InvalidConfig('every policy row must be a probability distribution')

    @property
    def n_states(self) -> int:
        return self.probs.shape[0]

    def __repr__(self) -> str:
        return f'SoftPolicy(S={self.probs.shape[0]}, A={self.probs.shape[1]})'


class MaxEntConfig:
    def __init__(
        self,
        learning_rate: float = 0.01,
        epochs: int = 1000,
        horizon: int | None = None,
        convergence_tol: float = 1e-6,
        seed: int = 0,
        random_init: bool = False
    ) -> None:
        '''
        Settings for `Irl.maxent_irl`.

        Args:
            learning_rate (float): gradient ascent step size.
            epochs (int): maximum number of gradient steps.
            horizon (int | None): soft recursion horizon; None means the
                longest demonstration.
            convergence_tol (float): stop once the gradient's infinity norm is
                at most this.
            seed (int): seeds the initial theta when `random_init` is set.
            random_init (bool): start from small random weights instead of zeros.
        '''
        if learning_rate <= 0:
            raise InvalidConfig(f'learning rate must be positive, got {learning_rate}')
        if epochs < 0:
            raise InvalidConfig(f'epochs must be non-negative, got {epochs}')
        if horizon is not None and horizon < 1:
            raise InvalidConfig(f'horizon must be at least 1, got {horizon}')
        if convergence_tol <= 0:
            raise InvalidConfig(f'convergence tolerance must be positive, got {convergence_tol}')
        self.learning_rate: float = learning_rate
        self.epochs: int = epochs
        self.horizon: int | None = horizon
        self.convergence_tol: float = convergence_tol
        self.seed: int = seed
        self.random_init: bool = random_init


class Irl:
    @staticmethod
    def state_rewards(mdp: Mdp, reward: RewardModel) -> np.ndarray:
        if reward.theta.size != mdp.n_features:
            raise InvalidConfig(
                f'{reward.theta.size} reward weights for {mdp.n_features} state features'
            )
        return mdp.features @ reward.theta

    @staticmethod
    def soft_backward_pass(mdp: Mdp, reward: t.Sequence[float] | np.ndarray, horizon: int) -> SoftPolicy:
        '''
        Maximum-entropy policy for a per-state reward collected on arrival,
        from the log-domain soft Bellman recursion run `horizon` steps back
        from a zero terminal value.  The first-step action distribution is
        returned and used as a stationary policy.

        Args:
            mdp (Mdp): transitions P[a][s][s'].
            reward (Sequence[float] | np.ndarray): R(s), one per state.
            horizon (int): number of decisions (>= 1).

        Returns:
            SoftPolicy: pi[s][a] = exp(Q(s, a) - V(s)).
        '''
        reward = np.asarray(reward, dtype=float)
        if reward.shape != (mdp.n_states,) or not np.all(np.isfinite(reward)):
            raise InvalidConfig('reward must be a finite vector with one entry per state')
        if horizon < 1:
            raise InvalidConfig(f'horizon must be at least 1, got {horizon}')

        value: np.ndarray = np.zeros(mdp.n_states)
        q: np.ndarray = np.zeros((mdp.n_states, mdp.n_actions))
        for _ in range(horizon):
            arrival: np.ndarray = np.broadcast_to(reward + value, mdp.transitions.shape)
            # Q[a][s] = log sum_s' P[a][s][s'] exp(R(s') + V(s'))
            q = logsumexp(arrival, axis=2, b=mdp.transitions).T
            value = logsumexp(q, axis=1)
        return SoftPolicy(np.exp(q - value[:, None]))

    @staticmethod
    def expected_svf(
        mdp: Mdp,
        policy: SoftPolicy,
        start_distribution: t.Sequence[float] | np.ndarray,
        horizon: int
    ) -> np.ndarray:
        '''
        Expected state visitation counts over `horizon` steps, starting state
        included.
        '''
        start: np.ndarray = np.asarray(start_distribution, dtype=float)
        if start.shape != (mdp.n_states,) or abs(start.sum() - 1.) > 1e-9:
            raise InvalidConfig('start distribution must sum to 1 over the states')
        dist: np.ndarray = start
        total: np.ndarray = np.zeros(mdp.n_states)
        for _ in range(horizon):
            total += dist
            dist = np.einsum('s,sa,ast->t', dist, policy.probs, mdp.transitions)
        return total

    @staticmethod
    def _summarize(
        mdp: Mdp,
        trajectories: t.Sequence[Trajectory],
        horizon: int | None
    ) -> tuple[np.ndarray, list[tuple[int, float, np.ndarray]], int]:
        # (empirical feature sums, [(length, weight, start distribution)], horizon)
        demos: list[Trajectory] = [traj for traj in trajectories if len(traj) > 0]
        if not demos:
            raise EmptyDemonstrations('no demonstration has any step')
        for traj in demos:
            states: np.ndarray = traj.states
            if states.min() < 0 or states.max() >= mdp.n_states:
                raise InvalidConfig('demonstration state index out of bounds')

        longest: int = max(len(traj) for traj in demos)
        if horizon is None:
            horizon = longest
        elif horizon < longest:
            raise InvalidConfig(f'horizon {horizon} is shorter than a {longest}-step demonstration')

        empirical: np.ndarray = np.mean(
            [mdp.features[traj.states].sum(axis=0) for traj in demos], axis=0
        )
        byLength: dict[int, np.ndarray] = {}
        for traj in demos:
            starts: np.ndarray = byLength.setdefault(len(traj), np.zeros(mdp.n_states))
            starts[traj.steps[0][0]] += 1
        groups: list[tuple[int, float, np.ndarray]] = [
            (length, byLength[length].sum() / len(demos), byLength[length] / byLength[length].sum())
            for length in sorted(byLength)
        ]
        return empirical, groups, horizon

    @staticmethod
    def _gradient(
        mdp: Mdp,
        summary: tuple[np.ndarray, list[tuple[int, float, np.ndarray]], int],
        theta: np.ndarray
    ) -> np.ndarray:
        empirical, groups, horizon = summary
        policy: SoftPolicy = Irl.soft_backward_pass(mdp, mdp.features @ theta, horizon)
        expected: np.ndarray = np.zeros(mdp.n_features)
        for length, weight, start in groups:
            expected += weight * (Irl.expected_svf(mdp, policy, start, length) @ mdp.features)
        return empirical - expected

    @staticmethod
    def maxent_gradient(
        mdp: Mdp,
        trajectories: t.Sequence[Trajectory],
        theta: t.Sequence[float] | np.ndarray,
        horizon: int | None = None
    ) -> np.ndarray:
        '''
        Gradient of the mean demonstration log-likelihood under the MaxEnt
        model: empirical per-trajectory feature sums minus their expectation
        under the soft policy for theta.  Demonstrations of equal length share
        an empirical start distribution and are propagated together.

        Raises:
            EmptyDemonstrations
        '''
        summary = Irl._summarize(mdp, trajectories, horizon)
        return Irl._gradient(mdp, summary, np.asarray(theta, dtype=float))

    @staticmethod
    def maxent_irl(
        mdp: Mdp,
        trajectories: t.Sequence[Trajectory],
        config: MaxEntConfig | None = None
    ) -> RewardModel:
        '''
        Maximum Entropy IRL by plain gradient ascent on the reward weights.

        Args:
            mdp (Mdp): the MDP, with state features.
            trajectories (Sequence[Trajectory]): demonstrations (non-empty).
            config (MaxEntConfig | None): step size, epochs, horizon, tolerance.

        Returns:
            RewardModel: the weights reached (gamma 0), with `converged` set
                when the gradient's infinity norm fell to the tolerance.
        '''
        if config is None:
            config = MaxEntConfig()
        summary = Irl._summarize(mdp, trajectories, config.horizon)

        theta: np.ndarray = np.zeros(mdp.n_features)
        if config.random_init:
            rng = np.random.Generator(np.random.Philox(config.seed))
            theta = rng.normal(scale=0.01, size=mdp.n_features)

        gradNorm: float = np.inf
        converged: bool = False
        for epoch in range(config.epochs + 1):
            grad: np.ndarray = Irl._gradient(mdp, summary, theta)
            gradNorm = float(np.max(np.abs(grad)))
            if gradNorm <= config.convergence_tol:
                converged = True
                break
            if epoch == config.epochs:
                break
            theta = theta + config.learning_rate * grad
            if not np.all(np.isfinite(theta)):
                raise InvalidConfig('MaxEnt weights diverged; lower the learning rate')
            if epoch % 100 == 0:
                logger.debug('maxent epoch %d: |grad|=%.3e', epoch, gradNorm)

        if not converged:
            logger.warning(
                'MaxEnt IRL stopped after %d epochs with |grad|=%.3e', config.epochs, gradNorm
            )
        return RewardModel(theta, 0., converged, gradNorm)

    @staticmethod
    def birl_trajectory_loglik(
        trajectory: Trajectory | t.Sequence[int],
        reward: t.Sequence[float] | np.ndarray,
        candidate_states_per_step: t.Sequence[t.Sequence[int]] | None = None,
        normalize: str = SUCCESSORS
    ) -> float:
        '''
        Myopic Bayesian-IRL log-likelihood: each realized state is chosen with
        probability proportional to exp(R(s)) among its step's candidate
        successor states.

        Args:
            trajectory (Trajectory | Sequence[int]): the realized states, one
                per step (a Trajectory contributes its state column).
            reward (Sequence[float] | np.ndarray): R(s) for every state index.
            candidate_states_per_step (Sequence[Sequence[int]] | None): the
                reachable successors of each step; required when normalizing
                over successors.
            normalize (str): 'successors' or 'all' (normalize over every state).

        Raises:
            RealizedStateNotInCandidates
        '''
        reward = np.asarray(reward, dtype=float)
        realized: np.ndarray = (
            trajectory.states if isinstance(trajectory, Trajectory)
            else np.asarray(trajectory, dtype=np.int64)
        )
        if normalize == ALL_STATES:
            return float(np.sum(reward[realized]) - len(realized) * logsumexp(reward))
        if normalize != SUCCESSORS:
            raise InvalidConfig(f'normalize must be {SUCCESSORS!r} or {ALL_STATES!r}')
        if candidate_states_per_step is None or len(candidate_states_per_step) != len(realized):
            raise InvalidConfig('one candidate set is needed per realized state')

        loglik: float = 0.
        for i, (state, candidates) in enumerate(zip(realized, candidate_states_per_step)):
            cands: np.ndarray = np.asarray(candidates, dtype=np.int64)
            if state not in cands:
                raise RealizedStateNotInCandidates(
                    f'step {i}: realized state {state} is not among its candidates'
                )
            loglik += reward[state] - logsumexp(reward[cands])
        return float(loglik)

    @staticmethod
    def rem_birl_equivalence(
        history: EventHistory,
        model: RemModel,
        space: ActionSpace,
        covariates: np.ndarray | None = None
    ) -> dict[str, float]:
        '''
        Evaluate a history both as a REM (ordinal likelihood) and as a
        history-as-state MDP scored by the myopic step likelihood.  Step i
        moves from A_(i-1) to one of |A| successor histories {a', A_(i-1)},
        and successor (i, a') is state i * |A| + a' with reward theta . u(a', A_(i-1)).

        Returns:
            dict[str, float]: rem_ll, birl_ll and abs_diff.
        '''
        design: RemDesign = RemDesign.from_history(history, space, model.specs, ORDINAL, covariates)
        remLoglik: float = Rem.evaluate(design, model.theta, ORDINAL)[0]

        m: int = design.n_events
        k: int = len(space)
        rewards: np.ndarray = (design.stats[:m] @ model.theta).reshape(-1)
        realized: np.ndarray = np.arange(m) * k + design.realized
        candidates: list[range] = [range(i * k, (i + 1) * k) for i in range(m)]
        birlLoglik: float = Irl.birl_trajectory_loglik(realized, rewards, candidates)
        return {
            'rem_ll': remLoglik,
            'birl_ll': birlLoglik,
            'abs_diff': abs(remLoglik - birlLoglik),
        }

    @staticmethod
    def q_values(
        mdp: Mdp,
        reward: t.Sequence[float] | np.ndarray,
        gamma: float,
        tol: float = 1e-10,
        max_iter: int = 100000
    ) -> tuple[np.ndarray, np.ndarray]:
        '''
        Optimal action values Q[s][a] and state values V[s] by value
        iteration, rewards collected on arrival:
        Q(s, a) = sum_s' P[a][s][s'] (R(s') + gamma V(s')).
        '''
        if not 0. <= gamma < 1.:
            raise InvalidConfig(f'gamma must lie in [0, 1), got {gamma}')
        reward = np.asarray(reward, dtype=float)
        if reward.shape != (mdp.n_states,):
            raise InvalidConfig('reward must have one entry per state')

        value: np.ndarray = np.zeros(mdp.n_states)
        q: np.ndarray = np.zeros((mdp.n_states, mdp.n_actions))
        for _ in range(max_iter):
            q = (mdp.transitions @ (reward + gamma * value)).T
            newValue: np.ndarray = q.max(axis=1)
            delta: float = float(np.max(np.abs(newValue - value)))
            value = newValue
            if delta <= tol:
                break
        else:
            logger.warning('value iteration hit %d iterations before reaching tol=%g', max_iter, tol)
        return q, value

    @staticmethod
    def optimal_policy(
        mdp: Mdp,
        reward: t.Sequence[float] | np.ndarray,
        gamma: float,
        tol: float = 1e-10
    ) -> tuple[np.ndarray, np.ndarray]:
        '''
        Greedy optimal policy and its value vector.  Actions whose value is
        within rounding of the best are tied, and the lowest index wins.

        Returns:
            tuple[np.ndarray, np.ndarray]: action index per state, V per state.
        '''
        q, value = Irl.q_values(mdp, reward, gamma, tol)
        best: np.ndarray = q.max(axis=1, keepdims=True)
        tied: np.ndarray = q >= best - 1e-12 * (1. + np.abs(best))
        return np.argmax(tied, axis=1), value

    @staticmethod
    def boltzmann_trajectory_loglik(
        mdp: Mdp,
        trajectory: Trajectory,
        reward: t.Sequence[float] | np.ndarray,
        gamma: float,
        beta: float = 1.
    ) -> float:
        '''
        Forward-looking Bayesian-IRL likelihood of the observed actions, with
        pi(a | s) proportional to exp(beta * Q*(s, a)).  With gamma 0 on a
        deterministic MDP this is the myopic successor-normalized likelihood.
        '''
        if beta < 0:
            raise InvalidConfig(f'beta must be non-negative, got {beta}')
        q, _ = Irl.q_values(mdp, reward, gamma)
        if len(trajectory) == 0:
            return 0.
        scaled: np.ndarray = beta * q[trajectory.states]
        chosen: np.ndarray = scaled[np.arange(len(trajectory)), trajectory.actions]
        return float(np.sum(chosen - logsumexp(scaled, axis=1)))
