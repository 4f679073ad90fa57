# ------------------------------------------------------------------------------
# Purpose:       rem evaluates relational event model likelihoods (ordinal and
#                timestamped) and fits their coefficients by maximum likelihood.
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
import math
import typing as t

import numpy as np
from scipy.special import logsumexp

from remirl.errors import (
    InvalidConfig, MissingTimestamps, MissingEndTime, DegenerateStatistic
)
from remirl.events import ActionSpace, ActionTriple, EventHistory, EventUtils
from remirl.statistics import Prefix, Statistics, StatisticSpec

logger = logging.getLogger(__name__)

ORDINAL: str = 'ordinal'
TIMESTAMPED: str = 'timestamped'
MODES: tuple[str, ...] = (ORDINAL, TIMESTAMPED)


class RemModel:
    def __init__(
        self,
        specs: t.Sequence[StatisticSpec],
        theta: t.Sequence[float] | np.ndarray | None = None
    ) -> None:
        '''
        Statistic specs plus their coefficient vector theta; the rate of a
        candidate is exp(theta . u(candidate, history)).
        '''
        self.specs: tuple[StatisticSpec, ...] = tuple(specs)
        if theta is None:
            theta = np.zeros(len(self.specs))
        self.theta: np.ndarray = np.asarray(theta, dtype=float).copy()
        if self.theta.shape != (len(self.specs),):
            raise InvalidConfig(
                f'theta has {self.theta.size} entries for {len(self.specs)} statistics'
            )
        if not np.all(np.isfinite(self.theta)):
            raise InvalidConfig('theta must be finite')

    def __repr__(self) -> str:
        return f'RemModel({Statistics.format_specs(self.specs)}, theta={self.theta.tolist()})'


class FitConfig:
    def __init__(
        self,
        mode: str = ORDINAL,
        init_theta: t.Sequence[float] | np.ndarray | None = None,
        max_iter: int = 10000,
        tol: float = 1e-8,
        compute_se: bool = True,
        hessian_step: float = 1e-5
    ) -> None:
        if mode not in MODES:
            raise InvalidConfig(f'mode must be one of {MODES}, got {mode!r}')
        if max_iter < 0 or tol <= 0:
            raise InvalidConfig('max_iter must be >= 0 and tol > 0')
        self.mode: str = mode
        self.init_theta: np.ndarray | None = (
            None if init_theta is None else np.asarray(init_theta, dtype=float)
        )
        self.max_iter: int = max_iter
        self.tol: float = tol
        self.compute_se: bool = compute_se
        self.hessian_step: float = hessian_step


class FitResult:
    def __init__(
        self,
        specs: t.Sequence[StatisticSpec],
        mode: str,
        theta_hat: np.ndarray,
        loglik: float,
        gradient_norm: float,
        n_iterations: int,
        converged: bool,
        std_errors: np.ndarray | None = None,
        loglik_trace: list[float] | None = None
    ) -> None:
        self.specs: tuple[StatisticSpec, ...] = tuple(specs)
        self.mode: str = mode
        self.theta_hat: np.ndarray = theta_hat
        self.loglik: float = loglik
        self.gradient_norm: float = gradient_norm
        self.n_iterations: int = n_iterations
        self.converged: bool = converged
        self.std_errors: np.ndarray | None = std_errors
        # log-likelihood after each accepted step, starting with the initial point
        self.loglik_trace: list[float] = loglik_trace or []

    @property
    def model(self) -> RemModel:
        return RemModel(self.specs, self.theta_hat)

    def to_dict(self) -> dict[str, t.Any]:
        return {
            'theta': self.theta_hat.tolist(),
            'loglik': self.loglik,
            'se': None if self.std_errors is None else self.std_errors.tolist(),
            'converged': self.converged,
            'iterations': self.n_iterations,
            'gradient_norm': self.gradient_norm,
            'stats': Statistics.format_specs(self.specs),
            'mode': self.mode,
        }

    def __repr__(self) -> str:
        return (
            f'FitResult(theta={self.theta_hat.tolist()}, loglik={self.loglik}, '
            f'converged={self.converged}, iterations={self.n_iterations})'
        )


class RemDesign:
    def __init__(
        self,
        stats: np.ndarray,
        realized: np.ndarray,
        exposures: np.ndarray | None = None
    ) -> None:
        '''
        Everything a likelihood evaluation needs, computed once per history.

        Args:
            stats (np.ndarray): (M+1) x |A| x d statistics; slice i is u(., A_i).
            realized (np.ndarray): the M realized action indices.
            exposures (np.ndarray | None): M+1 waiting-time exposures for the
                timestamped likelihood: tau_i - tau_(i-1) for each event, then
                the trailing t - tau_M.  None for ordinal-only designs.
        '''
        self.stats: np.ndarray = stats
        self.realized: np.ndarray = realized
        self.exposures: np.ndarray | None = exposures

    @property
    def n_events(self) -> int:
        return len(self.realized)

    @property
    def n_stats(self) -> int:
        return self.stats.shape[2]

    @staticmethod
    def from_history(
        history: EventHistory,
        space: ActionSpace,
        specs: t.Sequence[StatisticSpec],
        mode: str = ORDINAL,
        covariates: np.ndarray | None = None
    ) -> 'RemDesign':
        if mode not in MODES:
            raise InvalidConfig(f'mode must be one of {MODES}, got {mode!r}')
        realized: np.ndarray = EventUtils.action_indices(space, history)
        exposures: np.ndarray | None = None
        if mode == TIMESTAMPED:
            if len(history) > 0 and not history.is_timestamped:
                raise MissingTimestamps('the timestamped likelihood needs event times')
            if history.end_time is None:
                raise MissingEndTime('the timestamped likelihood needs an observation end time')
            times: np.ndarray = np.concatenate(
                ([history.origin_time], history.timestamps(), [history.end_time])
            )
            exposures = np.diff(times)
        stats: np.ndarray = Statistics.history_tensor(space, history, specs, covariates)
        return RemDesign(stats, realized, exposures)


class Rem:
    @staticmethod
    def log_rate(
        candidate: ActionTriple,
        prefix: Prefix,
        model: RemModel,
        covariate_row: t.Sequence[float] | None = None
    ) -> float:
        u: list[float] = [
            Statistics.statistic(spec, candidate, prefix, covariate_row) for spec in model.specs
        ]
        return float(np.dot(model.theta, u))

    @staticmethod
    def rate(
        candidate: ActionTriple,
        prefix: Prefix,
        model: RemModel,
        covariate_row: t.Sequence[float] | None = None
    ) -> float:
        '''
        The rate (hazard) exp(theta . u) of one candidate given a history prefix.
        '''
        return math.exp(Rem.log_rate(candidate, prefix, model, covariate_row))

    @staticmethod
    def _ordinal(design: RemDesign, theta: np.ndarray) -> tuple[float, np.ndarray]:
        m: int = design.n_events
        if m == 0:
            return 0., np.zeros(design.n_stats)
        u: np.ndarray = design.stats[:m]
        scores: np.ndarray = u @ theta
        lse: np.ndarray = logsumexp(scores, axis=1)
        steps: np.ndarray = np.arange(m)
        loglik: float = float(np.sum(scores[steps, design.realized] - lse))
        probs: np.ndarray = np.exp(scores - lse[:, None])
        grad: np.ndarray = (
            u[steps, design.realized].sum(axis=0) - np.einsum('ik,ikd->d', probs, u)
        )
        return loglik, grad

    @staticmethod
    def _timestamped(design: RemDesign, theta: np.ndarray) -> tuple[float, np.ndarray]:
        if design.exposures is None:
            raise MissingEndTime('design was built without exposures')
        m: int = design.n_events
        scores: np.ndarray = design.stats @ theta
        rates: np.ndarray = np.exp(scores)
        steps: np.ndarray = np.arange(m)
        loglik: float = float(
            np.sum(scores[steps, design.realized])
            - np.dot(design.exposures, rates.sum(axis=1))
        )
        grad: np.ndarray = (
            design.stats[steps, design.realized].sum(axis=0)
            - np.einsum('i,ik,ikd->d', design.exposures, rates, design.stats)
        )
        return loglik, grad

    @staticmethod
    def evaluate(design: RemDesign, theta: np.ndarray, mode: str) -> tuple[float, np.ndarray]:
        '''
        Log-likelihood and its gradient at theta.
        '''
        theta = np.asarray(theta, dtype=float)
        if mode == ORDINAL:
            return Rem._ordinal(design, theta)
        if mode == TIMESTAMPED:
            return Rem._timestamped(design, theta)
        raise InvalidConfig(f'mode must be one of {MODES}, got {mode!r}')

    @staticmethod
    def step_probabilities(design: RemDesign, theta: np.ndarray) -> np.ndarray:
        '''
        M x |A| matrix of per-step softmax choice probabilities.
        '''
        scores: np.ndarray = design.stats[:design.n_events] @ np.asarray(theta, dtype=float)
        return np.exp(scores - logsumexp(scores, axis=1, keepdims=True))

    @staticmethod
    def ordinal_loglik(
        history: EventHistory,
        model: RemModel,
        space: ActionSpace,
        covariates: np.ndarray | None = None
    ) -> float:
        '''
        Timestamp-free log-likelihood: the sum over events of the log softmax
        probability of the realized action among all candidates.
        '''
        design = RemDesign.from_history(history, space, model.specs, ORDINAL, covariates)
        return Rem._ordinal(design, model.theta)[0]

    @staticmethod
    def timestamped_loglik(
        history: EventHistory,
        model: RemModel,
        space: ActionSpace,
        covariates: np.ndarray | None = None
    ) -> float:
        '''
        Survival/hazard log-likelihood with rates held constant between events:
        sum of log rates of realized events minus every candidate's rate times
        the waiting time it survived, including the trailing window to end_time.
        '''
        design = RemDesign.from_history(history, space, model.specs, TIMESTAMPED, covariates)
        return Rem._timestamped(design, model.theta)[0]

    @staticmethod
    def loglik_gradient(
        history: EventHistory,
        model: RemModel,
        space: ActionSpace,
        mode: str = ORDINAL,
        covariates: np.ndarray | None = None
    ) -> np.ndarray:
        design = RemDesign.from_history(history, space, model.specs, mode, covariates)
        return Rem.evaluate(design, model.theta, mode)[1]

    @staticmethod
    def hessian(design: RemDesign, theta: np.ndarray, mode: str, step: float = 1e-5) -> np.ndarray:
        '''
        Central-difference Hessian of the analytic gradient, symmetrized.
        '''
        theta = np.asarray(theta, dtype=float)
        d: int = theta.size
        hess: np.ndarray = np.zeros((d, d))
        for j in range(d):
            h: float = step * max(1., abs(theta[j]))
            e: np.ndarray = np.zeros(d)
            e[j] = h
            gPlus: np.ndarray = Rem.evaluate(design, theta + e, mode)[1]
            gMinus: np.ndarray = Rem.evaluate(design, theta - e, mode)[1]
            hess[:, j] = (gPlus - gMinus) / (2 * h)
        return (hess + hess.T) / 2

    @staticmethod
    def _check_identifiable(design: RemDesign, specs: t.Sequence[StatisticSpec], mode: str) -> None:
        u: np.ndarray = design.stats
        for j, spec in enumerate(specs):
            col: np.ndarray = u[:, :, j]
            if mode == ORDINAL:
                if design.n_events == 0 or np.all(np.ptp(col[:design.n_events], axis=1) == 0):
                    raise DegenerateStatistic(
                        f'{spec.label} is constant across candidates at every step'
                    )
            elif np.all(col == 0):
                raise DegenerateStatistic(f'{spec.label} is zero everywhere')

    @staticmethod
    def fit_mle(
        history: EventHistory,
        specs: t.Sequence[StatisticSpec],
        space: ActionSpace,
        config: FitConfig | None = None,
        covariates: np.ndarray | None = None
    ) -> FitResult:
        '''
        Maximum likelihood fit of theta by gradient ascent with backtracking line
        search (Barzilai-Borwein trial steps) on the concave log-likelihood.

        Args:
            history (EventHistory): at least one event.
            specs (Sequence[StatisticSpec]): at least one statistic.
            space (ActionSpace): candidate actions.
            config (FitConfig | None): mode, initial theta, iteration limit and
                tolerance (default FitConfig()).
            covariates (np.ndarray | None): per-action covariates, |A| x p.

        Returns:
            FitResult: estimate, diagnostics and (optionally) standard errors.
                Non-convergence is reported through `converged`, not raised.
        '''
        if config is None:
            config = FitConfig()
        if not specs:
            raise InvalidConfig('at least one statistic is required')
        if len(history) == 0:
            raise InvalidConfig('fitting needs at least one event')

        mode: str = config.mode
        design = RemDesign.from_history(history, space, specs, mode, covariates)
        Rem._check_identifiable(design, specs, mode)

        theta: np.ndarray = (
            np.zeros(len(specs)) if config.init_theta is None else config.init_theta.copy()
        )
        if theta.shape != (len(specs),):
            raise InvalidConfig(f'init_theta has {theta.size} entries for {len(specs)} statistics')

        loglik, grad = Rem.evaluate(design, theta, mode)
        trace: list[float] = [loglik]
        alpha: float = 1. / max(1., float(np.max(np.abs(grad))))
        prevTheta: np.ndarray | None = None
        prevGrad: np.ndarray | None = None
        converged: bool = False
        iterations: int = 0

        while True:
            gradNorm: float = float(np.max(np.abs(grad)))
            if gradNorm <= config.tol:
                converged = True
                break
            if iterations >= config.max_iter:
                break

            if prevTheta is not None and prevGrad is not None:
                s: np.ndarray = theta - prevTheta
                y: np.ndarray = grad - prevGrad
                sy: float = float(s @ y)
                if sy < 0:
                    alpha = float(s @ s) / -sy

            accepted: bool = False
            while alpha > 1e-20:
                candidate: np.ndarray = theta + alpha * grad
                candLoglik, candGrad = Rem.evaluate(design, candidate, mode)
                if np.isfinite(candLoglik) and np.all(np.isfinite(candGrad)):
                    # sufficient increase, or still climbing along the ray
                    # (concavity then guarantees candLoglik >= loglik)
                    if (candLoglik >= loglik + 1e-4 * alpha * float(grad @ grad)
                            or float(candGrad @ grad) >= 0):
                        accepted = True
                        break
                alpha /= 2

            if not accepted:
                logger.warning('line search failed at iteration %d', iterations)
                break

            prevTheta, prevGrad = theta, grad
            theta, loglik, grad = candidate, candLoglik, candGrad
            trace.append(loglik)
            iterations += 1
            logger.debug('iteration %d: loglik %.17g, |grad| %.3g', iterations, loglik, gradNorm)

        if not converged:
            logger.warning(
                'fit did not converge after %d iterations (|grad| = %.3g)', iterations, gradNorm
            )

        stdErrors: np.ndarray | None = None
        if config.compute_se:
            hess: np.ndarray = Rem.hessian(design, theta, mode, config.hessian_step)
            try:
                cov: np.ndarray = np.linalg.inv(-hess)
                if np.all(np.diag(cov) > 0):
                    stdErrors = np.sqrt(np.diag(cov))
                else:
                    logger.warning('negated Hessian is not positive definite; no std errors')
            except np.linalg.LinAlgError:
                logger.warning('Hessian is singular; no std errors')

        return FitResult(
            specs, mode, theta, loglik, gradNorm, iterations, converged, stdErrors, trace
        )
