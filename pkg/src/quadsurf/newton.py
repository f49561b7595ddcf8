"""Damped Newton iteration on the stationarity residual.

Each step classifies the samples into a working set from the current
(theta, z), then solves one symmetric augmented system

    [ G      a_T' ] [ d_theta ]   [ -(grad f + a_T' z_T) ]
    [ a_T   -g I  ] [ d_z_T   ] = [ -F_T                 ]

with the perturbation g shrinking like min(tau * g_prev, rho * ||Psi||),
while duals off the working set are reset to zero.  Because the smooth
part is quadratic and the margins affine, the residual for a fixed
working set is affine in (theta, z) and the local rate is quadratic once
the working set settles.
"""

import enum
import json
import math
import time
import warnings
from dataclasses import dataclass, field

import numpy as np
import scipy.linalg

from .model import Dataset, DesignCache, SurfaceParams, build_design, margins
from .stationarity import (IndexSets, PStatCertificate, ResidualParts, index_sets,
                           pstationary_check, residual, saddle_matrix)

GAMMA_FLOOR = 1e-14


class WarmStart(enum.Enum):
    ZEROS = "zeros"
    LEAST_SQUARES = "least_squares"


class SolveStatus(enum.Enum):
    CONVERGED = "converged"
    MAX_ITER = "max_iter"
    SINGULAR_SYSTEM = "singular_system"
    DIVERGED = "diverged"


@dataclass(frozen=True)
class SolverConfig:
    """Newton solver parameters.

    lam              margin-violation penalty (weight of the 0-1 loss count)
    alpha            prox step entering the working-set classification
    tau              shrink factor for the system perturbation, in (0, 1)
    rho              residual multiplier in the perturbation update
    gamma_init       initial perturbation
    eps              stop tolerance on the residual norm
    max_iter         Newton step budget
    warm_start       zeros or the closed-form least-squares fit
    safeguard_window consecutive residual increases tolerated before giving up
    """

    lam: float = 10.0
    alpha: float = 1e-6
    tau: float = 0.5
    rho: float = 1.0
    gamma_init: float = 0.1
    eps: float = 1e-8
    max_iter: int = 100
    warm_start: WarmStart = WarmStart.LEAST_SQUARES
    safeguard_window: int = 5

    def __post_init__(self):
        if not (self.lam > 0 and self.alpha > 0 and self.rho > 0 and self.gamma_init > 0):
            raise ValueError("lam, alpha, rho, gamma_init must be positive")
        if not 0.0 < self.tau < 1.0:
            raise ValueError(f"tau must lie in (0, 1), got {self.tau}")
        if not self.eps > 0:
            raise ValueError(f"eps must be positive, got {self.eps}")
        if self.max_iter < 1 or self.safeguard_window < 1:
            raise ValueError("max_iter and safeguard_window must be at least 1")
        if isinstance(self.warm_start, str):
            object.__setattr__(self, "warm_start", WarmStart(self.warm_start))


@dataclass(frozen=True)
class SolverState:
    theta: SurfaceParams
    z: np.ndarray
    gamma: float
    working: IndexSets
    residual: ResidualParts
    iter: int


class SingularSystemError(RuntimeError):
    """Augmented system could not be factored; carries the offending sigma_min."""

    def __init__(self, sigma_min: float):
        super().__init__(f"singular augmented system, sigma_min={sigma_min:.3e}")
        self.sigma_min = sigma_min


def gamma_update(gamma_prev: float, tau: float, rho: float, resid_norm: float) -> float:
    """Perturbation update min(tau*gamma_prev, rho*resid_norm), floored at 1e-14."""
    if not (gamma_prev > 0 and rho > 0 and 0 < tau < 1 and resid_norm >= 0):
        raise ValueError("invalid gamma_update arguments")
    return max(min(tau * gamma_prev, rho * resid_norm), GAMMA_FLOOR)


def newton_direction(state: SolverState, cache: DesignCache, gamma: float):
    """One augmented-system solve; returns (d_theta, d_z_working, d_z_rest).

    d_z_rest is minus the off-working duals, so the post-step z vanishes
    there exactly.  An empty working set degenerates to the Tikhonov-damped
    smooth step (G + gamma I) d_theta = -grad f.
    """
    if not gamma > 0:
        raise ValueError(f"gamma must be positive, got {gamma}")
    working = state.working.working
    z = state.z
    mask = np.zeros(cache.n, dtype=bool)
    mask[working] = True
    d_z_rest = -z[~mask]

    if working.size == 0:
        K = cache.G + gamma * np.eye(cache.d)
        rhs = -state.residual.grad_part
    else:
        K = saddle_matrix(working, cache, gamma)
        rhs = -np.concatenate([state.residual.grad_part, state.residual.margin_part])
    try:
        with warnings.catch_warnings():
            warnings.simplefilter("ignore", scipy.linalg.LinAlgWarning)
            sol = scipy.linalg.solve(K, rhs)
    except (scipy.linalg.LinAlgError, np.linalg.LinAlgError, ValueError):
        sol = None
    if sol is None or not np.all(np.isfinite(sol)):
        sv = scipy.linalg.svdvals(K)
        raise SingularSystemError(float(sv[-1]))

    d_theta = sol[:cache.d]
    d_z_working = sol[cache.d:]
    return d_theta, d_z_working, d_z_rest


@dataclass(frozen=True)
class SolveReport:
    final: SolverState
    residual_trace: list = field(default_factory=list)
    gamma_trace: list = field(default_factory=list)
    working_sizes: list = field(default_factory=list)
    status: SolveStatus = SolveStatus.MAX_ITER
    certificate: PStatCertificate = None
    wall_time: float = 0.0
    sigma_min: float = None  # populated on singular_system failures

    def to_dict(self) -> dict:
        theta = self.final.theta
        return {
            "status": self.status.value,
            "iters": self.final.iter,
            "residual_trace": [float(r) for r in self.residual_trace],
            "gamma_trace": [float(g) for g in self.gamma_trace],
            "working_sizes": [int(w) for w in self.working_sizes],
            "certificate": self.certificate.to_dict() if self.certificate else None,
            "theta": {"wtri": theta.wtri.tolist(), "b": theta.b.tolist(), "c": theta.c},
            "wall_time_s": self.wall_time,
        }

    def to_json(self, **kwargs) -> str:
        return json.dumps(self.to_dict(), **kwargs)


def solve(data: Dataset, config: SolverConfig = SolverConfig(),
          theta0: SurfaceParams = None, z0: np.ndarray = None,
          cache: DesignCache = None) -> SolveReport:
    """Run the damped Newton iteration until the residual drops below eps.

    The stop test precedes the first step, so with eps = inf the initial
    point is returned untouched.  Iterates leaving the finite range or a
    run of `safeguard_window` consecutive residual increases end the solve
    with status `diverged`; an unfactorable system ends it with
    `singular_system` and the partial trace retained.
    """
    t0 = time.perf_counter()
    if cache is None:
        cache = build_design(data)

    if theta0 is None:
        if config.warm_start is WarmStart.LEAST_SQUARES:
            from .baseline import warm_start_point
            theta, z_start = warm_start_point(data, cache, config.lam, config.alpha)
            if z0 is None:
                z0 = z_start
        else:
            theta = SurfaceParams.zeros(cache.m)
    else:
        theta = theta0
    z = np.zeros(cache.n) if z0 is None else np.asarray(z0, dtype=np.float64).copy()
    if z.shape != (cache.n,):
        raise ValueError(f"z0 has shape {z.shape}, expected ({cache.n},)")

    gamma = config.gamma_init
    residual_trace, gamma_trace, working_sizes = [], [], []
    status = SolveStatus.MAX_ITER
    sigma_min = None
    consecutive_up = 0
    k = 0
    while True:
        F = margins(theta, cache)
        sets = index_sets(F, z, config.alpha, config.lam)
        res = residual(theta, z, sets.working, cache)
        residual_trace.append(res.norm)
        working_sizes.append(int(sets.working.size))

        if not math.isfinite(res.norm):
            status = SolveStatus.DIVERGED
            break
        if res.norm < config.eps:
            status = SolveStatus.CONVERGED
            break
        if k >= config.max_iter:
            status = SolveStatus.MAX_ITER
            break
        if len(residual_trace) >= 2 and residual_trace[-1] > residual_trace[-2]:
            consecutive_up += 1
        else:
            consecutive_up = 0
        if consecutive_up >= config.safeguard_window:
            status = SolveStatus.DIVERGED
            break

        gamma = gamma_update(gamma, config.tau, config.rho, res.norm)
        gamma_trace.append(gamma)
        state = SolverState(theta=theta, z=z, gamma=gamma, working=sets, residual=res, iter=k)
        try:
            d_theta, d_z_working, _ = newton_direction(state, cache, gamma)
        except SingularSystemError as err:
            status = SolveStatus.SINGULAR_SYSTEM
            sigma_min = err.sigma_min
            break

        theta = SurfaceParams.from_vector(theta.to_vector() + d_theta, cache.m)
        z_new = np.zeros(cache.n)
        z_new[sets.working] = z[sets.working] + d_z_working
        z = z_new
        k += 1

    final = SolverState(theta=theta, z=z, gamma=gamma, working=sets, residual=res, iter=k)
    certificate = pstationary_check(theta, z, config.alpha, config.lam, cache,
                                    tol=config.eps * 10.0)
    return SolveReport(final=final, residual_trace=residual_trace, gamma_trace=gamma_trace,
                       working_sizes=working_sizes, status=status, certificate=certificate,
                       wall_time=time.perf_counter() - t0, sigma_min=sigma_min)


@dataclass(frozen=True)
class RateProbe:
    fitted_C: float
    quadratic: bool
    inconclusive: bool
    fit_residual: float
    n_pairs: int


def rate_probe(trace, cap: float = 1e-2, floor: float = 1e-14, window: int = 5) -> RateProbe:
    """Fit C in r_{k+1} ~ C * r_k^2 over the terminal decreasing tail.

    The tail is the longest strictly decreasing suffix of the trace clipped
    to entries <= cap; fewer than 4 such entries is inconclusive.  The fit
    uses the last `window` tail entries (the asymptotic stretch), excluding
    pairs whose successor sits at the arithmetic floor of the trace, where
    rounding flattens the decay regardless of the true rate.  `quadratic`
    requires a finite C, a log10-space RMS deviation below 0.5, and that
    the quadratic model explain the pairs at least as well as a constant
    ratio (which screens out linear-rate traces).
    """
    r = np.asarray(trace, dtype=np.float64).ravel()
    start = r.size - 1
    while start > 0 and r[start - 1] > r[start]:
        start -= 1
    tail = r[start:]
    tail = tail[tail <= cap]
    if tail.size < 4:
        return RateProbe(math.nan, False, True, math.nan, 0)
    cut = max(floor, 3.0 * float(tail.min()))
    span = tail[-window:]
    pairs = [(a, b) for a, b in zip(span[:-1], span[1:]) if a > 0 and b >= cut]
    if len(pairs) < 2:
        return RateProbe(math.nan, False, True, math.nan, len(pairs))
    logc = np.array([math.log10(b) - 2.0 * math.log10(a) for a, b in pairs])
    logg = np.array([math.log10(b) - math.log10(a) for a, b in pairs])
    rms = float(np.sqrt(np.mean((logc - logc.mean()) ** 2)))
    rms_geometric = float(np.sqrt(np.mean((logg - logg.mean()) ** 2)))
    fitted_C = 10.0 ** float(logc.mean())
    quadratic = math.isfinite(fitted_C) and rms < 0.5 and rms <= rms_geometric
    return RateProbe(fitted_C, quadratic, False, rms, len(pairs))
