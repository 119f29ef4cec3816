"""Curve fits, break-even extraction and the closed-form error models."""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from numbers import Real
from typing import NamedTuple, Sequence

import numpy as np


class NoBreakEvenError(ValueError):
    """The sampled curve never crosses effective_rate == epsilon."""


class DivergentEquilibriumError(ValueError):
    pass


# -- a/x + b + c x ------------------------------------------------------------


@dataclass(frozen=True)
class RationalLinearFit:
    a: float
    b: float
    c: float
    residual: float

    def __call__(self, x):
        x = np.asarray(x, dtype=float)
        return self.a / x + self.b + self.c * x

    def terms(self, x: float) -> tuple[float, float, float]:
        return self.a / x, self.b, self.c * x

    @property
    def minimizer(self) -> float | None:
        if self.a <= 0 or self.c <= 0:
            return None
        return math.sqrt(self.a / self.c)


def fit_rational_linear(points: Sequence[tuple[float, float]]) -> RationalLinearFit:
    """Least-squares fit of ``y = a/x + b + c*x`` on relative residuals."""
    pts = np.asarray(points, dtype=float)
    if pts.ndim != 2 or pts.shape[1] != 2:
        raise ValueError("points must be (x, y) pairs")
    x, y = pts[:, 0], pts[:, 1]
    if np.any(x <= 0) or np.any(y <= 0):
        raise ValueError("fit needs x > 0 and y > 0")
    if len(np.unique(x)) < 3:
        raise ValueError("fit needs at least 3 distinct x values")
    design = np.column_stack([1.0 / x, np.ones_like(x), x]) / y[:, None]
    coef, *_ = np.linalg.lstsq(design, np.ones_like(x), rcond=None)
    rel = design @ coef - 1.0
    return RationalLinearFit(*(float(v) for v in coef), residual=float(np.sqrt(np.mean(rel**2))))


class OptimalNop(NamedTuple):
    tabulated: int
    fit: RationalLinearFit
    fitted: float | None


def find_optimal_nop(table: Sequence[tuple[float, float]]) -> OptimalNop:
    """Tabulated and fitted minimizer of the rate-vs-spacing curve."""
    if not table:
        raise ValueError("table must be nonempty")
    rows = [(float(x), float(y)) for x, y, *_ in table]
    best = min(rows, key=lambda r: r[1])
    fit = fit_rational_linear(rows)
    return OptimalNop(int(best[0]), fit, fit.minimizer)


# -- break-even ---------------------------------------------------------------


class BreakEven(NamedTuple):
    epsilon: float
    lower: float
    upper: float


def _crossing(eps: np.ndarray, rate: np.ndarray) -> float:
    g = np.log(rate) - np.log(eps)
    for i in range(len(eps) - 1):
        if g[i] <= 0.0 < g[i + 1] or g[i] == 0.0:
            if g[i] == 0.0:
                return float(eps[i])
            le0, le1 = math.log(eps[i]), math.log(eps[i + 1])
            t = -g[i] / (g[i + 1] - g[i])
            return math.exp(le0 + t * (le1 - le0))
    raise NoBreakEvenError("no break-even in sweep range")


def find_breakeven(curve: Sequence[tuple[float, float, float]]) -> BreakEven:
    """Where the encoded rate equals the bare rate, by log-log interpolation.

    ``curve`` holds (epsilon, effective_rate, rel_std_err) rows.  The band
    comes from shifting all rates by one relative standard error either way.
    """
    arr = np.array(sorted((float(e), float(r), float(s)) for e, r, s in curve))
    if len(arr) < 2:
        raise NoBreakEvenError("need at least two sweep points")
    eps, rate, rse = arr.T
    ok = np.isfinite(rate) & (rate > 0)
    eps, rate, rse = eps[ok], rate[ok], np.nan_to_num(rse[ok], posinf=0.0)
    centre = _crossing(eps, rate)
    # higher rates cross earlier
    try:
        lower = _crossing(eps, rate * (1 + rse))
    except NoBreakEvenError:
        lower = float(eps[0])
    try:
        upper = _crossing(eps, rate * np.clip(1 - rse, 1e-12, None))
    except NoBreakEvenError:
        upper = float(eps[-1])
    return BreakEven(centre, min(lower, centre), max(upper, centre))


def loglog_slope(points: Sequence[tuple[float, float]]) -> float:
    pts = np.asarray(points, dtype=float)
    slope, _ = np.polyfit(np.log(pts[:, 0]), np.log(pts[:, 1]), 1)
    return float(slope)


# -- hand calculation ---------------------------------------------------------


@dataclass(frozen=True)
class HandModelParams:
    """Characteristic constants of a recovery scheme.

    ``K02 * eps**2`` is the chance a recovery step ruins a clean codeword,
    ``K12 * eps`` the chance it ruins one carrying a single correctable error.
    """

    K02: float
    K12: float

    def __post_init__(self) -> None:
        if self.K02 < 0 or self.K12 < 0:
            raise ValueError("K02 and K12 must be nonnegative")

    @classmethod
    def from_single_basis(cls, K02: float = 130.0, K12: float = 9.6, scale: float = 6.0) -> HandModelParams:
        # crude lift from one-basis constants to a full recovery step
        return cls(scale * K02, scale * K12)

    @property
    def n_opt(self) -> float:
        return math.sqrt(self.K02 / 21.0)

    @property
    def components(self) -> tuple[float, float]:
        return 2.0 * math.sqrt(21.0 * self.K02), 7.0 * self.K12

    @property
    def K(self) -> float:
        return sum(self.components)

    def p12(self, epsilon: float) -> float:
        return self.K12 * epsilon

    def p02(self, epsilon: float) -> float:
        return self.K02 * epsilon**2

    p01 = 0.0


def hand_model_eps1(params: HandModelParams, n: float, epsilon: float) -> float:
    if n < 1:
        raise ValueError("n must be at least 1")
    return (21.0 * n * n + 7.0 * n * params.K12 + params.K02) * epsilon**2 / n


def rough_constants(p_sb: float, p_codeword: float, p_sb_codeword: float, mean_measurements: float = 3.5) -> tuple[float, float]:
    """Crude one-basis (K02, K12) from syndrome-measurement coefficients."""
    k02 = p_sb_codeword * (mean_measurements * p_sb + mean_measurements * p_codeword)
    k12 = 2.0 / 3.0 * 4.0 / 7.0 * 4.0 * p_codeword
    return k02, k12


# -- Toffoli recursion ---------------------------------------------------------


@dataclass(frozen=True)
class ToffoliParams:
    eps0: float
    epsT0: float
    level_gate_factor: float = 1000.0
    coefficients: tuple[float, float, float, float] = (5.0, 10.0, 20.0, 1.0 / 512.0)

    def __post_init__(self) -> None:
        if self.eps0 < 0 or self.epsT0 < 0 or self.level_gate_factor < 0 or min(self.coefficients) < 0:
            raise ValueError("Toffoli recursion parameters must be nonnegative")


def toffoli_step(params: ToffoliParams, eps_l: float, epsT_l: float) -> tuple[float, float]:
    c1, c2, c3, c4 = params.coefficients
    eps_next = params.level_gate_factor * eps_l**2
    epsT_next = c1 * eps_next + c2 * epsT_l * eps_l + c3 * epsT_l**2 * eps_l + c4 * epsT_l**3
    return eps_next, epsT_next


def toffoli_recursion(params: ToffoliParams, levels: int) -> list[tuple[float, float]]:
    """Trajectory ``[(eps_0, epsT_0), ..., (eps_levels, epsT_levels)]``."""
    if levels < 1:
        raise ValueError("levels must be at least 1")
    traj = [(params.eps0, params.epsT0)]
    for _ in range(levels):
        traj.append(toffoli_step(params, *traj[-1]))
    return traj


# -- XOR equilibrium and memory errors -------------------------------------------


def xor_equilibrium(
    reduction: Real = Fraction(3, 7), amplification: Real = Fraction(3, 2), injection: Real = 1
) -> Real:
    """Fixed point of ``x -> amplification * reduction * x + injection``.

    Stays exact for :class:`~fractions.Fraction` inputs.
    """
    gain = amplification * reduction
    if gain >= 1:
        raise DivergentEquilibriumError(f"no equilibrium: per-step gain {gain} >= 1")
    return injection / (1 - gain)


def memory_threshold_factor(block_qubits: int = 12, ops_per_qubit: int = 2, wait_steps_per_qubit: int = 24) -> Fraction:
    """Memory-error exposures per operational exposure of a block qubit."""
    if block_qubits < 1 or ops_per_qubit < 1 or wait_steps_per_qubit < 0:
        raise ValueError("need block_qubits >= 1, ops_per_qubit >= 1, wait_steps_per_qubit >= 0")
    return Fraction(wait_steps_per_qubit, ops_per_qubit)


def memory_threshold_estimate(gate_threshold: float, factor: Real) -> tuple[int, float]:
    """(order-of-magnitude reduction, memory threshold) for a given factor."""
    if factor <= 0:
        return 1, math.inf
    reduction = 10 ** round(math.log10(float(factor)))
    return reduction, gate_threshold / reduction
