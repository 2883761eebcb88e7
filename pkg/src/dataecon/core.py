"""Closed-form primitives of the data-economy model.

Production takes data as an input through the technology level attached to
capital: ``y = (z k)^alpha l^beta`` with ``z = d^eta`` and ``d = theta y``.
Solving the implicit fixed point gives the reduced production function

    y = theta^(ae/(1-ae)) * k^(alpha/(1-ae)) * l^(beta/(1-ae)),   ae = alpha*eta.

Optimizing labor out at wage ``w`` leaves accounting profit
``pi(w) * k^(alpha/den)`` with ``den = 1 - beta - ae``, whose derivative in
capital is the endogenous interest rate

    r(k) = (alpha/den) * pi(w) * k^(kx/den),   kx = alpha + beta + ae - 1.

The steady state pairs r(k*) = rho + delta with the accumulation identity
c* = y(k*, l*(k*)) - delta*k*.  All power evaluations run in log space
(exp of sums of logs); near the singular band the exponents behave like
1/kx and direct powers would overflow.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

from .errors import DegenerateError, DomainError, RegimeError
from .params import ModelParams, regime

_LOG_MAX = 709.0  # exp overflow threshold for float64


def _explog(*terms: tuple[float, float]) -> float:
    """exp(sum of exponent*log(base)) with zero exponents skipped.

    Overflow saturates to inf rather than raising; callers treat non-finite
    results as infeasible.
    """
    s = 0.0
    for expo, base in terms:
        if expo != 0.0:
            s += expo * math.log(base)
    if s > _LOG_MAX:
        return math.inf
    return math.exp(s)


def _check_regime(p: ModelParams, band: float | None = None) -> None:
    if regime(p, band).singular:
        raise RegimeError(
            f"alpha+beta+alpha*eta-1 = {p.k_exponent:.6g} lies inside the "
            f"singular band (half-width {p.singular_band if band is None else band}); "
            "closed forms are not evaluated there"
        )


def _check_theta(p: ModelParams) -> None:
    if p.eta > 0.0 and p.theta <= 0.0:
        raise DomainError("theta must be positive when eta > 0 (no data, no output)")


@dataclass(frozen=True)
class SteadyState:
    """Equilibrium quantities; ``feasible`` is False when c* <= 0 or any
    quantity is non-finite."""

    k_star: float
    c_star: float
    l_star: float
    y_star: float
    r_star: float
    feasible: bool


def data_volume(y: float, theta: float) -> float:
    """Data produced from output: d = theta*y."""
    if y < 0.0:
        raise DomainError(f"output must be nonnegative, got {y}")
    return theta * y


def technology(d: float, eta: float) -> float:
    """Technology level from data: z = d^eta.

    d = 0 with eta = 0 is undefined (0^0); callers on the eta = 0 reduction
    path must use z = 1 directly.
    """
    if d < 0.0:
        raise DomainError(f"data volume must be nonnegative, got {d}")
    if d == 0.0:
        if eta == 0.0:
            raise DomainError("0^0 is undefined; use the eta = 0 reduction (z = 1)")
        return 0.0
    return _explog((eta, d))


def output(k: float, l: float, p: ModelParams) -> float:
    """Reduced-form output solving the data fixed point.

    The returned y satisfies y = ((theta*y)^eta * k)^alpha * l^beta.
    """
    if k <= 0.0 or l <= 0.0:
        raise DomainError(f"capital and labor must be positive, got k={k}, l={l}")
    _check_theta(p)
    ae = p.alpha * p.eta
    om = 1.0 - ae
    return _explog((ae / om, p.theta), (p.alpha / om, k), (p.beta / om, l))


def labor_demand(k: float, p: ModelParams) -> float:
    """Profit-maximizing labor input at capital k and wage w.

    From the first-order condition the marginal product of labor equals w:

        l* = [ (beta / ((1-ae) w)) * theta^(ae/(1-ae)) * k^(alpha/(1-ae)) ]^((1-ae)/den)
    """
    if k <= 0.0:
        raise DomainError(f"capital must be positive, got {k}")
    _check_regime(p)
    _check_theta(p)
    ae = p.alpha * p.eta
    om = 1.0 - ae
    den = 1.0 - p.beta - ae
    return _explog(
        (om / den, p.beta / (om * p.w)),
        (ae / den, p.theta),
        (p.alpha / den, k),
    )


def profit_coefficient(p: ModelParams) -> float:
    """Wage-dependent coefficient pi(w) of accounting profit pi(w)*k^(alpha/den).

    Equals output(1, l*(1)) - w*l*(1), the maximized profit at unit capital.
    For valid parameters the value is strictly positive; a nonpositive value
    is possible only through floating-point degeneracy and is propagated by
    callers as a degenerate steady state.
    """
    _check_regime(p)
    _check_theta(p)
    ae = p.alpha * p.eta
    om = 1.0 - ae
    den = 1.0 - p.beta - ae
    # T = ((1-ae)/beta) * theta^(-ae/(1-ae)) * w is the bracket of the
    # labor-optimum closed form; profit is theta^(ae/om) T^(-beta/den)
    # - w T^(-om/den).
    log_t = math.log(om / p.beta) + math.log(p.w)
    if ae != 0.0:
        log_t -= (ae / om) * math.log(p.theta)
    term_y = _explog((ae / om, p.theta)) * math.exp((-p.beta / den) * log_t)
    term_wl = p.w * math.exp((-om / den) * log_t)
    return term_y - term_wl


def interest_rate(k: float, p: ModelParams) -> float:
    """Endogenous interest rate r(k) = (alpha/den) * pi(w) * k^(kx/den).

    This is the derivative of accounting profit in capital, the firm's
    marginal value of one more unit of k.
    """
    if k <= 0.0:
        raise DomainError(f"capital must be positive, got {k}")
    _check_regime(p)
    den = 1.0 - p.beta - p.alpha * p.eta
    return (p.alpha / den) * profit_coefficient(p) * _explog((p.k_exponent / den, k))


def reduced_output(k: float, p: ModelParams) -> float:
    """Output at the firm's labor optimum, y(k, l*(k)).

    Collapses to C * k^(alpha/den) with
    C = theta^(ae/den) * [((1-ae)/beta) w]^(-beta/den).
    """
    if k <= 0.0:
        raise DomainError(f"capital must be positive, got {k}")
    _check_regime(p)
    _check_theta(p)
    ae = p.alpha * p.eta
    den = 1.0 - p.beta - ae
    return _explog(
        (ae / den, p.theta),
        (-p.beta / den, (1.0 - ae) / p.beta * p.w),
        (p.alpha / den, k),
    )


def capital_from_marginal_value(target: float, p: ModelParams,
                                piw: float | None = None) -> float:
    """Invert r(k) = target for capital.

    Shared by the household-side steady state (target = rho + delta) and the
    q-theory block, so both encode the same inversion bit for bit.
    """
    _check_regime(p)
    if target <= 0.0:
        raise DegenerateError(f"marginal-value target must be positive, got {target}")
    if piw is None:
        piw = profit_coefficient(p)
    if piw <= 0.0:
        raise DegenerateError(f"profit coefficient is nonpositive ({piw})")
    den = 1.0 - p.beta - p.alpha * p.eta
    kx = p.k_exponent
    return _explog((den / kx, target * den / (p.alpha * piw)))


def steady_state(p: ModelParams) -> SteadyState:
    """Closed-form steady state of the consumption-capital system.

    k* solves r(k*) = rho + delta; c* = y(k*, l*(k*)) - delta*k*.  The point
    zeroes both dynamic equations.  feasible is False (not an error) when
    c* <= 0 or the closed form overflows, so parameter sweeps can mask cells.
    """
    piw = profit_coefficient(p)
    if piw <= 0.0:
        raise DegenerateError(f"profit coefficient is nonpositive ({piw})")
    r_star = p.rho + p.delta
    k_star = capital_from_marginal_value(r_star, p, piw)
    if not math.isfinite(k_star):
        return SteadyState(k_star, math.nan, math.nan, math.nan, r_star, False)
    l_star = labor_demand(k_star, p)
    y_star = reduced_output(k_star, p)
    c_star = y_star - p.delta * k_star
    feasible = (
        math.isfinite(c_star) and math.isfinite(l_star) and math.isfinite(y_star)
        and k_star > 0.0 and c_star > 0.0 and l_star > 0.0
    )
    return SteadyState(k_star, c_star, l_star, y_star, r_star, feasible)
