"""Integrating-factor representations of S and I.

Each of the S and I equations is linear in its own compartment,

    S' = (-beta * I(t)) * S,    I' = (beta * S(t) - gamma) * I,

so X(t) = X(0) * exp(F(t)) with F the integral of the coefficient. The
integrals are taken from the trajectory's augmented quadratures ``p_i`` and
``g_i``; comparing the representation against the integrated S and I is an
end-to-end consistency check of the integration.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import NonFiniteInput, TimeOutOfRange, UnorderedSamples
from .integrator import G_I, I, P_I, S, Trajectory


@dataclass(frozen=True)
class RepresentationResidual:
    max_rel_error_s: float
    max_rel_error_i: float
    argmax_t_s: float
    argmax_t_i: float
    n_samples: int


def _check_time(tr: Trajectory, t: float):
    if not 0.0 <= t <= tr.t_end:
        raise TimeOutOfRange(f"t={t!r} outside [0, {tr.t_end!r}]")


def s_representation(tr: Trajectory, t: float) -> float:
    """``S(0) * exp(-beta * p_i(t))``."""
    _check_time(tr, t)
    p_i = tr.sample_many([t])[0, P_I]
    return tr.init.s * math.exp(-tr.params.beta * p_i)


def i_representation(tr: Trajectory, t: float) -> float:
    """``I(0) * exp(g_i(t))``; identically zero when ``I(0) = 0``."""
    _check_time(tr, t)
    if tr.init.i == 0.0:
        return 0.0
    g_i = tr.sample_many([t])[0, G_I]
    return tr.init.i * math.exp(g_i)


def representation_residuals(tr: Trajectory, n_samples: int = 1000) -> RepresentationResidual:
    """Worst relative mismatch between representations and sampled S, I.

    The denominator is floored at ``max(1, N) * 1e-12`` so a compartment that
    decays to zero does not make the relative error ill-posed.
    """
    if n_samples < 2:
        raise ValueError("n_samples must be >= 2")
    times = np.linspace(0.0, tr.t_end, n_samples)
    times[-1] = tr.t_end
    ys = tr.sample_many(times)
    floor = max(1.0, tr.population) * 1e-12
    s_repr = tr.init.s * np.exp(-tr.params.beta * ys[:, P_I])
    if tr.init.i == 0.0:
        i_repr = np.zeros_like(times)
    else:
        i_repr = tr.init.i * np.exp(ys[:, G_I])
    err_s = np.abs(s_repr - ys[:, S]) / np.maximum(floor, np.abs(ys[:, S]))
    err_i = np.abs(i_repr - ys[:, I]) / np.maximum(floor, np.abs(ys[:, I]))
    ks, ki = int(np.argmax(err_s)), int(np.argmax(err_i))
    return RepresentationResidual(
        max_rel_error_s=float(err_s[ks]),
        max_rel_error_i=float(err_i[ki]),
        argmax_t_s=float(times[ks]),
        argmax_t_i=float(times[ki]),
        n_samples=n_samples,
    )


def trapezoid_integral(times, values, t: float) -> float:
    """Trapezoid integral of sampled ``values`` from ``times[0]`` to ``t``.

    ``t`` may fall between samples; the integrand is then linearly interpolated.
    """
    times = np.asarray(times, dtype=float)
    values = np.asarray(values, dtype=float)
    if times.ndim != 1 or times.shape != values.shape or times.size < 1:
        raise UnorderedSamples("times and values must be 1-D arrays of equal length")
    if times.size > 1 and not np.all(np.diff(times) > 0):
        raise UnorderedSamples("sample times must be strictly increasing")
    if not (np.all(np.isfinite(times)) and np.all(np.isfinite(values))):
        raise NonFiniteInput("samples must be finite")
    if not times[0] <= t <= times[-1]:
        raise TimeOutOfRange(f"t={t!r} outside [{times[0]!r}, {times[-1]!r}]")
    k = int(np.searchsorted(times, t, side="right"))
    head_t, head_v = times[:k], values[:k]
    if head_t[-1] < t:
        v_t = np.interp(t, times, values)
        head_t = np.append(head_t, t)
        head_v = np.append(head_v, v_t)
    if head_t.size < 2:
        return 0.0
    return float(np.sum(np.diff(head_t) * (head_v[1:] + head_v[:-1]) / 2))


def scalar_linear_solution(f_samples, x_a: float, t: float) -> float:
    """Solve ``X' = f(t) X`` from samples of ``f`` by the integrating factor.

    Args:
        f_samples: pair ``(times, values)`` of the coefficient on ``[a, b]``,
            times strictly increasing with ``a = times[0]``.
        x_a: initial value ``X(a)``.
        t: evaluation time in ``[a, b]``.

    Returns:
        ``x_a * exp(F(t))`` with ``F`` the trapezoid integral of ``f`` from ``a``.
        The sign of the result always matches the sign of ``x_a``.
    """
    times, values = f_samples
    if not math.isfinite(x_a):
        raise NonFiniteInput(f"x_a must be finite, got {x_a!r}")
    big_f = trapezoid_integral(times, values, t)
    if x_a == 0.0:
        return 0.0
    return x_a * math.exp(big_f)
