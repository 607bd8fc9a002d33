"""Cusp parameters from character traces.

On the character-variety side, the cusp parameter of the cusp carried by a
peripheral pair (mu, lambda) can be evaluated from five trace functions,
using the conjugate meridian mu' = gamma mu^-1 gamma^-1 for any gamma not
commuting with mu:

    C = (2 I_{lambda mu'} - I_lambda I_{mu'}) / (2 I_{mu mu'} - I_mu I_{mu'}).

The denominator vanishes exactly when mu and mu' commute, which is the
excluded locus; inside it, normalizing mu upper-triangular and mu' lower-
triangular exhibits C as the ratio b/a of translation lengths, i.e. the
cusp parameter.

This module evaluates the formula numerically from trace tuples or from
explicit SL2 matrices, and provides the specific trace parametrization of
the one-parameter family relevant to the Whitehead-link reconciliation
checks (see `whitehead_theta` / `whitehead_trace_tuple`).
"""

from __future__ import annotations

from dataclasses import dataclass

import mpmath
from mpmath import mp


class TraceError(ValueError):
    pass


@dataclass(frozen=True)
class TraceTuple:
    """Traces of mu, mu' = gamma mu^-1 gamma^-1, lambda, lambda*mu', mu*mu'."""

    I_mu: mpmath.mpc
    I_mu_prime: mpmath.mpc
    I_lambda: mpmath.mpc
    I_lambda_mu_prime: mpmath.mpc
    I_mu_mu_prime: mpmath.mpc

    def denominator(self) -> mpmath.mpc:
        return 2 * self.I_mu_mu_prime - self.I_mu * self.I_mu_prime


@dataclass(frozen=True)
class MatrixRep:
    """Peripheral pair (m_mu, m_lambda) and an auxiliary m_gamma, all in SL2."""

    m_mu: tuple
    m_lambda: tuple
    m_gamma: tuple


def _as_matrix(m) -> mpmath.matrix:
    M = mp.matrix(2, 2)
    for i in range(2):
        for j in range(2):
            M[i, j] = mp.mpc(m[i][j])
    return M


def _det(M) -> mpmath.mpc:
    return M[0, 0] * M[1, 1] - M[0, 1] * M[1, 0]


def _inv_sl2(M):
    return mp.matrix([[M[1, 1], -M[0, 1]], [-M[1, 0], M[0, 0]]])


def cusp_parameter_from_traces(t: TraceTuple) -> mpmath.mpc:
    """The value C; raises TraceError on the commuting locus."""
    den = t.denominator()
    tol = mp.mpf(2) ** (-mp.prec // 2)
    if abs(den) < tol:
        raise TraceError(
            "denominator 2 I_{mu mu'} - I_mu I_{mu'} vanishes: mu and mu' "
            "commute here, so the trace formula does not apply"
        )
    return (2 * t.I_lambda_mu_prime - t.I_lambda * t.I_mu_prime) / den


def traces_from_matrices(rep: MatrixRep, det_tol: float = 1e-12) -> TraceTuple:
    """Compute the five traces from explicit matrices.

    Requires unit determinants and a commuting peripheral pair
    (m_mu, m_lambda) within tolerance.
    """
    m_mu = _as_matrix(rep.m_mu)
    m_lambda = _as_matrix(rep.m_lambda)
    m_gamma = _as_matrix(rep.m_gamma)
    for name, M in (("m_mu", m_mu), ("m_lambda", m_lambda), ("m_gamma", m_gamma)):
        if abs(_det(M) - 1) > det_tol:
            raise TraceError(f"{name} must have determinant 1 (got {mp.nstr(_det(M), 8)})")
    comm = m_mu * m_lambda - m_lambda * m_mu
    if max(abs(comm[i, j]) for i in range(2) for j in range(2)) > det_tol * 100:
        raise TraceError("m_mu and m_lambda must commute (peripheral pair)")
    mu_prime = m_gamma * _inv_sl2(m_mu) * _inv_sl2(m_gamma)
    tr = lambda M: M[0, 0] + M[1, 1]
    return TraceTuple(
        I_mu=tr(m_mu),
        I_mu_prime=tr(mu_prime),
        I_lambda=tr(m_lambda),
        I_lambda_mu_prime=tr(m_lambda * mu_prime),
        I_mu_mu_prime=tr(m_mu * mu_prime),
    )


def whitehead_theta(x) -> tuple:
    """The trace coordinates (I_a, I_b, I_ab) of the one-parameter family
    of characters attached to the curve of structures with the first cusp
    complete, as a function of the shape-curve parameter x.

        I_a  = 2
        I_b  = (x^2 - 2x - 1) / sqrt(x (1 - x^2))
        I_ab = -2x / sqrt(x (1 - x^2))

    The square root is the principal branch; both square-root-dependent
    traces flip sign together under the other branch, and downstream
    quantities built from their squares and products are branch-free.
    """
    x = mp.mpc(x)
    for bad in (0, 1, -1):
        if abs(x - bad) < mp.mpf(2) ** (-mp.prec // 2):
            raise TraceError("x must avoid {0, 1, -1}")
    root = mp.sqrt(x * (1 - x ** 2))
    I_a = mp.mpc(2)
    I_b = (x ** 2 - 2 * x - 1) / root
    I_ab = -2 * x / root
    return I_a, I_b, I_ab


def whitehead_trace_tuple(I_ab) -> TraceTuple:
    """TraceTuple along the curve cut out by I_ab^2 - I_ab I_b + 2 = 0,
    where the non-meridian traces collapse to functions of t = I_ab:

        I_mu = I_mu' = 2,   I_lambda = -2,
        I_{lambda mu'} = I_{mu mu'} = 2 t^-2 (t^2 + 2).
    """
    t = mp.mpc(I_ab)
    if abs(t) < mp.mpf(2) ** (-mp.prec // 2):
        raise TraceError("I_ab must be nonzero")
    mixed = 2 * (t ** 2 + 2) / t ** 2
    return TraceTuple(
        I_mu=mp.mpc(2),
        I_mu_prime=mp.mpc(2),
        I_lambda=mp.mpc(-2),
        I_lambda_mu_prime=mixed,
        I_mu_mu_prime=mixed,
    )


def whitehead_curve_residual(I_b, I_ab) -> mpmath.mpf:
    """|I_ab^2 - I_ab I_b + 2|: how far a character sits from the curve
    of Dehn-filling characters with the first cusp complete."""
    return abs(I_ab ** 2 - I_ab * I_b + 2)


def whitehead_cusp_parameter(x) -> mpmath.mpc:
    """C evaluated through the trace coordinates at curve parameter x."""
    _, I_b, I_ab = whitehead_theta(x)
    return cusp_parameter_from_traces(whitehead_trace_tuple(I_ab))
