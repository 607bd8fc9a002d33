"""Geometric-isolation testing for a cusp of a two-cusped manifold.

A cusp is *not* geometrically isolated from the other when its parameter
function varies along the curve of structures keeping it complete.  That
is certifiable: a nonzero first or second derivative at the complete
structure, or a certified spread of sampled values along the traced curve,
witnesses non-constancy.  Constancy itself is not certifiable from finitely
many numerical samples, so the verdict is always NotIsolated(...) or
Inconclusive, never "isolated".

Derivatives come from the implicit function theorem on the pinned system:
with one coordinate chosen as the curve parameter (largest tangent entry,
ties to the lowest index), first derivatives solve M u' = -v and second
derivatives solve M u'' = -(Hessian contraction), all with exact gradients
and Hessians of the cleared equations evaluated in arbitrary precision.
"""

from __future__ import annotations

from dataclasses import dataclass

import mpmath
from mpmath import mp

from .holonomy import MonomialSum, ShapeAssignment, cusp_parameter
from .manifold import IdealTriangulation
from .solver import (
    SolveError,
    SolveResult,
    completeness_system,
    numerical_kernel,
    solve_complete,
    system_jacobian,
    trace_completeness_curve,
)


@dataclass(frozen=True)
class IsolationEvidence:
    cusp: str
    jacobian_rank: int
    tangent: tuple
    d_tau: mpmath.mpc
    d2_tau: mpmath.mpc | None
    continuation_spread: mpmath.mpf | None
    verdict: str            # "NotIsolated" or "Inconclusive"
    order: int | None       # 1, 2, or None (continuation / inconclusive)
    pin_index: int
    notes: tuple[str, ...] = ()

    @property
    def not_isolated(self) -> bool:
        return self.verdict == "NotIsolated"

    def to_jsonable(self) -> dict:
        def c(v):
            return None if v is None else {"re": mp.nstr(v.real, 12), "im": mp.nstr(v.imag, 12)}
        return {
            "cusp": self.cusp,
            "jacobian_rank": self.jacobian_rank,
            "tangent": [c(t) for t in self.tangent],
            "d_tau": c(self.d_tau),
            "d2_tau": c(self.d2_tau),
            "continuation_spread": None if self.continuation_spread is None
            else mp.nstr(self.continuation_spread, 8),
            "verdict": self.verdict,
            "order": self.order,
            "pin_index": self.pin_index,
            "notes": list(self.notes),
        }


class KernelDimensionError(SolveError):
    """The completeness locus is not a curve at this point."""


def completeness_jacobian(tri: IdealTriangulation, cusp: int, shapes: ShapeAssignment):
    """Jacobian of {cleared edge equations, mu(meridian) - 1} at a point,
    with its numerical kernel basis.

    Returns (rows, kernel, rank, singular_values, ambiguous)."""
    with mp.workprec(shapes.precision_bits + 30):
        eqs = completeness_system(tri, cusp)
        z = list(shapes.z)
        rows = system_jacobian(eqs, z)
        kernel, rank, svals, ambiguous = numerical_kernel(rows, shapes.precision_bits)
        return rows, kernel, rank, svals, ambiguous


def _pin_choice(tangent) -> int:
    best = 0
    for i in range(1, len(tangent)):
        if abs(tangent[i]) > abs(tangent[best]) + mp.mpf(2) ** -40:
            best = i
    return best


def _hessian_contraction(eq_sum: MonomialSum, z, velocity, n):
    """velocity^T Hess(eq) velocity, via exact second derivative sums."""
    total = mp.mpc(0)
    firsts = [eq_sum.derivative(i) for i in range(n)]
    for i in range(n):
        if velocity[i] == 0:
            continue
        for j in range(n):
            if velocity[j] == 0:
                continue
            second = firsts[i].derivative(j)
            if second.is_zero():
                continue
            val = mp.mpc(0)
            for (a, b), coeff in second.terms.items():
                term = mp.mpc(coeff)
                for zi, az, bz in zip(z, a, b):
                    if az:
                        term *= zi ** az
                    if bz:
                        term *= (1 - zi) ** bz
                val += term
            total += velocity[i] * velocity[j] * val
    return total


def curve_derivatives(tri: IdealTriangulation, cusp: int, shapes: ShapeAssignment,
                      pin: int | None = None):
    """First and second derivatives of the shape coordinates along the
    completeness curve, parametrized by the pinned coordinate.

    Returns (dz, d2z, pin, rank, kernel): dz and d2z are full-length
    vectors with dz[pin] = 1, d2z[pin] = 0.
    """
    prec = shapes.precision_bits
    with mp.workprec(prec + 30):
        eqs = completeness_system(tri, cusp)
        z = list(shapes.z)
        n = len(z)
        rows = system_jacobian(eqs, z)
        kernel, rank, svals, ambiguous = numerical_kernel(rows, prec)
        if len(kernel) != 1:
            raise KernelDimensionError(
                f"kernel dimension {len(kernel)} at the complete structure "
                "(expected 1); singular values "
                + ", ".join(mp.nstr(s, 5) for s in svals)
            )
        tangent = kernel[0]
        if pin is None:
            pin = _pin_choice(tangent)
        if abs(tangent[pin]) < mp.mpf(2) ** (-prec // 4):
            raise SolveError(f"coordinate {pin} is not a parameter for the curve here")
        free = [i for i in range(n) if i != pin]

        # first derivatives: M u' = -v, columns split by the pinned variable
        M_rows = [[row[i] for i in free] for row in rows]
        v_col = [row[pin] for row in rows]
        u1 = _lstsq(M_rows, [-v for v in v_col])
        dz = [mp.mpc(0)] * n
        dz[pin] = mp.mpc(1)
        for idx, i in enumerate(free):
            dz[i] = u1[idx]

        # second derivatives: M u'' = -(velocity^T Hess velocity)
        rhs = []
        for eq in eqs:
            rhs.append(-_hessian_contraction(eq.cleared, z, dz, n))
        u2 = _lstsq(M_rows, rhs)
        d2z = [mp.mpc(0)] * n
        for idx, i in enumerate(free):
            d2z[i] = u2[idx]
        return dz, d2z, pin, rank, tangent


def _lstsq(rows, rhs):
    A = mp.matrix(rows)
    b = mp.matrix(rhs)
    U, S, V = mp.svd_c(A)
    smax = max(S[i] for i in range(S.rows))
    cut = smax * mp.mpf(2) ** (-mp.prec // 2)
    Utb = U.H * b
    y = mp.matrix(V.cols, 1)
    for i in range(S.rows):
        if S[i] > cut:
            y[i] = Utb[i] / S[i]
    x = V.H * y
    return [x[i] for i in range(V.cols)]


def _tau_c_derivatives(tri, cusp_data, shapes, dz, d2z):
    """d/dt and d^2/dt^2 of tau(l)/tau(m) along the parametrized curve."""
    prec = shapes.precision_bits
    num, den = cusp_parameter(tri, cusp_data)
    n = shapes.n
    z = list(shapes.z)
    with mp.workprec(prec + 30):
        def ev(s):
            val = mp.mpc(0)
            for (a, b), coeff in s.terms.items():
                term = mp.mpc(coeff)
                for zi, az, bz in zip(z, a, b):
                    if az:
                        term *= zi ** az
                    if bz:
                        term *= (1 - zi) ** bz
                val += term
            return val

        N = ev(num)
        D = ev(den)
        dN = [ev(num.derivative(i)) for i in range(n)]
        dD = [ev(den.derivative(i)) for i in range(n)]
        N1 = sum(a * t for a, t in zip(dN, dz))
        D1 = sum(a * t for a, t in zip(dD, dz))
        # second directional derivatives along the curve:
        N2 = _hessian_contraction(num, z, dz, n) + sum(a * t for a, t in zip(dN, d2z))
        D2 = _hessian_contraction(den, z, dz, n) + sum(a * t for a, t in zip(dD, d2z))
        tau1 = (N1 * D - N * D1) / D ** 2
        tau2 = (N2 * D - N * D2) / D ** 2 - 2 * D1 * (N1 * D - N * D1) / D ** 3
        return tau1, tau2


def tau_derivatives(tri: IdealTriangulation, cusp: int, shapes: ShapeAssignment,
                    order: int = 2, pin: int | None = None):
    """(d_tau, d2_tau) of the cusp parameter along the completeness curve,
    plus the underlying shape derivatives.

    Returns a dict with keys d_tau, d2_tau, dz, d2z, pin, rank.
    """
    if order not in (1, 2):
        raise ValueError("order must be 1 or 2")
    dz, d2z, pin, rank, tangent = curve_derivatives(tri, cusp, shapes, pin=pin)
    d_tau, d2_tau = _tau_c_derivatives(tri, tri.cusps[cusp], shapes, dz, d2z)
    if order == 1:
        d2_tau = None
    return {
        "d_tau": d_tau,
        "d2_tau": d2_tau,
        "dz": dz,
        "d2z": d2z,
        "pin": pin,
        "rank": rank,
        "tangent": tangent,
    }


def isolation_verdict(tri: IdealTriangulation, cusp: int,
                      precision_bits: int = 256, tol: mpmath.mpf | None = None,
                      continuation_points: int = 8, continuation_step: float = 1e-3,
                      seed: int = 0, start: SolveResult | None = None) -> IsolationEvidence:
    """Test whether the cusp parameter provably varies along the curve
    where this cusp stays complete.

    Order-1 and order-2 derivative tests run first; continuation sampling
    is the fallback.  Every piece of evidence is recomputed at doubled
    precision and must agree to half the working digits before it is
    believed.  A nonzero certified derivative or spread yields NotIsolated;
    anything else is Inconclusive (constancy is never asserted).
    """
    if tol is None:
        tol = mp.mpf(10) ** (-20 * precision_bits // 256)
    if start is None:
        start = solve_complete(tri, precision_bits, seed=seed)
    if not start.success:
        raise SolveError("complete solve failed; no isolation test possible")
    cusp_name = tri.cusps[cusp].name
    notes = []

    shapes = start.shapes
    info = tau_derivatives(tri, cusp, shapes, order=2)
    # recompute at doubled precision (polishing the known solution);
    # require agreement to half the digits
    start_hi = solve_complete(tri, 2 * precision_bits, seed=seed, initial=start.shapes)
    info_hi = tau_derivatives(tri, cusp, start_hi.shapes, order=2, pin=info["pin"])
    agree_tol = mp.mpf(2) ** (-precision_bits // 2)

    def certified(key):
        lo, hi = info[key], info_hi[key]
        return abs(lo - hi) < agree_tol * (1 + abs(hi))

    d_tau = info["d_tau"]
    d2_tau = info["d2_tau"]
    if abs(d_tau) > tol and certified("d_tau"):
        return IsolationEvidence(
            cusp=cusp_name, jacobian_rank=info["rank"],
            tangent=tuple(info["tangent"]), d_tau=d_tau, d2_tau=d2_tau,
            continuation_spread=None, verdict="NotIsolated", order=1,
            pin_index=info["pin"], notes=tuple(notes),
        )
    if abs(d2_tau) > tol and certified("d2_tau"):
        return IsolationEvidence(
            cusp=cusp_name, jacobian_rank=info["rank"],
            tangent=tuple(info["tangent"]), d_tau=d_tau, d2_tau=d2_tau,
            continuation_spread=None, verdict="NotIsolated", order=2,
            pin_index=info["pin"], notes=tuple(notes),
        )

    # continuation fallback
    spread = None
    try:
        samples = trace_completeness_curve(
            tri, cusp, n_points=continuation_points, step=continuation_step,
            precision_bits=precision_bits, seed=seed, start=start)
        tau0 = samples[0][1]
        spread = max(abs(t - tau0) for _, t in samples[1:])
        samples_hi = trace_completeness_curve(
            tri, cusp, n_points=continuation_points, step=continuation_step,
            precision_bits=2 * precision_bits, seed=seed, start=start_hi)
        spread_hi = max(abs(t - samples_hi[0][1]) for _, t in samples_hi[1:])
        spread_certified = abs(spread - spread_hi) < agree_tol * (1 + spread_hi)
        if spread > tol and spread_certified:
            return IsolationEvidence(
                cusp=cusp_name, jacobian_rank=info["rank"],
                tangent=tuple(info["tangent"]), d_tau=d_tau, d2_tau=d2_tau,
                continuation_spread=spread, verdict="NotIsolated", order=None,
                pin_index=info["pin"], notes=tuple(notes),
            )
    except SolveError as exc:
        notes.append(f"continuation failed: {exc}")

    notes.append(
        "no certified variation found to order 2 or along the traced curve; "
        "constancy is NOT certified by this outcome"
    )
    return IsolationEvidence(
        cusp=cusp_name, jacobian_rank=info["rank"], tangent=tuple(info["tangent"]),
        d_tau=d_tau, d2_tau=d2_tau, continuation_spread=spread,
        verdict="Inconclusive", order=None, pin_index=info["pin"], notes=tuple(notes),
    )
