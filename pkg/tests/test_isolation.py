"""Isolation evidence: Jacobian kernels, implicit derivatives, verdicts.

The second-derivative targets have independent oracles: for the
four-regular-tetrahedra fixture the implicit-function-theorem system was
differentiated symbolically (the pinned 3x3 matrix is invertible and the
second derivative of the first shape with respect to the pinned one is
i/sqrt(3)); for the Whitehead fixture the curve is rational in one
variable and the derivatives of 4x/(1-x^2) - 2 are hand-computed.
"""

import pytest
from mpmath import mp

import cuspforge as cf
from cuspforge.isolation import (
    IsolationEvidence,
    KernelDimensionError,
    completeness_jacobian,
    curve_derivatives,
    isolation_verdict,
    tau_derivatives,
)
from cuspforge.solver import trace_completeness_curve

from conftest import PRECISION


def test_berge_pinned_matrix_and_first_derivatives(berge, solved):
    shapes = solved["berge"].shapes
    info = tau_derivatives(berge, 0, shapes, order=2)
    # tie in tangent magnitudes resolves to the lowest index: the second
    # coordinate is the curve parameter
    assert info["pin"] == 1
    dz = info["dz"]
    assert abs(dz[0]) < mp.mpf("1e-30")          # dz1/dz2 = 0
    assert abs(dz[2]) < mp.mpf("1e-30")          # dz3/dz2 = 0
    assert abs(dz[3] - (1 - mp.sqrt(-3)) / 2) < mp.mpf("1e-30")


def test_berge_second_derivative(berge, solved):
    info = tau_derivatives(berge, 0, solved["berge"].shapes, order=2)
    assert abs(info["d2z"][0] - mp.mpc(0, 1) / mp.sqrt(3)) < mp.mpf("1e-25")
    # d2_tau = zeta2'(z1) * d2z1 with zeta2'(eta) = 1/eta^2
    eta = (1 + mp.sqrt(-3)) / 2
    expected = (1 / eta ** 2) * (mp.mpc(0, 1) / mp.sqrt(3))
    assert abs(info["d2_tau"] - expected) < mp.mpf("1e-25")
    assert abs(info["d_tau"]) < mp.mpf("1e-30")


def test_berge_verdict_order_two(berge, solved):
    ev = isolation_verdict(berge, 0, PRECISION, start=solved["berge"])
    assert ev.not_isolated and ev.order == 2


def test_berge_second_cusp_order_one(berge, solved):
    ev = isolation_verdict(berge, 1, PRECISION, start=solved["berge"])
    assert ev.not_isolated and ev.order == 1


def test_whitehead_kernel_dimension(whitehead, solved):
    rows, kernel, rank, svals, ambiguous = completeness_jacobian(
        whitehead, 0, solved["whitehead"].shapes)
    assert len(kernel) == 1 and not ambiguous
    assert rank == whitehead.n_tet - 1


def test_622_kernel_and_tangent(link622, solved):
    rows, kernel, rank, svals, ambiguous = completeness_jacobian(
        link622, 0, solved["622"].shapes)
    assert len(kernel) == 1
    t = kernel[0]
    # the curve tangent at the symmetric point swaps the paired shapes
    assert abs(t[0] + t[1]) < mp.mpf("1e-30")
    assert abs(t[2]) < mp.mpf("1e-30") and abs(t[3]) < mp.mpf("1e-30")
    assert abs(t[4] + t[5]) < mp.mpf("1e-30")
    # and is consistent with the gradient of the curve polynomial
    z1, z1p = solved["622"].shapes.z[0], solved["622"].shapes.z[1]
    dp1 = (z1p ** 3 + 2 * z1p ** 2 * z1 + 3 * z1p * z1 ** 2
           - 3 * z1p - 2 * z1 + 2)
    dp2 = (3 * z1p ** 2 * z1 + 2 * z1p * z1 ** 2 + z1 ** 3
           - 2 * z1p - 3 * z1 + 2)
    assert abs(dp1 * t[0] + dp2 * t[1]) < mp.mpf("1e-30")


def test_whitehead_derivatives_and_verdict(whitehead, solved):
    info = tau_derivatives(whitehead, 0, solved["whitehead"].shapes, order=2)
    # tangent entries all have modulus 1 here; ties resolve to index 0
    assert info["pin"] == 0
    # first derivative of 4x/(1-x^2) - 2 vanishes at x = i, and the
    # second derivative (24x + 8x^3)/(1-x^2)^3 * (dx/dw)^2 equals 2i
    assert abs(info["d_tau"]) < mp.mpf("1e-30")
    assert abs(info["d2_tau"] - mp.mpc(0, 2)) < mp.mpf("1e-30")
    ev = isolation_verdict(whitehead, 0, PRECISION, start=solved["whitehead"])
    assert ev.not_isolated and ev.order == 2


def test_622_verdict(link622, solved):
    ev = isolation_verdict(link622, 0, PRECISION, start=solved["622"])
    assert ev.not_isolated and ev.order == 2
    assert abs(ev.d_tau) < mp.mpf("1e-25")


def test_derivative_continuation_consistency(whitehead, solved):
    # the second cusp has first-order variation; the traced spread at small
    # steps must match |grad tau . unit tangent| * h within a factor of 2
    info = tau_derivatives(whitehead, 1, solved["whitehead"].shapes, order=1)
    dz_norm = mp.sqrt(sum(abs(v) ** 2 for v in info["dz"]))
    d_unit = abs(info["d_tau"]) / dz_norm
    assert d_unit > mp.mpf("1e-6")
    for h in (mp.mpf("1e-3"), mp.mpf("1e-4")):
        samples = trace_completeness_curve(
            whitehead, 1, n_points=1, step=h,
            precision_bits=PRECISION, start=solved["whitehead"])
        spread = abs(samples[1][1] - samples[0][1])
        assert d_unit * h / 2 < spread < d_unit * h * 2


def test_basis_covariance_of_verdict(whitehead, link622, solved):
    # replacing the longitude l by l + k m (k = +-1) shifts the cusp
    # parameter by the constant k on the completeness curve and leaves the
    # verdict and its order unchanged
    import dataclasses

    for tri_name, tri in (("whitehead", whitehead), ("622", link622)):
        base = isolation_verdict(tri, 0, PRECISION, start=solved[tri_name])
        cusp = tri.cusps[0]
        for k in (1, -1):
            m_k = cusp.meridian if k == 1 else cf.invert_curve(cusp.meridian, tri.n_tet)
            new_l = cf.concat_curves(cusp.longitude, m_k)
            new_cusp = dataclasses.replace(cusp, longitude=new_l)
            cusps = list(tri.cusps)
            cusps[0] = new_cusp
            tri_k = dataclasses.replace(tri, cusps=tuple(cusps))
            ev = isolation_verdict(tri_k, 0, PRECISION, start=solved[tri_name])
            assert ev.verdict == base.verdict and ev.order == base.order
            # the shift is additive, so the derivative evidence agrees
            assert abs(ev.d_tau - base.d_tau) < mp.mpf("1e-25")
            assert abs(ev.d2_tau - base.d2_tau) < mp.mpf("1e-25")


def test_evidence_serialization(berge, solved):
    ev = isolation_verdict(berge, 0, PRECISION, start=solved["berge"])
    blob = ev.to_jsonable()
    assert blob["verdict"] == "NotIsolated" and blob["order"] == 2
    assert isinstance(blob["d2_tau"]["re"], str)
