"""Arbitrary-precision solving of gluing systems.

Complete structures are found by least-squares Newton on the
cleared-denominator polynomial system {edge equations = 1} together with
{mu = 1} for both peripheral curves of every unfilled cusp.  The edge
system always carries redundancy (the product of all edge equations is
identically 1), so Newton steps go through an SVD pseudo-inverse rather
than dropping rows.

Dehn-filled structures replace a filled cusp's completeness rows by the
log-holonomy condition

    p log mu(m) + q log mu(l) = 2 pi i.

The target is reached by ramping the right-hand side from 0 at the
complete structure to 2 pi i, re-solving along the way and carrying the
log branches by continuity; small fillings genuinely leave the principal
branch, so branch bookkeeping is part of the equation, with step halving
and an explicit out-of-range failure when continuity cannot be maintained.

The same Jacobian machinery drives predictor-corrector tracing of the
curve along which one chosen cusp stays complete.
"""

from __future__ import annotations

import random
from dataclasses import dataclass, field
from math import gcd

import mpmath
from mpmath import mp

from .holonomy import MonomialSum, ShapeAssignment, SignedMonomial, mu
from .manifold import IdealTriangulation


class SolveError(RuntimeError):
    """Newton or continuation failed to produce a certified solution."""


REGULAR_SHAPE = mpmath.mpc(0.5, 0.8660254037844386)


def _eval_sum(s: MonomialSum, z: list) -> mpmath.mpc:
    total = mp.mpc(0)
    for (a, b), coeff in s.terms.items():
        term = mp.mpc(coeff)
        for zi, az, bz in zip(z, a, b):
            if az:
                term *= zi ** az
            if bz:
                term *= (1 - zi) ** bz
        total += term
    return total


def _eval_mono(m: SignedMonomial, z: list) -> mpmath.mpc:
    value = mp.mpc(m.sign)
    for zi, az, bz in zip(z, m.a, m.b):
        if az:
            value *= zi ** az
        if bz:
            value *= (1 - zi) ** bz
    return value


def _dlog_row(m: SignedMonomial, z: list) -> list:
    """Gradient of log of a monomial: d log m = sum (a_i/z_i - b_i/(1-z_i))."""
    return [mp.mpc(az) / zi - mp.mpc(bz) / (1 - zi)
            for zi, az, bz in zip(z, m.a, m.b)]


class PolynomialEquation:
    """A monomial equation M = 1 in cleared polynomial form."""

    def __init__(self, monomial: SignedMonomial, label: str = ""):
        self.monomial = monomial
        self.label = label
        self.cleared = monomial.cleared()
        self._grads = [self.cleared.derivative(i) for i in range(monomial.n_vars)]

    def value(self, z: list) -> mpmath.mpc:
        return _eval_sum(self.cleared, z)

    def gradient(self, z: list) -> list:
        return [_eval_sum(g, z) for g in self._grads]

    def residual(self, z: list) -> mpmath.mpf:
        return abs(_eval_mono(self.monomial, z) - 1)


class FillingEquation:
    """p log mu(m) + q log mu(l) = target, with branch continuity.

    `reference` holds the analytically-continued (u, v) at the last
    accepted point; principal logs are shifted by multiples of 2 pi i to
    stay nearest the reference.
    """

    def __init__(self, p: int, q: int, mu_m: SignedMonomial, mu_l: SignedMonomial, label: str = ""):
        self.p, self.q = p, q
        self.mu_m, self.mu_l = mu_m, mu_l
        self.label = label
        self.target = mp.mpc(0)
        self.reference = (mp.mpc(0), mp.mpc(0))

    def logs(self, z: list) -> tuple:
        u0, v0 = self.reference
        u = mp.log(_eval_mono(self.mu_m, z))
        v = mp.log(_eval_mono(self.mu_l, z))
        u += 2j * mp.pi * mp.nint((u0 - u).imag / (2 * mp.pi))
        v += 2j * mp.pi * mp.nint((v0 - v).imag / (2 * mp.pi))
        return u, v

    def value(self, z: list) -> mpmath.mpc:
        u, v = self.logs(z)
        return self.p * u + self.q * v - self.target

    def gradient(self, z: list) -> list:
        gu = _dlog_row(self.mu_m, z)
        gv = _dlog_row(self.mu_l, z)
        return [self.p * a + self.q * b for a, b in zip(gu, gv)]

    def residual(self, z: list) -> mpmath.mpf:
        return abs(self.value(z))

    def branch_offsets(self, z: list) -> tuple[int, int]:
        u, v = self.logs(z)
        ku = int(mp.nint((u - mp.log(_eval_mono(self.mu_m, z))).imag / (2 * mp.pi)))
        kv = int(mp.nint((v - mp.log(_eval_mono(self.mu_l, z))).imag / (2 * mp.pi)))
        return ku, kv


@dataclass(frozen=True)
class GluingSystem:
    """Edge equations plus per-cusp completeness dilations and filling data."""

    tri: IdealTriangulation
    equations: tuple[SignedMonomial, ...]
    completeness: tuple[tuple[SignedMonomial, SignedMonomial], ...]
    fillings: tuple[tuple[int, int] | None, ...]

    @staticmethod
    def from_triangulation(tri: IdealTriangulation, fillings=None) -> "GluingSystem":
        if fillings is None:
            fillings = [cusp.filling for cusp in tri.cusps]
        if len(fillings) != len(tri.cusps):
            raise ValueError("one filling entry per cusp required")
        cleaned = []
        for f in fillings:
            if f is None or f == "complete":
                cleaned.append(None)
            else:
                p, q = int(f[0]), int(f[1])
                if (p, q) == (0, 0) or gcd(p, q) != 1:
                    raise ValueError(f"filling coefficients must be coprime, got {(p, q)}")
                cleaned.append((p, q))
        completeness = tuple(
            (mu(tri, cusp.meridian), mu(tri, cusp.longitude)) for cusp in tri.cusps
        )
        return GluingSystem(
            tri=tri,
            equations=tuple(tri.edge_equations()),
            completeness=completeness,
            fillings=tuple(cleaned),
        )

    def equation_objects(self):
        eqs = [PolynomialEquation(m, label=f"edge:{e.label}")
               for m, e in zip(self.equations, self.tri.edges)]
        fill_eqs = []
        for cusp, (mu_m, mu_l), f in zip(self.tri.cusps, self.completeness, self.fillings):
            if f is None:
                eqs.append(PolynomialEquation(mu_m, label=f"complete:{cusp.name}.m"))
                eqs.append(PolynomialEquation(mu_l, label=f"complete:{cusp.name}.l"))
            else:
                fill_eqs.append(FillingEquation(f[0], f[1], mu_m, mu_l, label=f"fill:{cusp.name}"))
        return eqs, fill_eqs


@dataclass
class SolveResult:
    shapes: ShapeAssignment
    residual: mpmath.mpf
    geometric: bool
    iterations: int
    success: bool
    seed: int
    restarts_used: int = 0
    degenerate: bool = False
    branch_offsets: tuple = ()
    core_translations: tuple = ()
    notes: tuple[str, ...] = ()

    def to_jsonable(self) -> dict:
        digits = max(8, int(self.shapes.precision_bits * 0.3010) - 2)
        return {
            "shapes": [
                {"re": mp.nstr(z.real, digits), "im": mp.nstr(z.imag, digits)}
                for z in self.shapes.z
            ],
            "precision_bits": self.shapes.precision_bits,
            "residual": mp.nstr(self.residual, 8),
            "geometric": self.geometric,
            "iterations": self.iterations,
            "success": self.success,
            "seed": self.seed,
            "restarts_used": self.restarts_used,
            "degenerate": self.degenerate,
            "branch_offsets": [list(b) for b in self.branch_offsets],
            "core_translations": [
                {"re": mp.nstr(c.real, 8), "im": mp.nstr(c.imag, 8)}
                for c in self.core_translations
            ],
            "notes": list(self.notes),
        }


def _pinv_step(rows: list[list], vals: list, cutoff_exp: int) -> list:
    """Least-squares Newton step -J^+ F via SVD with a singular value cutoff."""
    m = len(rows)
    n = len(rows[0])
    # row equilibration for conditioning
    scaled = []
    rhs = []
    for row, v in zip(rows, vals):
        s = max(abs(x) for x in row)
        if s == 0:
            continue
        scaled.append([x / s for x in row])
        rhs.append(v / s)
    A = mp.matrix(scaled)
    F = mp.matrix(rhs)
    U, S, V = mp.svd_c(A)
    smax = max(S[i] for i in range(S.rows)) if S.rows else mp.mpf(0)
    if smax == 0:
        raise SolveError("zero Jacobian")
    cut = smax * mp.mpf(2) ** cutoff_exp
    UtF = U.H * F
    y = mp.matrix(V.cols, 1)
    for i in range(S.rows):
        if S[i] > cut:
            y[i] = UtF[i] / S[i]
    delta = V.H * y
    return [-delta[i] for i in range(n)]


def _residual(eqs, fill_eqs, z) -> mpmath.mpf:
    r = mp.mpf(0)
    for e in eqs:
        r = max(r, e.residual(z))
    for e in fill_eqs:
        r = max(r, e.residual(z))
    return r


def _newton(eqs, fill_eqs, z, precision_bits, max_iter=80):
    """Damped least-squares Newton; returns (z, iterations, residual)."""
    tol = mp.mpf(2) ** int(-0.92 * precision_bits)
    guard = mp.mpf("1e-9")
    best = _residual(eqs, fill_eqs, z)
    it = 0
    while it < max_iter and best > tol:
        it += 1
        rows = [e.gradient(z) for e in eqs] + [e.gradient(z) for e in fill_eqs]
        vals = [e.value(z) for e in eqs] + [e.value(z) for e in fill_eqs]
        try:
            delta = _pinv_step(rows, vals, cutoff_exp=-precision_bits // 3)
        except (ZeroDivisionError, SolveError):
            break
        lam = mp.mpf(1)
        improved = False
        for _ in range(12):
            z_try = [zi + lam * d for zi, d in zip(z, delta)]
            if any(abs(v) < guard or abs(1 - v) < guard for v in z_try):
                lam /= 2
                continue
            r_try = _residual(eqs, fill_eqs, z_try)
            if r_try < best:
                z, best = z_try, r_try
                improved = True
                break
            lam /= 2
        if not improved:
            break
    return z, it, best


def _initial_guesses(n, seed, restarts):
    rng = random.Random(seed)
    yield [mp.mpc(REGULAR_SHAPE) for _ in range(n)]
    for _ in range(restarts):
        yield [
            mp.mpc(REGULAR_SHAPE)
            + mp.mpc(rng.uniform(-0.8, 0.8), rng.uniform(-0.55, 0.9))
            for _ in range(n)
        ]


def _chain(first, rest):
    yield from first
    yield from rest


def _certify(eqs, fill_eqs, z, precision_bits):
    """Re-evaluate the multiplicative residual at doubled precision."""
    with mp.workprec(2 * precision_bits):
        z2 = [mp.mpc(v) for v in z]
        return _residual(eqs, fill_eqs, z2)


def solve_complete(tri: IdealTriangulation, precision_bits: int = 256,
                   seed: int = 0, restarts: int = 32,
                   initial: ShapeAssignment | None = None) -> SolveResult:
    """Find the complete structure: all edge equations and all peripheral
    dilations equal to 1.  Returns the first geometric solution found over
    the restart schedule; if only non-geometric solutions turn up, the best
    one is returned with geometric=False.

    `initial` (e.g. a lower-precision solution to polish) is tried before
    the regular-shape guess and its randomized perturbations.
    """
    return solve_filled(tri, ["complete"] * len(tri.cusps), precision_bits,
                        seed=seed, restarts=restarts, initial=initial)


def solve_filled(tri: IdealTriangulation, fillings, precision_bits: int = 256,
                 seed: int = 0, restarts: int = 32,
                 initial: ShapeAssignment | None = None) -> SolveResult:
    """Solve with per-cusp fillings ('complete'/None or coprime (p, q)).

    With every cusp complete this is exactly the complete-structure solve.
    Otherwise the complete structure seeds a continuation that ramps each
    filling target from 0 to 2 pi i while carrying log branches.
    """
    system = GluingSystem.from_triangulation(tri, fillings)
    with mp.workprec(precision_bits + 30):
        eqs, fill_eqs = system.equation_objects()
        success_tol = mp.mpf(2) ** (-precision_bits // 2)

        flat_tol = mp.mpf(2) ** (-precision_bits // 8)

        # stage 1: complete structure (filled rows at target 0 hold there)
        complete_eqs = [PolynomialEquation(m, label="seed") for pair in system.completeness for m in pair]
        base_eqs = [PolynomialEquation(m) for m in system.equations]
        best = None
        guesses = _initial_guesses(tri.n_tet, seed, restarts)
        if initial is not None:
            guesses = _chain([[mp.mpc(v) for v in initial.z]], guesses)
        for restart_index, guess in enumerate(guesses):
            z, it, res = _newton(base_eqs + complete_eqs, [], guess, precision_bits)
            if res < success_tol:
                geometric = all(v.imag > flat_tol for v in z)
                if best is None or (geometric and not best[3]):
                    best = (z, it, res, geometric, restart_index)
                if geometric:
                    break
        if best is None:
            raise SolveError(
                f"{tri.name!r}: complete-structure Newton did not converge "
                f"within {restarts} restarts"
            )
        z, iterations, res, geometric, restart_index = best
        notes = []
        if not geometric:
            notes.append("complete solution is non-geometric (some Im z <= 0)")

        if not fill_eqs:
            res2 = _certify(eqs, [], z, precision_bits)
            shapes = ShapeAssignment(tuple(mp.mpc(v) for v in z), precision_bits)
            return SolveResult(
                shapes=shapes, residual=res2, geometric=geometric,
                iterations=iterations, success=res2 < success_tol,
                seed=seed, restarts_used=restart_index, notes=tuple(notes),
            )

        # stage 2: ramp filled-cusp targets from the complete structure
        for fe in fill_eqs:
            fe.reference = fe.logs(z)
        t = mp.mpf(0)
        dt = mp.mpf(1) / 8
        total_iter = iterations
        while t < 1:
            t_next = min(mp.mpf(1), t + dt)
            for fe in fill_eqs:
                fe.target = 2j * mp.pi * t_next
            z_try, it, res = _newton(eqs, fill_eqs, z, precision_bits)
            jump = max(
                (max(abs((fe.logs(z_try)[0] - fe.reference[0]).imag),
                     abs((fe.logs(z_try)[1] - fe.reference[1]).imag))
                 for fe in fill_eqs),
                default=mp.mpf(0),
            )
            if res < success_tol and jump < 2.5:
                z = z_try
                t = t_next
                total_iter += it
                dt = min(dt * 2, mp.mpf(1) / 4)
                for fe in fill_eqs:
                    fe.reference = fe.logs(z)
            else:
                dt = dt / 2
                if dt < mp.mpf(2) ** -14:
                    raise SolveError(
                        f"{tri.name!r}: filling continuation stalled at t={mp.nstr(t, 6)} "
                        "(out of continuation range or degenerating filling)"
                    )

        res2 = _certify(eqs, fill_eqs, z, precision_bits)
        geometric = all(v.imag > flat_tol for v in z)
        offsets = tuple(fe.branch_offsets(z) for fe in fill_eqs)
        cores = []
        degenerate = False
        for fe in fill_eqs:
            r, s = _core_curve(fe.p, fe.q)
            u, v = fe.logs(z)
            core = r * u + s * v
            cores.append(core)
            if abs(core.real) < mp.mpf(2) ** (-precision_bits // 8):
                degenerate = True
                notes.append(
                    f"{fe.label}: core translation has zero length "
                    "(exceptional or non-hyperbolic filling)"
                )
        shapes = ShapeAssignment(tuple(mp.mpc(v) for v in z), precision_bits)
        if shapes.is_degenerate():
            degenerate = True
            notes.append("shapes degenerate (coordinate near 0 or 1)")
        if all(abs(v.imag) < flat_tol for v in z):
            degenerate = True
            notes.append("flat solution (all shapes real)")
        if not geometric:
            notes.append("filled solution is non-geometric (some Im z <= 0)")
        return SolveResult(
            shapes=shapes, residual=res2, geometric=geometric,
            iterations=total_iter, success=res2 < success_tol, seed=seed,
            restarts_used=restart_index, degenerate=degenerate,
            branch_offsets=offsets, core_translations=tuple(cores),
            notes=tuple(notes),
        )


def _core_curve(p: int, q: int) -> tuple[int, int]:
    """Integers (r, s) with p*s - q*r = 1: a curve dual to the filled slope."""
    # extended euclid on (p, q)
    old_r, r = p, q
    old_s, s = 1, 0
    old_t, t = 0, 1
    while r:
        k = old_r // r
        old_r, r = r, old_r - k * r
        old_s, s = s, old_s - k * s
        old_t, t = t, old_t - k * t
    # old_s*p + old_t*q = gcd = +-1
    g = old_s * p + old_t * q
    return (-old_t * g, old_s * g)


def completeness_system(tri: IdealTriangulation, cusp_index: int):
    """Cleared equations cutting the locus where one cusp stays complete:
    every edge equation plus mu(meridian) = 1 for the chosen cusp."""
    eqs = [PolynomialEquation(m, label=f"edge:{e.label}")
           for m, e in zip(tri.edge_equations(), tri.edges)]
    m_mu = mu(tri, tri.cusps[cusp_index].meridian)
    eqs.append(PolynomialEquation(m_mu, label=f"complete:{tri.cusps[cusp_index].name}.m"))
    return eqs


def system_jacobian(eqs, z: list):
    return [e.gradient(z) for e in eqs]


def numerical_kernel(rows: list[list], precision_bits: int, threshold_exp=None):
    """Kernel basis of a complex matrix by SVD at a relative threshold."""
    if threshold_exp is None:
        threshold_exp = -precision_bits // 4
    A = mp.matrix(rows)
    U, S, V = mp.svd_c(A)
    svals = [S[i] for i in range(S.rows)]
    smax = max(svals) if svals else mp.mpf(0)
    cut = smax * mp.mpf(2) ** threshold_exp if smax > 0 else mp.mpf(0)
    n = A.cols
    kernel = []
    rank = 0
    for i in range(len(svals)):
        if svals[i] > cut:
            rank += 1
    for i in range(rank, n):
        vec = [mp.conj(V[i, j]) for j in range(n)] if i < V.rows else None
        if vec is not None:
            kernel.append(vec)
    # ambiguous threshold: singular values from both sides too close to cut
    ambiguous = any(cut / 4 < sv < cut * 4 for sv in svals if sv > 0)
    return kernel, rank, svals, ambiguous


def trace_completeness_curve(tri: IdealTriangulation, complete_cusp: int,
                             n_points: int = 20, step: float = 1e-3,
                             precision_bits: int = 256, seed: int = 0,
                             start: SolveResult | None = None):
    """Predictor-corrector continuation along the curve of structures
    keeping one cusp complete, from the complete structure.

    Returns a list of (ShapeAssignment, cusp-parameter value) samples,
    the first being the complete structure itself.
    """
    from .holonomy import cusp_parameter, evaluate_cusp_parameter

    if start is None:
        start = solve_complete(tri, precision_bits, seed=seed)
    if not start.success:
        raise SolveError("complete solve failed; cannot trace")
    with mp.workprec(precision_bits + 30):
        eqs = completeness_system(tri, complete_cusp)
        pair = cusp_parameter(tri, tri.cusps[complete_cusp])
        z = list(start.shapes.z)
        kernel, rank, svals, ambiguous = numerical_kernel(
            system_jacobian(eqs, z), precision_bits)
        if len(kernel) != 1:
            raise SolveError(
                f"completeness-curve kernel has dimension {len(kernel)}, "
                "expected 1 (is this a two-cusped manifold?)"
            )
        tangent = kernel[0]
        norm = mp.sqrt(sum(abs(c) ** 2 for c in tangent))
        tangent = [c / norm for c in tangent]
        samples = []
        shapes0 = ShapeAssignment(tuple(z), precision_bits)
        samples.append((shapes0, evaluate_cusp_parameter(pair, shapes0)))
        h = mp.mpf(step)
        floor = mp.mpf(1e-8)
        success_tol = mp.mpf(2) ** (-precision_bits // 2)
        for _ in range(n_points):
            while True:
                z_pred = [zi + h * ti for zi, ti in zip(z, tangent)]
                pin = max(range(len(tangent)), key=lambda i: abs(tangent[i]))
                z_corr, ok = _corrector(eqs, z_pred, pin, precision_bits)
                if ok and _residual(eqs, [], z_corr) < success_tol:
                    break
                h = h / 2
                if h < floor:
                    raise SolveError("corrector diverged even at the minimum step")
            z = z_corr
            kernel, rank, svals, ambiguous = numerical_kernel(
                system_jacobian(eqs, z), precision_bits)
            if len(kernel) != 1:
                raise SolveError("kernel dimension changed along the curve")
            new_t = kernel[0]
            norm = mp.sqrt(sum(abs(c) ** 2 for c in new_t))
            new_t = [c / norm for c in new_t]
            dot = sum(a * mp.conj(b) for a, b in zip(new_t, tangent))
            if dot.real < 0:
                new_t = [-c for c in new_t]
            tangent = new_t
            shapes = ShapeAssignment(tuple(z), precision_bits)
            if shapes.is_degenerate() or not shapes.is_geometric():
                raise SolveError("continuation left the geometric region")
            samples.append((shapes, evaluate_cusp_parameter(pair, shapes)))
        return samples


def _corrector(eqs, z, pin: int, precision_bits: int, max_iter=40):
    """Newton correction with one coordinate pinned."""
    tol = mp.mpf(2) ** int(-0.92 * precision_bits)
    z = list(z)
    free = [i for i in range(len(z)) if i != pin]
    for it in range(max_iter):
        vals = [e.value(z) for e in eqs]
        if max(abs(v) for v in vals) < tol and _residual(eqs, [], z) < tol:
            return z, True
        rows_full = [e.gradient(z) for e in eqs]
        rows = [[row[i] for i in free] for row in rows_full]
        try:
            delta = _pinv_step(rows, vals, cutoff_exp=-precision_bits // 3)
        except (ZeroDivisionError, SolveError):
            return z, False
        for idx, i in enumerate(free):
            z[i] += delta[idx]
        if max(abs(d) for d in delta) < mp.mpf(2) ** (-precision_bits):
            break
    return z, _residual(eqs, [], z) < mp.mpf(2) ** (-precision_bits // 2)
