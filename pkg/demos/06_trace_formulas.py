"""The character-variety route to the same cusp parameter.

Five trace functions evaluate the cusp parameter without any
triangulation: C = (2 I_{lm'} - I_l I_{m'}) / (2 I_{mm'} - I_m I_{m'}).
For the Whitehead family the trace coordinates collapse to functions of
one trace t = I_ab on the filling curve, where C = t^2 + 1.

Composing with the map from the shape curve, C and the shape-side
parameter 4x/(1-x^2) - 2 agree up to an additive integer: an honest
change of homology basis.  The measured constant here is 3.
"""
from mpmath import mp

from cuspforge.tracecalc import (
    MatrixRep,
    cusp_parameter_from_traces,
    traces_from_matrices,
    whitehead_cusp_parameter,
    whitehead_curve_residual,
    whitehead_theta,
    whitehead_trace_tuple,
)

mp.prec = 280

# normal-form sanity: for triangular peripheral matrices the formula just
# reads off the translation ratio
tau = mp.mpc("0.8", "1.9")
rep = MatrixRep(((1, 1), (0, 1)), ((1, tau), (0, 1)), ((0, -1), (1, 0)))
print("matrix normal form returns tau:",
      mp.nstr(cusp_parameter_from_traces(traces_from_matrices(rep)), 8))

# along the filling curve
t = mp.mpc("1.3", "-0.4")
C = cusp_parameter_from_traces(whitehead_trace_tuple(t))
print("C(t) - (t^2 + 1) =", mp.nstr(abs(C - (t * t + 1)), 3))

# the shape-to-character map lands on the curve and reconciles with the
# deformation-variety parameter up to the integer 3
for x in (mp.mpc("0.4", "0.9"), mp.mpc("-1.2", "0.3"), mp.mpc(0, 1)):
    Ia, Ib, Iab = whitehead_theta(x)
    on_curve = whitehead_curve_residual(Ib, Iab)
    C = whitehead_cusp_parameter(x)
    shape_side = 4 * x / (1 - x ** 2) - 2
    print(f"x = {mp.nstr(x, 4)}: curve residual {mp.nstr(on_curve, 2)}, "
          f"C - tau_c1 = {mp.nstr(C - shape_side, 8)}")
