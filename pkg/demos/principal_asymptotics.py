"""Compare a principal-series coefficient with its Whittaker approximant.

Prints the scaled residual sqrt(x) m^2 |P - approx| along a few rows; the
column should stay bounded as m and x grow.
"""
import math

from sl2coeffs import approx_principal
from sl2coeffs.coeffs import frak_p_value

ELL = complex(-0.5, 1.0)
N = 0.0

if __name__ == "__main__":
    print(f"{'x':>8} {'m':>6} {'|P|':>12} {'scaled residual':>16}")
    for x in (5.0, 20.0, 80.0):
        for m in (5.0, 20.0, 80.0):
            p = frak_p_value(ELL, m, N, int(m - N), x).value
            a = approx_principal(ELL, m, N, x)
            print(f"{x:8.1f} {m:6.1f} {abs(p):12.4e} {abs(p - a) * math.sqrt(x) * m**2:16.4f}")
