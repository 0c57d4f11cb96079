"""Column embedding of coefficients versus the Fourier transform of e_n.

The step function built from the n-th column at scale x approaches the
Fourier transform of the basis vector; the printed L2 distance shrinks.
"""
from sl2coeffs import ReprParams, basis_ft_closed, column_step_fn

CHI = ReprParams(complex(-0.5, 1.0), 0.0)

if __name__ == "__main__":
    for x in (3.0, 10.0, 30.0):
        s = column_step_fn(CHI, 0, x, (-int(40 * x), int(40 * x)))
        d = s.l2_distance(lambda y: basis_ft_closed(CHI, 0.0, y))
        print(f"x = {x:5.1f}  cells = {len(s.cells):5d}  L2 distance = {d:.4f}")
