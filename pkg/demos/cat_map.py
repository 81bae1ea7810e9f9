"""Spectrum, splitting and orbit packing for the cat map [[2,1],[1,1]]."""

from ggtlab import dynamics as dy

M = dy.IntAutomorphism([[2, 1], [1, 1]])
sp = dy.spectrum(M)
for r in sp.roots:
    print(f"eigenvalue {r.value.real:+.6f}  (error radius {float(r.radius):.1e})")
print("hyperbolic:", dy.is_hyperbolic(M))
print("splitting dims (minus, plus, zero):", dy.spectral_splitting(M).dims())

norm = dy.adapted_norm(M, 0.1)
print(f"adapted norm: ||M|| <= {norm.certified_bound:.6f} against rho = {norm.spectral_radius:.6f}")

res = dy.orbit_intersection_count((1, 0), (0, 1), (1, 1), M, 30)
print("orbit intersections (i, j):", res.pairs)

for D in (1, 2, 5):
    w = dy.certified_window(M, D)
    print(f"D={D}: packing bound {dy.packing_bound_estimate(D, M)}, certified window {w.window}")
