"""Orbit hulls in F_2 x Z: the free factor against the skewed subgroup <a, bt>."""

from ggtlab import groups as gr, subgroup_hull as sh

FZ = gr.FreeTimesAbelian(2, 1)
for name, H in (("<a, b>", ["a|0", "b|0"]), ("<a, bt>", ["a|0", "b|1"])):
    rep = sh.quasiconvexity_estimate(FZ, H, [2, 4, 6])
    print(name, {R: round(v, 4) for R, v in rep.table.items()})

FZ2 = gr.FreeTimesAbelian(2, 2)
H = ["a|1,0", "b|0,0", "e|2,0"]
region = sh.orbit_hull(FZ2, H, R=4)
print("hull lattice V:", region.V, "subtree edges:", len(region.subtree.edge_list()))
print("c_hat(4):", round(sh.cocompactness_radius(FZ2, H, 4, samples=500).c_hat, 4))
v = sh.virtual_product_decomposition(FZ2, H, 5)
print("A:", v.A, "F:", v.F, "index of A.F:", v.index, "stable:", v.stable)
