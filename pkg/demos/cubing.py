"""Sageev cubings for Z with the trivial subgroup and for Z^2 with two line families."""

from ggtlab import cubing as cb, groups as gr

S = cb.sigma_system(gr.FreeAbelian(1), [], 0, 10)
cx = cb.build_cubing(S)
print(f"line: {len(cx.vertices)} vertices, {len(cx.edges)} edges, dimension {cx.dimension}")

S = cb.sigma_system(gr.FreeAbelian(2), ["1,0"], 0, 6, extra=[["0,1"]])
cx = cb.build_cubing(S)
w = cb.width_estimate(S)
print(f"grid: {len(cx.vertices)} vertices, {len(cx.edges)} edges, "
      f"{len(cx.cubes.get(2, []))} squares, dimension {cx.dimension}, width {w.width}")
sides = [cb.hyperplane_components(cx, p) for p in range(len(S.pairs))]
print("interior hyperplane component counts:",
      sorted({h.components for h in sides if not h.boundary}))
print(cb.separation_to_nestedness_check(S))

with open("grid.dot", "w") as fh:
    fh.write(cx.to_dot())
