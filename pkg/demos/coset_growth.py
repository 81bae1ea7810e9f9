"""Packing and coset growth of <t> in the mapping torus Z^2 x| Z of the cat map."""

from ggtlab import groups as gr, packing as pk

G = gr.parse_group("poly:2:2,1;1,1")
T = [G.parse_element("t")]

for R in (6, 8):
    prof = pk.packing_profile(G, T, [2, 3], R)
    print(f"R={R}:", {r: n for r, _, n, _, _ in prof.rows()})

s = pk.coset_growth(G, T, 9, fit_window=(3, 9))
print("f(r):", s.table)
print(f"exponential fit: alpha={s.fit.alpha:.4f}, R^2={s.fit.r_squared:.4f}")

X = [G.parse_element("z=(1,0);k=0"), G.parse_element("z=(0,1);k=0")]
c = pk.coset_growth(G, X, 9, fit_window=(3, 9))
print("control Z^2, f(r):", c.table)
print(f"  plain alpha={c.fit.alpha:.4f}, after power-law correction {c.fit.alpha_corrected:.4f}")
