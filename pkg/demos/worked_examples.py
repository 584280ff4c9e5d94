"""Walk through the small hand-checkable examples.

Run with ``python3 demos/worked_examples.py``.  Every number printed here is
computed with exact rationals; nothing is rounded.
"""
from tropicount import fixtures as fx
from tropicount import geometry as geo
from tropicount.counting import boundary_geometry_2d, count_affine_pieces, count_boundary_pieces
from tropicount.oracle import oracle_counts
from tropicount.tropical import dcpa_extract, dcpa_layers


def show(name, s):
    print(f"  {name} = {{{', '.join('(' + ', '.join(str(c) for c in p) + ')' for p in s)}}}")


# max of five affine functions of one variable: only the hull vertices matter
five = geo.PointSet(fx.FIVE_FUNCTIONS)
print("five lines, upper hull vertices:")
show("U*", geo.upper_hull_vertices(five))

# two difference-of-max functions with known counts
for label, ex in (("1D", fx.DCPA_1D), ("2D", fx.DCPA_2D)):
    f = fx.dcpa(ex)
    rep = count_boundary_pieces(f)
    print(f"{label} example: #Boundary = {rep.boundary_piece_count}, #Total = {count_affine_pieces(f)}")

print("2D boundary pieces (base point, direction, parameter range):")
for seg in boundary_geometry_2d(fx.dcpa(fx.DCPA_2D)):
    print(f"  {tuple(map(str, seg.base))} + t {tuple(map(str, seg.direction))}, t in [{seg.t_min}, {seg.t_max}]")

# the small two-layer network, layer by layer
net = fx.two_layer_network()
for k, state in enumerate(dcpa_layers(net)[1:], 1):
    print(f"layer {k}:")
    for i, (p, n) in enumerate(zip(state.P, state.N)):
        show(f"P{k}[{i}]", p)
        show(f"N{k}[{i}]", n)

f = dcpa_extract(net)
rep = count_boundary_pieces(f)
print(f"network: #Boundary = {rep.boundary_piece_count}, #Total = {count_affine_pieces(f)}, "
      f"degenerate flat cells = {rep.degenerate_flat_cells}")
# the output ReLU flattens part of the plane to exactly zero, so the oracle
# sees more activation regions than distinct linear pieces
print("oracle (boundary, activation regions):", oracle_counts(net))
print("oracle (boundary, merged linear regions):", oracle_counts(net, merge=True))
