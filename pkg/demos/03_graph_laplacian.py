"""
A graph Laplacian weighted by an image
======================================

Each pixel is a node. Pixels within a small square neighborhood are joined
with weight exp(-(difference)^2 / sigma), so edges across an intensity jump
are almost cut. The Laplacian of that graph nearly annihilates the image
that built it.
"""

import numpy as np

from graphdeblur import GraphConfig, build_adjacency, build_laplacian, phantom, tv_matrix

x = phantom(64)
cfg = GraphConfig(R=3, sigma=1e-2)
omega = build_adjacency(x, cfg)
L = build_laplacian(omega)

print("nodes: %d, stored weights: %d" % (omega.shape[0], omega.nnz))
print("max neighbors per pixel:", np.diff(omega.indptr).max(), "of", (2 * cfg.R + 1) ** 2 - 1)
print("max |row sum| of L: %.1e" % np.abs(np.asarray(L.sum(axis=1))).max())

# compare the l1 response of the graph operator with plain differences
graph_l1 = np.abs(L @ x.ravel()).sum()
tv_l1 = np.abs(tv_matrix(64) @ x.ravel()).sum()
print("||L x||_1 = %.3e, ||D x||_1 = %.3e, ratio %.1e" % (graph_l1, tv_l1, graph_l1 / tv_l1))

# a smooth ramp is not annihilated: its neighbors differ slightly
ramp = np.tile(np.linspace(0, 1, 64), (64, 1))
print("ramp response ||L r||_1 = %.3e" % np.abs(build_laplacian(build_adjacency(ramp, cfg)) @ ramp.ravel()).sum())
