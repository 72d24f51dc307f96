"""The two Gaussian identities every receiver message is built from.

Products fuse two beliefs about the same variable; affine propagation pushes
a belief through a linear map plus noise.  A quick numerical-integration
cross-check shows the closed forms are exact.
"""

import numpy as np

from statelink import GaussianBelief, affine_propagate, gaussian_product

# Fusing two opinions about a scalar: equal variances meet in the middle,
# and the fused variance halves.
a = GaussianBelief([0.0], [[1.0]])
b = GaussianBelief([2.0], [[1.0]])
fused = gaussian_product(a, b)
print(f"N(0,1) * N(2,1) -> N({fused.mean[0]:.3f}, {fused.cov[0, 0]:.3f})")

# Propagation through y = 2x + noise.
g = GaussianBelief([1.0], [[1.0]])
out = affine_propagate(g, [[2.0]], [[1.0]])
print(f"x ~ N(1,1), y = 2x + N(0,1) -> y ~ N({out.mean[0]:.3f}, {out.cov[0, 0]:.3f})")
print()

# 2-D cross-check against brute-force grid integration of the product density.
rng = np.random.default_rng(7)
m1, m2 = rng.normal(size=2), rng.normal(size=2)
c1 = np.array([[1.0, 0.4], [0.4, 0.9]])
c2 = np.array([[0.7, -0.2], [-0.2, 1.3]])
fused = gaussian_product(GaussianBelief(m1, c1), GaussianBelief(m2, c2))

xs = np.linspace(-8, 8, 501)
X, Y = np.meshgrid(xs, xs, indexing="ij")
pts = np.stack([X.ravel(), Y.ravel()], axis=1)


def density(m, c):
    d = pts - m
    sol = np.linalg.solve(c, d.T).T
    return np.exp(-0.5 * np.sum(d * sol, axis=1))


w = density(m1, c1) * density(m2, c2)
w /= w.sum()
grid_mean = pts.T @ w
print("2-D product mean, closed form vs grid integration:")
print("  closed form:", np.round(fused.mean, 6))
print("  grid       :", np.round(grid_mean, 6))
print(f"  max deviation: {np.max(np.abs(fused.mean - grid_mean)):.2e}")
