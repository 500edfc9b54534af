"""
PCA by Jacobi rotations
=======================

Fit on correlated data and keep 95% of the variance.
"""

import numpy as np

from admitnet.pca import fit_pca, project, reconstruct

rng = np.random.default_rng(0)
latent = rng.normal(size=(500, 3))
x = latent @ rng.normal(size=(3, 12)) + 0.05 * rng.normal(size=(500, 12))

model = fit_pca(x, 0.95)
print("components kept:", model.n_components)
print("explained variance ratio:", model.explained_variance_ratio.round(4))

# rows of the component matrix are orthonormal
print("max |C C^T - I| =", np.abs(model.components @ model.components.T - np.eye(model.n_components)).max())

z = project(model, x)
print("reconstruction rmse:", np.sqrt(((reconstruct(model, z) - x) ** 2).mean()))
