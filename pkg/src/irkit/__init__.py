"""irkit: binary interpretable representations and surrogate explainers.

Builds, manipulates and evaluates presence/absence encodings of tabular,
image and text data; fits linear and tree surrogates on top of them; and
ships the evaluation harnesses (occlusion sweep, tree-vs-quartile purity
benchmark, OLS sensitivity report) as reproducible pipelines.
"""

__version__ = "0.1.0"

from irkit.kernels import BACKEND  # noqa: F401  (which kernel backend is active)
