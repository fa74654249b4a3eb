"""Distance distributions in Poisson-Voronoi tessellations."""

from .zerocell import ModelParams, contact_cdf, contact_pdf, contact_quantile, zerocell_moment

__version__ = "0.1.0"

__all__ = [
    "ModelParams",
    "contact_cdf",
    "contact_pdf",
    "contact_quantile",
    "zerocell_moment",
    "__version__",
]
