"""From-scratch PCA, K-Means and Davies-Bouldin toolkit for country-level diet data."""

__version__ = "0.1.0"
