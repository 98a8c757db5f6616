"""
waveletls: wavelet least-squares estimation of additive regression models.
"""

__version__ = "0.1.0"
