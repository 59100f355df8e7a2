"""ring-chord - chord augmentation of weighted cycles: resistance, spectral gain and screening."""

__version__ = "0.1.0"
