"""
Smooth noise samples on a grid. The label 0 is the constant 1.
"""
from typing import Iterable

import numpy as np
from scipy.ndimage import gaussian_filter

from src.model.grid import Grid
from src.trees.decorated import ZERO_NOISE
from src.utils.errors import UnknownLabel


def smooth_noise(grid: Grid, rng: np.random.Generator, correlation: float = 0.1) -> np.ndarray:
    """White noise mollified by a Gaussian of width `correlation`, normalised to unit variance."""
    white = rng.standard_normal(grid.shape)
    sigma = [correlation / h for h in grid.spacing]
    field = gaussian_filter(white, sigma=sigma, mode="wrap")
    std = float(field.std())
    return field / std if std > 0 else field


class NoiseSpec:
    def __init__(self, grid: Grid, samples: dict[str, np.ndarray]):
        for label, values in samples.items():
            if values.shape != grid.shape:
                raise ValueError(f"noise {label} has shape {values.shape}, grid is {grid.shape}")
        self.grid = grid
        self.samples = {label: values for label, values in samples.items() if label != ZERO_NOISE}
        self._one = np.ones(grid.shape)

    @classmethod
    def generate(cls, grid: Grid, labels: Iterable[str], seed: int, correlation: float = 0.1) -> "NoiseSpec":
        rng = np.random.default_rng(seed)
        return cls(grid, {label: smooth_noise(grid, rng, correlation)
                          for label in sorted(labels) if label != ZERO_NOISE})

    def __call__(self, label: str | None) -> np.ndarray:
        if label in (None, ZERO_NOISE):
            return self._one
        if label not in self.samples:
            raise UnknownLabel(f"no noise sampled for {label!r}")
        return self.samples[label]
