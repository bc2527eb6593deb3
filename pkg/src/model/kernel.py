"""
Sampled integration kernels, their spectral derivatives and the discrete
convolution K * f on a box grid.
"""
from typing import Iterable

import numpy as np
import scipy.fft

from src.model.grid import Grid
from src.trees.multi_index import MultiIndex
from src.utils.errors import StencilExceeded, UnknownLabel
from src.utils.logger import get_logger


def time_cutoff(t: np.ndarray, horizon: float) -> np.ndarray:
    """Smooth bump supported in (0, horizon) with maximum 1."""
    u = np.asarray(t, dtype=float) / horizon
    out = np.zeros_like(u)
    inside = (u > 0) & (u < 1)
    ui = u[inside]
    out[inside] = np.exp(4.0 - 1.0 / ui - 1.0 / (1.0 - ui))
    return out


def heat_kernel_samples(grid: Grid, horizon: float = 0.25, epsilon: float = 0.01) -> np.ndarray:
    """Heat kernel regularised by epsilon at t = 0, cut off smoothly in time, on the offset grid."""
    mesh = grid.offset_mesh()
    t = mesh[0]
    r2 = sum(x ** 2 for x in mesh[1:]) if grid.dim > 1 else np.zeros_like(t)
    s = np.maximum(t, 0.0) + epsilon
    gauss = np.exp(-r2 / (4 * s)) / (4 * np.pi * s) ** ((grid.dim - 1) / 2)
    return time_cutoff(t, horizon) * gauss


class KernelSpec:
    """Kernels K_t per kernel label, with derivatives D^m K_t up to total order max_order."""

    def __init__(self, grid: Grid, samples: dict[str, np.ndarray], max_order: int = 4):
        expected = tuple(2 * n - 1 for n in grid.shape)
        for label, values in samples.items():
            if values.shape != expected:
                raise ValueError(f"kernel {label} has shape {values.shape}, expected {expected}")
        self.grid = grid
        self.samples = samples
        self.max_order = max_order
        self._derivatives: dict[tuple[str, MultiIndex], np.ndarray] = {}
        self._spectra: dict[tuple[str, MultiIndex], np.ndarray] = {}
        self._fast_shape = tuple(scipy.fft.next_fast_len(3 * n - 2, real=True) for n in grid.shape)
        self.log = get_logger("KernelSpec")

    @classmethod
    def heat(cls, grid: Grid, labels: Iterable[str], max_order: int = 4, horizon: float = 0.25,
             epsilon: float = 0.01) -> "KernelSpec":
        samples = heat_kernel_samples(grid, horizon, epsilon)
        return cls(grid, {label: samples for label in labels}, max_order)

    def _frequencies(self, axis: int) -> np.ndarray:
        n = 2 * self.grid.shape[axis] - 1
        shape = [1] * self.grid.dim
        shape[axis] = n
        return (2 * np.pi * scipy.fft.fftfreq(n, d=self.grid.spacing[axis])).reshape(shape)

    def derivative(self, label: str, m: MultiIndex) -> np.ndarray:
        if label not in self.samples:
            raise UnknownLabel(f"no kernel sampled for {label!r}")
        if len(m) != self.grid.dim:
            raise ValueError(f"derivative {m} on a {self.grid.dim}-dimensional grid")
        if sum(m) > self.max_order:
            raise StencilExceeded(f"D^{m} K_{label} exceeds the derivative order {self.max_order}")
        key = (label, tuple(m))
        if key not in self._derivatives:
            if not any(m):
                self._derivatives[key] = self.samples[label]
            else:
                spectrum = scipy.fft.fftn(self.samples[label])
                for axis, k in enumerate(m):
                    if k:
                        spectrum = spectrum * (1j * self._frequencies(axis)) ** k
                self._derivatives[key] = scipy.fft.ifftn(spectrum).real
        return self._derivatives[key]

    def convolve(self, label: str, m: MultiIndex, values: np.ndarray) -> np.ndarray:
        """(D^m K_label * values)(x) = sum_y D^m K(x - y) values(y) dy, values zero outside the box."""
        key = (label, tuple(m))
        if key not in self._spectra:
            self._spectra[key] = scipy.fft.rfftn(self.derivative(label, m), self._fast_shape)
        full = scipy.fft.irfftn(scipy.fft.rfftn(values, self._fast_shape) * self._spectra[key], self._fast_shape)
        window = tuple(slice(n - 1, 2 * n - 1) for n in self.grid.shape)
        return full[window] * self.grid.cell_volume

    def derivative_consistency(self, label: str, axis: int) -> float:
        """Relative gap between the centred difference of K and the stored first derivative, interior points."""
        step = [0] * self.grid.dim
        step[axis] = 1
        spectral = self.derivative(label, tuple(step))
        fd = np.gradient(self.samples[label], self.grid.spacing[axis], axis=axis)
        interior = tuple(slice(2, -2) for _ in range(self.grid.dim))
        scale = float(np.max(np.abs(spectral))) or 1.0
        return float(np.max(np.abs(fd[interior] - spectral[interior]))) / scale
