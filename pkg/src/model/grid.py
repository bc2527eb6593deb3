"""
Box grids over space-time and CSV storage of sampled fields.

Axis 0 is time. Coordinates are centred: index j on an axis with n points
sits at (j - (n - 1) / 2) * spacing.
"""
from dataclasses import dataclass
from pathlib import Path
from typing import Sequence

import numpy as np

from src.utils.errors import SpecError

GridIndex = tuple[int, ...]


@dataclass(frozen=True)
class Grid:
    shape: tuple[int, ...]
    spacing: tuple[float, ...]

    def __post_init__(self):
        object.__setattr__(self, "shape", tuple(int(n) for n in self.shape))
        object.__setattr__(self, "spacing", tuple(float(h) for h in self.spacing))
        if len(self.shape) != len(self.spacing):
            raise SpecError("grid shape and spacing differ in length")
        if any(n < 2 for n in self.shape) or any(h <= 0 for h in self.spacing):
            raise SpecError(f"degenerate grid {self.shape} / {self.spacing}")

    @classmethod
    def uniform(cls, dim: int, points: int, spacing: float) -> "Grid":
        return cls((points,) * dim, (spacing,) * dim)

    @property
    def dim(self) -> int:
        return len(self.shape)

    @property
    def cell_volume(self) -> float:
        return float(np.prod(self.spacing))

    def axis(self, i: int) -> np.ndarray:
        n = self.shape[i]
        return (np.arange(n) - (n - 1) / 2) * self.spacing[i]

    def offsets(self, i: int) -> np.ndarray:
        """Differences x - y between grid points along axis i, from -(n-1)h to (n-1)h."""
        n = self.shape[i]
        return np.arange(-(n - 1), n) * self.spacing[i]

    def mesh(self) -> list[np.ndarray]:
        return np.meshgrid(*(self.axis(i) for i in range(self.dim)), indexing="ij")

    def offset_mesh(self) -> list[np.ndarray]:
        return np.meshgrid(*(self.offsets(i) for i in range(self.dim)), indexing="ij")

    def point(self, index: GridIndex) -> np.ndarray:
        self.check_index(index)
        return np.array([self.axis(i)[j] for i, j in enumerate(index)])

    def check_index(self, index: GridIndex):
        if len(index) != self.dim or any(not 0 <= j < n for j, n in zip(index, self.shape)):
            raise IndexError(f"{index} is not a node of a grid of shape {self.shape}")

    def center(self) -> GridIndex:
        return tuple(n // 2 for n in self.shape)

    def header(self) -> str:
        shape = ",".join(str(n) for n in self.shape)
        spacing = ",".join(repr(h) for h in self.spacing)
        return f"shape={shape}; spacing={spacing}"

    @classmethod
    def from_header(cls, line: str) -> "Grid":
        fields = {}
        for part in line.lstrip("#").split(";"):
            if "=" in part:
                key, value = part.split("=", 1)
                fields[key.strip()] = [v for v in value.split(",") if v.strip()]
        try:
            return cls(tuple(int(v) for v in fields["shape"]), tuple(float(v) for v in fields["spacing"]))
        except (KeyError, ValueError) as e:
            raise SpecError(f"bad grid header {line.strip()!r}") from e


def save_field(path: str | Path, values: np.ndarray, grid: Grid):
    """Write samples as CSV rows of the last axis under a `# shape=...; spacing=...` header."""
    if values.shape != grid.shape:
        raise ValueError(f"field of shape {values.shape} on a grid of shape {grid.shape}")
    Path(path).parent.mkdir(parents=True, exist_ok=True)
    np.savetxt(path, values.reshape(-1, grid.shape[-1]), delimiter=",", header=grid.header(), fmt="%.17g")


def load_field(path: str | Path) -> tuple[np.ndarray, Grid]:
    path = Path(path)
    if not path.exists():
        raise SpecError(f"field file not found: {path}")
    with path.open() as f:
        grid = Grid.from_header(f.readline())
    values = np.loadtxt(path, delimiter=",", comments="#", ndmin=2)
    if values.size != int(np.prod(grid.shape)):
        raise SpecError(f"{path} holds {values.size} samples, header says {grid.shape}")
    return values.reshape(grid.shape), grid


def scaled_distance(delta: Sequence[float], scaling: Sequence[float]) -> float:
    """|x|_s = max_i |x_i|^(1/s_i)."""
    return max(abs(x) ** (1 / float(s)) for x, s in zip(delta, scaling))
