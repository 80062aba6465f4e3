"""Sampled paths with a continuous argument."""
from dataclasses import dataclass

import numpy as np


@dataclass(frozen=True, eq=False)
class PathSample:
    """Points along a directed path, f at those points and a continuous arg f."""

    points: np.ndarray
    values: np.ndarray
    unwrapped_arg: np.ndarray

    @property
    def total_change(self) -> float:
        """Total continuous change of arg f along the path."""
        return float(self.unwrapped_arg[-1] - self.unwrapped_arg[0])

    @property
    def max_step(self) -> float:
        """Largest argument step between consecutive samples."""
        if len(self.unwrapped_arg) < 2:
            return 0.0
        return float(np.max(np.abs(np.diff(self.unwrapped_arg))))

    def __len__(self) -> int:
        return len(self.points)
