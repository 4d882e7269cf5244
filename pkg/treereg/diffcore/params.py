from collections.abc import Iterable, Mapping
from dataclasses import dataclass

import numpy as np

from ..errors import ShapeError
from .graph import Matrix, Node, constant, parameter


@dataclass
class ParamVector:
    """Flat view of named parameter matrices; segment order defines the flat layout."""

    segments: list[tuple[str, tuple[int, int]]]
    values: np.ndarray

    def __post_init__(self):
        self.values = np.asarray(self.values, dtype=np.float64).ravel()
        expected = sum(rows * cols for _, (rows, cols) in self.segments)
        if self.values.size != expected:
            raise ShapeError("ParamVector", (self.values.size,), (expected,))

    @classmethod
    def from_arrays(cls, arrays: Mapping[str, np.ndarray]) -> "ParamVector":
        segments = []
        chunks = []
        for name, array in arrays.items():
            matrix = np.asarray(array, dtype=np.float64)
            if matrix.ndim == 1:
                matrix = matrix.reshape(1, -1)
            segments.append((name, (matrix.shape[0], matrix.shape[1])))
            chunks.append(matrix.ravel())
        values = np.concatenate(chunks) if chunks else np.zeros(0)
        return cls(segments, values)

    @property
    def size(self) -> int:
        return int(self.values.size)

    @property
    def names(self) -> list[str]:
        return [name for name, _ in self.segments]

    def _bounds(self) -> dict[str, tuple[int, int, tuple[int, int]]]:
        bounds = {}
        offset = 0
        for name, shape in self.segments:
            stop = offset + shape[0] * shape[1]
            bounds[name] = (offset, stop, shape)
            offset = stop
        return bounds

    def unflatten(self, values: np.ndarray | None = None) -> dict[str, Matrix]:
        flat = self.values if values is None else np.asarray(values, dtype=np.float64).ravel()
        if flat.size != self.size:
            raise ShapeError("unflatten", (flat.size,), (self.size,))
        return {name: flat[lo:hi].reshape(shape) for name, (lo, hi, shape) in self._bounds().items()}

    def flatten(self, arrays: Mapping[str, np.ndarray]) -> np.ndarray:
        parts = []
        for name, shape in self.segments:
            array = np.asarray(arrays[name], dtype=np.float64)
            if array.size != shape[0] * shape[1]:
                raise ShapeError(f"flatten[{name}]", array.shape, shape)
            parts.append(array.ravel())
        return np.concatenate(parts) if parts else np.zeros(0)

    def leaves(self) -> dict[str, Node]:
        return {name: parameter(array, name=name) for name, array in self.unflatten().items()}

    def constants(self) -> dict[str, Node]:
        return {name: constant(array) for name, array in self.unflatten().items()}

    def gather_grads(self, leaves: Mapping[str, Node]) -> np.ndarray:
        arrays = {}
        for name, shape in self.segments:
            grad = leaves[name].grad
            arrays[name] = np.zeros(shape) if grad is None else grad
        return self.flatten(arrays)

    def subset(self, names: Iterable[str]) -> "ParamVector":
        wanted = list(names)
        arrays = self.unflatten()
        return ParamVector.from_arrays({name: arrays[name] for name in wanted})

    def replace(self, part: "ParamVector") -> "ParamVector":
        arrays = {name: array.copy() for name, array in self.unflatten().items()}
        for name, array in part.unflatten().items():
            if arrays[name].shape != array.shape:
                raise ShapeError(f"replace[{name}]", array.shape, arrays[name].shape)
            arrays[name] = array
        return ParamVector(list(self.segments), self.flatten(arrays))

    def copy(self) -> "ParamVector":
        return ParamVector(list(self.segments), self.values.copy())
