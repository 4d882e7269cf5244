class TreeRegError(Exception):
    """Base class for every error raised by treereg."""


class ShapeError(TreeRegError):
    def __init__(self, op: str, *shapes: tuple[int, ...]):
        self.op = op
        self.shapes = shapes
        rendered = ", ".join("x".join(str(d) for d in s) for s in shapes)
        super().__init__(f"{op}: incompatible operand shapes ({rendered})")


class GraphError(TreeRegError):
    pass


class ModelError(TreeRegError):
    pass


class DataError(TreeRegError):
    def __init__(self, message: str, row: int | None = None, column: str | None = None):
        self.row = row
        self.column = column
        where = []
        if row is not None:
            where.append(f"row {row}")
        if column is not None:
            where.append(f"column '{column}'")
        suffix = f" ({', '.join(where)})" if where else ""
        super().__init__(f"{message}{suffix}")


class RegionError(TreeRegError):
    def __init__(self, message: str, region: int | str | None = None):
        self.region = region
        prefix = f"region {region}: " if region is not None else ""
        super().__init__(f"{prefix}{message}")


class ConfigError(TreeRegError):
    pass


class InsufficientSamplesError(TreeRegError):
    pass


class TrainingDiverged(TreeRegError):
    def __init__(self, step: int, data_loss: float, penalty: float):
        self.step = step
        self.data_loss = data_loss
        self.penalty = penalty
        super().__init__(
            f"non-finite loss at step {step}: data loss={data_loss!r}, lambda*penalty={penalty!r}"
        )
