from src.config.settings import ModelConfig
from src.model.evaluator import PiEvaluator
from src.model.grid import Grid, load_field, save_field
from src.model.kernel import KernelSpec
from src.model.noise import NoiseSpec


def build_model(spec, config: ModelConfig | None = None, seed: int = 42) -> PiEvaluator:
    """Heat kernels for every kernel label and seeded smooth noises for every noise label."""
    config = config or ModelConfig.for_dimension(spec.dim)
    grid = Grid.uniform(spec.dim, config.points, config.spacing)
    kernels = KernelSpec.heat(grid, sorted(spec.kernel_labels), config.max_order, config.horizon, config.epsilon)
    noises = NoiseSpec.generate(grid, spec.noise_labels, seed, config.correlation)
    return PiEvaluator(spec, grid, kernels, noises, strict=config.strict_taylor)


__all__ = ["Grid", "KernelSpec", "NoiseSpec", "PiEvaluator", "build_model", "load_field", "save_field"]
