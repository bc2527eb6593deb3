from src.bseries.composition import CoherentCharacter, compose_series, compose_with_function
from src.bseries.series import BSeriesMinus, BSeriesPlus
from src.bseries.substitution import root_substitute_series, substitute_series

__all__ = [
    "BSeriesMinus", "BSeriesPlus", "CoherentCharacter", "compose_series", "compose_with_function",
    "root_substitute_series", "substitute_series",
]
