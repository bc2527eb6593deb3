from .strategies import characters, decorated_trees, edges, positive_trees, rationals

__all__ = [
    "characters",
    "decorated_trees",
    "edges",
    "positive_trees",
    "rationals",
]
