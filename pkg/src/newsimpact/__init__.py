"""News-topic impact analysis: headline embeddings, k-means topics, OLS diagnostics."""

__version__ = "0.1.0"

from newsimpact.errors import (
    EmptyResultError,
    InputError,
    NewsimpactError,
)

__all__ = ["NewsimpactError", "InputError", "EmptyResultError", "__version__"]
