from . import service
from . import types

__all__ = ["types", "service"]
