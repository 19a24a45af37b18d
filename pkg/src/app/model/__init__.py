from . import io
from . import service
from . import types

__all__ = ["io", "types", "service"]
