"""Classical and quantum continuously open tribaker maps, with a scar-function semiclassical solver."""

from .reflectivity import ReflectivityProfile

__version__ = "0.1.0"

__all__ = ["ReflectivityProfile", "__version__"]
