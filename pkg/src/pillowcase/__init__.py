"""
pillowcase: conteo de cubrimientos de la almohada, sumas de grafos y
formas cuasimodulares para Γ₀(2).
"""

__version__ = "0.1.0"

from .brackets import Connectivity, CoverCountQuery, count_covers, sv_series, wbracket  # noqa: E402
from .errors import PillowcaseError  # noqa: E402
from .qmforms import QMForm, recognize  # noqa: E402
from .qseries import QSeries  # noqa: E402
from .sympart import Partition, RamificationProfile  # noqa: E402

__all__ = [
    "__version__",
    "Connectivity",
    "CoverCountQuery",
    "PillowcaseError",
    "Partition",
    "QMForm",
    "QSeries",
    "RamificationProfile",
    "count_covers",
    "recognize",
    "sv_series",
    "wbracket",
]
