"""
Modelos de datos de la CLI.

JobSpec valida los parámetros de un trabajo (pydantic); los reportes son
dataclasses con `to_dict` que se serializan a JSON con orden estable.
"""

import json
import logging
from dataclasses import dataclass, field
from enum import Enum
from pathlib import Path
from typing import Any, Dict, List, Optional, Union

from pydantic import BaseModel, ConfigDict, Field, field_validator, model_validator

from .brackets import Connectivity
from .sympart import RamificationProfile

logger = logging.getLogger(__name__)

SCHEMA_VERSION = "1.0"


class Engine(str, Enum):
    """Motor de cómputo de la serie de conteo."""

    CHARACTER = "character"
    GRAPH = "graph"
    BOTH = "both"


class JobSpec(BaseModel):
    """Parámetros de un trabajo de `count` o `sv`."""

    model_config = ConfigDict(extra="forbid", use_enum_values=False)

    command: str
    profile: Dict[str, Any] = Field(default_factory=dict)
    cutoff: Optional[int] = None
    p: Optional[int] = None
    connectivity: Connectivity = Connectivity.CONNECTED
    engine: Engine = Engine.CHARACTER
    area: bool = False
    wmax: Optional[int] = None
    out: Optional[Path] = None

    @field_validator("command")
    @classmethod
    def _known_command(cls, value: str) -> str:
        if value not in ("count", "sv"):
            raise ValueError(f"Comando desconocido: {value}")
        return value

    @field_validator("cutoff")
    @classmethod
    def _positive_cutoff(cls, value: Optional[int]) -> Optional[int]:
        if value is not None and value < 1:
            raise ValueError(f"cutoff debe ser ≥ 1: {value}")
        return value

    @field_validator("wmax")
    @classmethod
    def _positive_wmax(cls, value: Optional[int]) -> Optional[int]:
        if value is not None and value < 1:
            raise ValueError(f"wmax debe ser ≥ 1: {value}")
        return value

    @field_validator("p")
    @classmethod
    def _odd_exponent(cls, value: Optional[int]) -> Optional[int]:
        if value is not None and (value < -1 or value % 2 == 0):
            raise ValueError(f"p debe ser impar y ≥ -1: {value}")
        return value

    @model_validator(mode="after")
    def _check_combination(self) -> "JobSpec":
        if self.command == "sv" and self.p is None:
            raise ValueError("sv requiere el exponente p")
        if self.command == "sv" and self.engine is not Engine.CHARACTER:
            raise ValueError("sv solo admite el motor de caracteres")
        if self.area and (self.command != "sv" or self.p != -1):
            raise ValueError("--area requiere sv con p = -1")
        if self.engine is not Engine.CHARACTER and self.connectivity is not Connectivity.NO_UNRAMIFIED:
            raise ValueError("El motor de grafos calcula N′: use --connectivity no-unramified")
        return self

    def ramification_profile(self) -> RamificationProfile:
        return RamificationProfile.from_json(self.profile)


@dataclass
class CountReport:
    """Resultado de `count` o `sv`."""

    command: str
    profile: RamificationProfile
    connectivity: str
    cutoff: int
    series: Dict[str, Any]
    weight_bound: int
    engines: List[str]
    p: Optional[int] = None
    form: Optional[Dict[str, Any]] = None
    form_text: Optional[str] = None
    mixed_weight: Optional[int] = None
    within_bound: Optional[bool] = None
    engines_agree: Optional[bool] = None
    recognition_error: Optional[str] = None
    area: Dict[str, Any] = field(default_factory=dict)

    def to_dict(self) -> Dict[str, Any]:
        data: Dict[str, Any] = {
            "command": self.command,
            "profile": self.profile.to_json(),
            "stratum": self.profile.stratum_label(),
            "connectivity": self.connectivity,
            "cutoff": self.cutoff,
            "engines": self.engines,
            "series": self.series,
            "weight_bound": self.weight_bound,
        }
        if self.p is not None:
            data["p"] = self.p
        if self.engines_agree is not None:
            data["engines_agree"] = self.engines_agree
        if self.form is not None:
            data["form"] = self.form
            data["form_text"] = self.form_text
            data["mixed_weight"] = self.mixed_weight
            data["within_bound"] = self.within_bound
        if self.recognition_error is not None:
            data["recognition_error"] = self.recognition_error
        if self.area:
            data["area"] = self.area
        return data


@dataclass
class CorpusResult:
    """Resultado de una entrada del corpus de regresión."""

    name: str
    kind: str
    passed: bool
    detail: str = ""
    skipped: bool = False

    def to_dict(self) -> Dict[str, Any]:
        return {
            "name": self.name,
            "kind": self.kind,
            "passed": self.passed,
            "skipped": self.skipped,
            "detail": self.detail,
        }


def dump_json(data: Dict[str, Any], out: Optional[Union[str, Path]] = None) -> str:
    """
    Serializar con versión de esquema y claves ordenadas.

    Args:
        data: Documento a escribir
        out: Archivo de salida opcional

    Returns:
        El texto JSON
    """
    document = {"schema_version": SCHEMA_VERSION, **data}
    text = json.dumps(document, indent=2, ensure_ascii=False, sort_keys=True)
    if out is not None:
        Path(out).write_text(text + "\n", encoding="utf-8")
        logger.info(f"Resultado escrito en {out}")
    return text
