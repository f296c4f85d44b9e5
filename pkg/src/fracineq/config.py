"""Run configurations for the command-line front end.

Every command has a pydantic model that rejects unknown fields. A JSON config
file and command-line flags can be mixed; flags win. The JSON schema of the
union is shipped as ``docs/runconfig.schema.json`` and regenerated with
``python -m fracineq.config docs/runconfig.schema.json``.
"""

from __future__ import annotations

import json
import sys
from pathlib import Path
from typing import Annotated, Any, Literal, Optional, Union

from pydantic import BaseModel, ConfigDict, Field, TypeAdapter, field_validator

from .invexity import DEFAULT_SEED

SCHEMA_VERSION = "fracineq.report/1"


class _Base(BaseModel):
    model_config = ConfigDict(extra="forbid", frozen=True)

    format: Literal["json", "csv"] = "json"
    out: Optional[str] = None
    seed: int = Field(DEFAULT_SEED, ge=0, lt=2**64)


def _pair(v: Any) -> Any:
    # "lo,hi" on the command line, [lo, hi] in files
    if isinstance(v, str):
        parts = [p for p in v.split(",") if p.strip()]
        if len(parts) != 2:
            raise ValueError("domain must be 'lo,hi'")
        return [float(p) for p in parts]
    return v


class IntegrateConfig(_Base):
    command: Literal["integrate"] = "integrate"
    f: str
    a: float
    x: float
    alpha: float
    side: Literal["left", "right"] = "left"
    nodes: int = Field(32, ge=2, le=256)
    tol: float = Field(1e-10, gt=0)
    method: Literal["desingularized-gauss", "adaptive-bisection"] = "desingularized-gauss"


class _CaseFields(_Base):
    theorem: str
    f: str
    a: float
    b: float
    alpha: float = 1.0
    eta: Optional[str] = None
    domain: Optional[tuple[float, float]] = None
    p: Optional[float] = None
    q: Optional[float] = None
    variant_of: Optional[str] = None
    tol: float = Field(1e-9, gt=0)
    check_hypotheses: bool = True

    @field_validator("domain", mode="before")
    @classmethod
    def _domain(cls, v: Any) -> Any:
        return _pair(v)


class VerifyConfig(_CaseFields):
    command: Literal["verify"] = "verify"


class ScanConfig(_CaseFields):
    command: Literal["scan"] = "scan"
    alpha_grid: str = "0.25:1:0.25"
    format: Literal["json", "csv"] = "csv"


class CertifyConfig(_Base):
    command: Literal["certify"] = "certify"
    property: Literal["quasiconvex", "preinvex", "prequasiinvex", "condition-c", "eq-1-5", "invex-set"]
    f: Optional[str] = None
    eta: Optional[str] = None
    a: Optional[float] = None
    b: Optional[float] = None
    domain: Optional[tuple[float, float]] = None
    tol: Optional[float] = Field(None, ge=0)
    grid_points: int = Field(33, ge=2)
    random_samples: int = Field(10_000, ge=0)

    @field_validator("domain", mode="before")
    @classmethod
    def _domain(cls, v: Any) -> Any:
        return _pair(v)


class SearchConfig(_Base):
    command: Literal["search"] = "search"
    theorem: str
    family: str = "quadratic"
    budget: int = Field(200, ge=0)
    a: float = 0.0
    b: float = 1.0
    alpha: float = 1.0
    eta: Optional[str] = None
    p: Optional[float] = None
    q: Optional[float] = None
    tol: float = Field(1e-9, gt=0)
    refine_steps: int = Field(50, ge=0)


RunConfig = Annotated[
    Union[IntegrateConfig, VerifyConfig, ScanConfig, CertifyConfig, SearchConfig],
    Field(discriminator="command"),
]
_ADAPTER: TypeAdapter = TypeAdapter(RunConfig)

COMMANDS = ("integrate", "verify", "certify", "scan", "search")


def load_config(data: dict[str, Any]) -> BaseModel:
    """Validate a mapping (must carry ``command``) into its config model."""
    return _ADAPTER.validate_python(data)


def merge(command: str, file_data: dict[str, Any] | None, flags: dict[str, Any]) -> BaseModel:
    """File values overlaid by flags that were actually given."""
    data = dict(file_data or {})
    if data.get("command", command) != command:
        raise ValueError(f"config file is for {data['command']!r}, not {command!r}")
    data.update({k: v for k, v in flags.items() if v is not None})
    data["command"] = command
    return load_config(data)


def read_config_file(path: str | Path) -> dict[str, Any]:
    with open(path, encoding="utf-8") as fh:
        data = json.load(fh)
    if not isinstance(data, dict):
        raise ValueError("config file must hold a JSON object")
    # a report file carries its config under "config"
    if data.get("schema") == SCHEMA_VERSION and "config" in data:
        data = data["config"]
    return data


def json_schema() -> dict[str, Any]:
    schema = _ADAPTER.json_schema()
    schema["title"] = "RunConfig"
    return schema


def main(argv: list[str] | None = None) -> int:
    argv = sys.argv[1:] if argv is None else argv
    text = json.dumps(json_schema(), indent=2, sort_keys=True) + "\n"
    if argv:
        Path(argv[0]).write_text(text, encoding="utf-8")
    else:
        sys.stdout.write(text)
    return 0


if __name__ == "__main__":
    raise SystemExit(main())
