import enum
from typing import Optional

from pydantic import BaseModel, Field, field_validator, model_validator

from src.core.config import settings
from src.schemas.validators import validate_positive_tolerance


class Command(str, enum.Enum):
    EMBED1D = "embed1d"
    EMBED2D = "embed2d"
    VERIFY = "verify"
    CROSSCHECK = "crosscheck"


class OutputFormat(str, enum.Enum):
    JSON = "json"
    SVG = "svg"
    BOTH = "both"


class RunConfig(BaseModel):
    """One command-line invocation, validated before anything runs."""

    command: Command
    input: Optional[str] = Field(None, description='Input path, or "-" for standard input')
    out: Optional[str] = Field(None, description="Output path; standard output when absent")
    tol: float = Field(settings.EIGEN_TOLERANCE, description="Relative tolerance factor")
    seed: int = Field(settings.DEFAULT_SEED, ge=0)
    format: OutputFormat = OutputFormat.JSON
    dim: int = Field(1, ge=1, le=2, description="Dimension checked by crosscheck")
    cap: int = Field(6, ge=1, le=settings.CROSSCHECK_SIZE_CAP)
    workers: int = Field(1, ge=1)

    @field_validator("tol")
    @classmethod
    def validate_tol(cls, v: float) -> float:
        """Validate that tol is > 0."""
        return validate_positive_tolerance(v)

    @model_validator(mode="after")
    def validate_command_options(self) -> "RunConfig":
        """Validate the options each command needs."""
        if self.command is not Command.CROSSCHECK and self.input is None:
            raise ValueError(f"{self.command.value} needs an input path")
        if self.format is not OutputFormat.JSON:
            if self.command not in (Command.EMBED1D, Command.EMBED2D):
                raise ValueError("--format svg|both applies to embed1d and embed2d only")
            if self.out is None:
                raise ValueError("--format svg|both needs --out")
        return self
