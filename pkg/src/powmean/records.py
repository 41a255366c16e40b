"""Sample files, complex-number text formats and JSON run records."""

from __future__ import annotations

import json
import math
import os
import re
from dataclasses import asdict, dataclass
from datetime import datetime, timezone
from pathlib import Path

import numpy as np

from powmean.errors import DomainError

__all__ = [
    "RunRecord",
    "SampleParseError",
    "format_complex",
    "parse_complex",
    "read_sample",
    "write_sample",
]


class SampleParseError(DomainError):
    pass


def read_sample(path) -> np.ndarray:
    """Read one real per line; ``#`` starts a comment, blank lines are skipped."""
    values = []
    with open(path, encoding="utf-8") as fh:
        for lineno, raw in enumerate(fh, start=1):
            text = raw.split("#", 1)[0].strip().rstrip(",")
            if not text:
                continue
            try:
                v = float(text)
            except ValueError:
                raise SampleParseError(f"{path}:{lineno}: cannot parse {text!r} as a real number") from None
            if not math.isfinite(v):
                raise SampleParseError(f"{path}:{lineno}: non-finite value {text!r}")
            values.append(v)
    if not values:
        raise SampleParseError(f"{path}: no observations found")
    return np.array(values)


def write_sample(path, values, header: str | None = None) -> None:
    lines = [f"# {header}"] if header else []
    lines.extend(repr(float(v)) for v in values)
    Path(path).write_text("\n".join(lines) + "\n", encoding="utf-8")


_IMAG_ONLY = re.compile(r"^([+-]?)([0-9.eE+-]*)[ij]$")


def parse_complex(text: str) -> complex:
    """Parse ``'2+3i'``, ``'i'``, ``'-1.5'``, ``'0+1i'`` or Python's ``'1j'`` forms."""
    s = str(text).strip().replace(" ", "").replace("I", "i").replace("J", "j")
    if not s:
        raise DomainError("empty complex number")
    s = s.replace("i", "j")
    # bare unit: 'j', '+j', '2-j'
    s = re.sub(r"(^|[+-])j", r"\g<1>1j", s)
    try:
        return complex(s)
    except ValueError:
        raise DomainError(f"cannot parse {text!r} as a complex number") from None


def format_complex(z, digits: int = 12) -> str:
    z = complex(z) + 0.0  # drop signed zeros
    sign = "-" if z.imag < 0 else "+"
    return f"{z.real:.{digits}g}{sign}{abs(z.imag):.{digits}g}i"


def to_jsonable(obj):
    """Recursively turn numpy scalars, complex numbers and tuples into JSON values."""
    if isinstance(obj, dict):
        return {str(k): to_jsonable(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [to_jsonable(v) for v in obj]
    if isinstance(obj, (complex, np.complexfloating)):
        z = complex(obj)
        return {"re": z.real, "im": z.imag}
    if isinstance(obj, np.bool_):
        return bool(obj)
    if isinstance(obj, np.integer):
        return int(obj)
    if isinstance(obj, np.floating):
        return _float(float(obj))
    if isinstance(obj, float):
        return _float(obj)
    return obj


def _float(v: float):
    if math.isnan(v):
        return "nan"
    if math.isinf(v):
        return "inf" if v > 0 else "-inf"
    return v


def _timestamp() -> str:
    # SOURCE_DATE_EPOCH pins the stamp for byte-reproducible records
    epoch = os.environ.get("SOURCE_DATE_EPOCH")
    moment = (
        datetime.fromtimestamp(int(epoch), tz=timezone.utc)
        if epoch
        else datetime.now(tz=timezone.utc)
    )
    return moment.replace(microsecond=0).isoformat()


@dataclass
class RunRecord:
    command: str
    config: dict
    results: dict
    seed: int | None
    timestamp: str
    software_version: str

    @classmethod
    def create(cls, command: str, config: dict, results: dict, seed: int | None) -> RunRecord:
        from powmean import __version__

        return cls(command, to_jsonable(config), to_jsonable(results), seed, _timestamp(), __version__)

    def to_json(self) -> str:
        return json.dumps(asdict(self), indent=2, sort_keys=True) + "\n"

    def write(self, path) -> None:
        Path(path).write_text(self.to_json(), encoding="utf-8")

    @classmethod
    def read(cls, path) -> RunRecord:
        data = json.loads(Path(path).read_text(encoding="utf-8"))
        return cls(**data)
