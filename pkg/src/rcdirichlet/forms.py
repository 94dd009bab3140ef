"""Level-one test forms and the JSON form-file format.

File layout (UTF-8)::

    {"name": "E4", "weight": 4, "depth": 0, "width_h": "1", "precision": 10,
     "slices": {"0": ["1", "240", "2160", ...]}}

Coefficients are reduced fractions ``"p/q"`` or integers, optionally signed.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from fractions import Fraction
from pathlib import Path

from ._rational import format_fraction, parse_fraction
from .qseries import GradingError, PiGradedSeries, make_series

__all__ = [
    "FormDescriptor",
    "FormFileError",
    "builtin_form",
    "delta",
    "divisor_sigma",
    "eisenstein",
    "load_form",
    "save_form",
]

BUILTIN_NAMES = ("E2", "E4", "E6", "Delta")


class FormFileError(ValueError):
    """A form file could not be parsed or violates a descriptor invariant."""


@dataclass(frozen=True)
class FormDescriptor:
    name: str
    weight: int
    depth: int
    series: PiGradedSeries

    def __post_init__(self):
        if self.weight < 1:
            raise ValueError(f"weight: must be >= 1, got {self.weight}")
        if self.depth < 0:
            raise ValueError(f"depth: must be >= 0, got {self.depth}")
        if self.depth == 0 and set(self.series.grades) - {0}:
            raise GradingError(
                f"series: depth-0 form {self.name!r} has grades "
                f"{list(self.series.grades)}, expected only grade 0"
            )

    @property
    def width_h(self) -> Fraction:
        return self.series.width_h

    @property
    def precision(self) -> int:
        return self.series.precision


def divisor_sigma(k: int, n: int) -> int:
    """sum of d**k over the positive divisors d of n (trial division)."""
    if n < 1:
        raise ValueError(f"divisor_sigma needs n >= 1, got {n}")
    if k < 0:
        raise ValueError(f"divisor_sigma needs k >= 0, got {k}")
    total = 0
    d = 1
    while d * d <= n:
        if n % d == 0:
            total += d**k
            e = n // d
            if e != d:
                total += e**k
        d += 1
    return total


_EISENSTEIN = {
    # weight: (constant multiplying sigma_{k-1}, depth)
    2: (-24, 1),
    4: (240, 0),
    6: (-504, 0),
}


def eisenstein(k: int, N: int) -> FormDescriptor:
    """E_k = 1 + c_k sum sigma_{k-1}(n) q^n for k in {2, 4, 6}, h = 1."""
    if k not in _EISENSTEIN:
        raise ValueError(f"unsupported Eisenstein weight {k}; choose 2, 4 or 6")
    if N < 0:
        raise ValueError(f"precision must be nonnegative, got {N}")
    c, depth = _EISENSTEIN[k]
    coeffs = [1] + [c * divisor_sigma(k - 1, n) for n in range(1, N + 1)]
    return FormDescriptor(f"E{k}", k, depth, make_series(1, N, {0: coeffs}))


def delta(N: int) -> FormDescriptor:
    """Ramanujan's cusp form (E4^3 - E6^2) / 1728 of weight 12."""
    e4 = eisenstein(4, N).series
    e6 = eisenstein(6, N).series
    return FormDescriptor("Delta", 12, 0, (e4 * e4 * e4 - e6 * e6) / 1728)


def builtin_form(name: str, N: int) -> FormDescriptor:
    key = name.strip()
    if key in ("Delta", "delta", "D"):
        return delta(N)
    if key in ("E2", "E4", "E6"):
        return eisenstein(int(key[1]), N)
    raise ValueError(f"unknown builtin form {name!r}; choose one of {BUILTIN_NAMES}")


def _require(obj: dict, key: str, kind: type):
    if key not in obj:
        raise FormFileError(f"{key}: missing field")
    value = obj[key]
    if kind is int and (isinstance(value, bool) or not isinstance(value, int)):
        raise FormFileError(f"{key}: expected integer, got {value!r}")
    if not isinstance(value, kind):
        raise FormFileError(f"{key}: expected {kind.__name__}, got {value!r}")
    return value


def _parse_coeff(text, where: str) -> Fraction:
    if not isinstance(text, str):
        raise FormFileError(f"{where}: coefficient must be a string, got {text!r}")
    try:
        return parse_fraction(text, require_reduced=True)
    except ValueError as exc:
        raise FormFileError(f"{where}: {exc}") from None


def form_from_dict(obj) -> FormDescriptor:
    if not isinstance(obj, dict):
        raise FormFileError("top level must be a JSON object")
    name = _require(obj, "name", str)
    weight = _require(obj, "weight", int)
    depth = _require(obj, "depth", int)
    precision = _require(obj, "precision", int)
    width = _parse_coeff(_require(obj, "width_h", str), "width_h")
    raw_slices = _require(obj, "slices", dict)
    if precision < 0:
        raise FormFileError(f"precision: must be >= 0, got {precision}")
    if width <= 0:
        raise FormFileError(f"width_h: must be positive, got {width}")
    slices = {}
    for key, vec in raw_slices.items():
        try:
            grade = int(key)
        except ValueError:
            raise FormFileError(f"slices: grade key {key!r} is not an integer") from None
        if grade < 0:
            raise FormFileError(f"slices[{key}]: grade must be nonnegative")
        if not isinstance(vec, list) or len(vec) != precision + 1:
            raise FormFileError(
                f"slices[{key}]: expected a list of {precision + 1} coefficients"
            )
        slices[grade] = [_parse_coeff(c, f"slices[{key}][{i}]") for i, c in enumerate(vec)]
    series = make_series(width, precision, slices)
    try:
        return FormDescriptor(name, weight, depth, series)
    except GradingError as exc:
        raise FormFileError(f"homogeneity violation: {exc}") from None
    except ValueError as exc:
        raise FormFileError(str(exc)) from None


def form_to_dict(fd: FormDescriptor) -> dict:
    return {
        "name": fd.name,
        "weight": fd.weight,
        "depth": fd.depth,
        "width_h": format_fraction(fd.width_h),
        "precision": fd.precision,
        "slices": {
            str(e): [format_fraction(c) for c in vec]
            for e, vec in fd.series.slices.items()
        },
    }


def load_form(path) -> FormDescriptor:
    text = Path(path).read_text(encoding="utf-8")
    try:
        obj = json.loads(text)
    except json.JSONDecodeError as exc:
        raise FormFileError(f"malformed JSON: {exc}") from None
    return form_from_dict(obj)


def save_form(fd: FormDescriptor, path) -> None:
    Path(path).write_text(
        json.dumps(form_to_dict(fd), indent=1, ensure_ascii=False) + "\n",
        encoding="utf-8",
    )
