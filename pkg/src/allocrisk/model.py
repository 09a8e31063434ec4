"""Sequence-model data types: semi-axis and noise sequences, allocations,
budgets, and binary patterns.

A problem instance is a :class:`SequenceSpec` holding two coordinate
sequences, the semi-axes ``a_i`` (positive, nonincreasing) and the noise
variances ``sigma_i^2`` (positive), plus a truncation dimension ``D`` and a
tail tolerance.  Generator kinds (``power``, ``exp``) describe conceptually
infinite sequences that the risk modules may evaluate past ``D`` when
closing analytic tails; the ``explicit`` kind is exactly ``D``-dimensional.

Measurement allocations are real-valued vectors of per-coordinate
measurement counts.  Coordinates beyond the stored length carry zero
measurements.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass
from functools import cached_property
from pathlib import Path
from typing import Sequence, Union

import numpy as np

from .errors import SpecValidationError

__all__ = [
    "Allocation",
    "ExpSeq",
    "ExplicitSeq",
    "Pattern",
    "PowerSeq",
    "SequenceSpec",
    "UniformAllocation",
    "apply_pattern",
    "budget",
    "normalize_spec",
    "spec_from_json",
    "spec_to_json",
]


@dataclass(frozen=True)
class PowerSeq:
    """x_i = scale * i**exponent."""

    scale: float
    exponent: float

    def at(self, i):
        return self.scale * np.asarray(i, dtype=float) ** self.exponent


@dataclass(frozen=True)
class ExpSeq:
    """x_i = scale * exp(rate * i)."""

    scale: float
    rate: float

    def at(self, i):
        return self.scale * np.exp(self.rate * np.asarray(i, dtype=float))


@dataclass(frozen=True)
class ExplicitSeq:
    """x_i given by a finite list (1-based indexing)."""

    values: tuple[float, ...]

    def at(self, i):
        idx = np.asarray(i, dtype=int)
        if np.any(idx < 1) or np.any(idx > len(self.values)):
            raise SpecValidationError(
                f"explicit sequence of length {len(self.values)} has no index {idx}"
            )
        return np.asarray(self.values, dtype=float)[idx - 1]


Seq = Union[PowerSeq, ExpSeq, ExplicitSeq]


def _positive(name: str, value: float) -> None:
    if not (isinstance(value, (int, float)) and math.isfinite(value) and value > 0):
        raise SpecValidationError(f"{name} must be a positive finite number, got {value!r}")


@dataclass(frozen=True)
class SequenceSpec:
    """Semi-axes a_i, noise variances sigma_i^2, truncation dim D, tail tolerance.

    ``a`` generates the a_i values themselves; ``sigma2`` generates the
    variances sigma_i^2.  Validated invariants: a_i > 0 and nonincreasing on
    1..D, sigma_i^2 > 0, D >= 1.
    """

    a: Seq
    sigma2: Seq
    D: int
    tail_tol: float = 1e-9
    # hyperrectangle instances may order coordinates arbitrarily; the
    # ellipsoid solvers re-check this flag and reject unordered axes
    monotone_a: bool = True

    def __post_init__(self) -> None:
        if not (isinstance(self.D, int) and self.D >= 1):
            raise SpecValidationError(f"D must be an integer >= 1, got {self.D!r}")
        if not (self.tail_tol >= 0):
            raise SpecValidationError(f"tail_tol must be >= 0, got {self.tail_tol}")
        if isinstance(self.a, PowerSeq):
            _positive("a scale", self.a.scale)
            if self.a.exponent > 0:
                raise SpecValidationError("a must be nonincreasing: power exponent must be <= 0")
        elif isinstance(self.a, ExpSeq):
            _positive("a scale", self.a.scale)
            if self.a.rate > 0:
                raise SpecValidationError("a must be nonincreasing: exp rate must be <= 0")
        else:
            if len(self.a.values) != self.D:
                raise SpecValidationError(
                    f"explicit a list has length {len(self.a.values)}, expected D={self.D}"
                )
            vals = np.asarray(self.a.values, dtype=float)
            if not np.all(np.isfinite(vals)) or np.any(vals <= 0):
                raise SpecValidationError("explicit a values must be positive and finite")
            if self.monotone_a and np.any(np.diff(vals) > 0):
                raise SpecValidationError("explicit a values must be nonincreasing")
        if isinstance(self.sigma2, (PowerSeq, ExpSeq)):
            _positive("sigma2 scale", self.sigma2.scale)
        else:
            if len(self.sigma2.values) != self.D:
                raise SpecValidationError(
                    f"explicit sigma2 list has length {len(self.sigma2.values)}, expected D={self.D}"
                )
            vals = np.asarray(self.sigma2.values, dtype=float)
            if not np.all(np.isfinite(vals)) or np.any(vals <= 0):
                raise SpecValidationError("explicit sigma2 values must be positive and finite")

    # -- constructors ------------------------------------------------------

    @classmethod
    def sobolev_ellipsoid(
        cls,
        alpha: float,
        beta: float,
        Q: float = 1.0,
        sigma2: float = 1.0,
        D: int = 200,
        tail_tol: float = 1e-9,
    ) -> "SequenceSpec":
        """Power-law instance with a_i^2 = Q i^(-2 alpha), sigma_i^2 = sigma2 i^(2 beta)."""
        if not alpha > 0:
            raise SpecValidationError(f"alpha must be > 0, got {alpha}")
        if not beta > -0.5:
            raise SpecValidationError(f"beta must be > -0.5, got {beta}")
        return cls(
            a=PowerSeq(math.sqrt(Q), -alpha),
            sigma2=PowerSeq(sigma2, 2.0 * beta),
            D=D,
            tail_tol=tail_tol,
        )

    @classmethod
    def sobolev_hyperrect(
        cls,
        alpha: float,
        beta: float,
        Q: float = 1.0,
        sigma2: float = 1.0,
        D: int = 200,
        tail_tol: float = 1e-9,
    ) -> "SequenceSpec":
        """Power-law instance with a_i^2 = Q i^(-(2 alpha + 1)), sigma_i^2 = sigma2 i^(2 beta)."""
        if not alpha > 0:
            raise SpecValidationError(f"alpha must be > 0, got {alpha}")
        if not beta > -0.5:
            raise SpecValidationError(f"beta must be > -0.5, got {beta}")
        return cls(
            a=PowerSeq(math.sqrt(Q), -(alpha + 0.5)),
            sigma2=PowerSeq(sigma2, 2.0 * beta),
            D=D,
            tail_tol=tail_tol,
        )

    @classmethod
    def from_lists(
        cls,
        a: Sequence[float],
        sigma2: Sequence[float],
        tail_tol: float = 0.0,
        monotone_a: bool = True,
    ) -> "SequenceSpec":
        """Exactly len(a)-dimensional instance from explicit value lists.

        ``monotone_a=False`` admits arbitrarily ordered semi-axes, which only
        the hyperrectangle solvers support.
        """
        if len(a) != len(sigma2):
            raise SpecValidationError(
                f"a and sigma2 lists must have equal length, got {len(a)} and {len(sigma2)}"
            )
        return cls(
            a=ExplicitSeq(tuple(float(v) for v in a)),
            sigma2=ExplicitSeq(tuple(float(v) for v in sigma2)),
            D=len(a),
            tail_tol=tail_tol,
            monotone_a=monotone_a,
        )

    # -- accessors ----------------------------------------------------------

    @property
    def has_tail(self) -> bool:
        """True when the sequences continue past D (generator kinds)."""
        return not isinstance(self.a, ExplicitSeq)

    def a_at(self, i):
        return self.a.at(i)

    def sigma2_at(self, i):
        return self.sigma2.at(i)

    @cached_property
    def a_vec(self) -> np.ndarray:
        v = np.atleast_1d(np.asarray(self.a.at(np.arange(1, self.D + 1)), dtype=float))
        v.setflags(write=False)
        return v

    @cached_property
    def sigma2_vec(self) -> np.ndarray:
        v = np.atleast_1d(np.asarray(self.sigma2.at(np.arange(1, self.D + 1)), dtype=float))
        v.setflags(write=False)
        return v

    @cached_property
    def sigma_vec(self) -> np.ndarray:
        v = np.sqrt(self.sigma2_vec)
        v.setflags(write=False)
        return v


@dataclass(frozen=True)
class Allocation:
    """Real-valued measurement counts per coordinate; zero beyond the stored length."""

    n: tuple[float, ...]

    def __post_init__(self) -> None:
        vals = np.asarray(self.n, dtype=float)
        if vals.ndim != 1 or vals.size == 0:
            raise SpecValidationError("allocation must be a non-empty 1-d vector")
        if not np.all(np.isfinite(vals)) or np.any(vals < 0):
            raise SpecValidationError("allocation entries must be finite and >= 0")

    @classmethod
    def of(cls, values: "Allocation | Sequence[float] | np.ndarray") -> "Allocation":
        if isinstance(values, Allocation):
            return values
        return cls(tuple(float(v) for v in np.asarray(values, dtype=float)))

    @classmethod
    def uniform(cls, level: float, dim: int) -> "Allocation":
        return cls((float(level),) * dim)

    @cached_property
    def array(self) -> np.ndarray:
        v = np.asarray(self.n, dtype=float)
        v.setflags(write=False)
        return v

    @property
    def budget(self) -> float:
        return math.fsum(self.n)

    def padded(self, length: int) -> np.ndarray:
        """Zero-padded copy of length ``length`` (truncation is rejected)."""
        if len(self.n) > length:
            raise SpecValidationError(
                f"allocation of length {len(self.n)} exceeds dimension {length}"
            )
        out = np.zeros(length)
        out[: len(self.n)] = self.array
        return out


@dataclass(frozen=True)
class Pattern:
    """Binary mask; the entrywise product with an allocation is an allocation."""

    delta: tuple[int, ...]

    def __post_init__(self) -> None:
        if any(d not in (0, 1) for d in self.delta):
            raise SpecValidationError("pattern entries must be 0 or 1")

    @classmethod
    def ones(cls, dim: int) -> "Pattern":
        return cls((1,) * dim)

    @classmethod
    def truncation(cls, d: int, dim: int) -> "Pattern":
        if not 0 <= d <= dim:
            raise SpecValidationError(f"truncation level {d} outside [0, {dim}]")
        return cls((1,) * d + (0,) * (dim - d))


@dataclass(frozen=True)
class UniformAllocation:
    """Constant level k per coordinate, optionally truncated after d coordinates."""

    level: float
    trunc: int | None = None

    def __post_init__(self) -> None:
        if not (math.isfinite(self.level) and self.level >= 0):
            raise SpecValidationError(f"level must be finite and >= 0, got {self.level}")
        if self.trunc is not None and self.trunc < 1:
            raise SpecValidationError(f"truncation must be >= 1, got {self.trunc}")

    def expand(self, D: int) -> Allocation:
        d = D if self.trunc is None else min(self.trunc, D)
        out = [self.level] * d + [0.0] * (D - d)
        return Allocation(tuple(out))


def budget(alloc: Allocation | Sequence[float]) -> float:
    """Total measurement budget B(n) = sum_i n_i."""
    return Allocation.of(alloc).budget


def apply_pattern(alloc: Allocation | Sequence[float], pattern: Pattern) -> Allocation:
    """Entrywise product of an allocation with a binary pattern.

    The shorter of the two vectors is zero-padded.
    """
    a = Allocation.of(alloc).array
    p = np.asarray(pattern.delta, dtype=float)
    length = max(a.size, p.size)
    av = np.zeros(length)
    pv = np.zeros(length)
    av[: a.size] = a
    pv[: p.size] = p
    return Allocation.of(av * pv)


def _split_scale(seq: Seq) -> tuple[Seq, float]:
    """Factor a sequence into (unit-scale sequence, leading scale)."""
    if isinstance(seq, PowerSeq):
        return PowerSeq(1.0, seq.exponent), seq.scale
    if isinstance(seq, ExpSeq):
        return ExpSeq(1.0, seq.rate), seq.scale
    scale = seq.values[0]
    return ExplicitSeq(tuple(v / scale for v in seq.values)), scale


def normalize_spec(spec: SequenceSpec) -> tuple[SequenceSpec, float, float]:
    """Split a spec into a unit-scaled spec and the scale factors (C, c).

    With a_i^2 = C * u_i^2 and sigma_i^2 = c * v_i^2 the ellipsoid risk obeys
    R(n, C, c) = C * R(n * C / c, 1, 1), so callers can solve the unit
    instance and map risks and allocations back.
    """
    a_unit, a_scale = _split_scale(spec.a)
    s_unit, s_scale = _split_scale(spec.sigma2)
    unit = SequenceSpec(a=a_unit, sigma2=s_unit, D=spec.D, tail_tol=spec.tail_tol)
    return unit, a_scale**2, s_scale


# -- JSON serialization ------------------------------------------------------

_A_KINDS = {"power", "exp", "explicit"}


def _seq_to_json(seq: Seq, role: str) -> dict:
    if isinstance(seq, PowerSeq):
        if role == "a":
            return {"kind": "power", "scale": seq.scale, "decay": -seq.exponent}
        return {"kind": "power", "scale": seq.scale, "growth": seq.exponent}
    if isinstance(seq, ExpSeq):
        if role == "a":
            return {"kind": "exp", "scale": seq.scale, "rate": -seq.rate}
        return {"kind": "exp", "scale": seq.scale, "rate": seq.rate}
    return {"kind": "explicit", "values": list(seq.values)}


def _seq_from_json(obj: dict, role: str) -> Seq:
    if not isinstance(obj, dict) or "kind" not in obj:
        raise SpecValidationError(f"sequence for {role!r} must be an object with a 'kind'")
    kind = obj["kind"]
    if kind not in _A_KINDS:
        raise SpecValidationError(f"unknown sequence kind {kind!r}")
    try:
        if kind == "power":
            scale = float(obj["scale"])
            if role == "a":
                return PowerSeq(scale, -float(obj["decay"]))
            return PowerSeq(scale, float(obj["growth"]))
        if kind == "exp":
            scale = float(obj["scale"])
            rate = float(obj["rate"])
            return ExpSeq(scale, -rate if role == "a" else rate)
        return ExplicitSeq(tuple(float(v) for v in obj["values"]))
    except KeyError as exc:
        raise SpecValidationError(f"sequence for {role!r} is missing parameter {exc}") from exc


def spec_to_json(spec: SequenceSpec) -> dict:
    """JSON-compatible dict: {a: {kind, ...}, sigma2: {kind, ...}, D, tail_tol}."""
    return {
        "a": _seq_to_json(spec.a, "a"),
        "sigma2": _seq_to_json(spec.sigma2, "sigma2"),
        "D": spec.D,
        "tail_tol": spec.tail_tol,
    }


def spec_from_json(source: "str | Path | dict") -> SequenceSpec:
    """Parse a spec from a dict, a JSON string, or a path to a JSON file."""
    if isinstance(source, dict):
        obj = source
    else:
        text = str(source)
        if text.lstrip().startswith("{"):
            obj = json.loads(text)
        else:
            obj = json.loads(Path(text).read_text())
    if not isinstance(obj, dict):
        raise SpecValidationError("spec JSON must be an object")
    for key in ("a", "sigma2", "D"):
        if key not in obj:
            raise SpecValidationError(f"spec JSON is missing required key {key!r}")
    return SequenceSpec(
        a=_seq_from_json(obj["a"], "a"),
        sigma2=_seq_from_json(obj["sigma2"], "sigma2"),
        D=int(obj["D"]),
        tail_tol=float(obj.get("tail_tol", 1e-9)),
    )
