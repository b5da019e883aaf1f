"""Read/write operation matching and read-only candidate detection."""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from numbers import Rational
from typing import Iterable

from . import __version__
from .extract import ApiModel, AttributeRecord, OperationModel
from .loader import Diagnostic

__all__ = [
    "READ_METHODS",
    "WRITE_METHODS",
    "OperationRef",
    "DetectorConfig",
    "CandidatePair",
    "FlaggedCounts",
    "SpecReport",
    "as_ratio",
    "jaccard_similarity",
    "find_candidates",
    "summarize",
]

READ_METHODS = ("GET",)
WRITE_METHODS = ("POST", "PUT", "PATCH")
SCOPES = ("global", "same_path")


def as_ratio(value) -> Fraction:
    """Exact ratio from a Fraction, int, decimal string or float (via its repr)."""
    if isinstance(value, Rational):
        return Fraction(value)
    if isinstance(value, float):
        return Fraction(repr(value))
    return Fraction(str(value).strip())


@dataclass(frozen=True, order=True)
class OperationRef:
    method: str
    path: str

    def __str__(self) -> str:
        return f"{self.method} {self.path}"

    @classmethod
    def of(cls, op: OperationModel) -> "OperationRef":
        return cls(op.method, op.path)


@dataclass(frozen=True)
class DetectorConfig:
    threshold: Fraction = Fraction(1, 2)
    scope: str = "global"
    require_strict_count: bool = True

    def __post_init__(self):
        ratio = as_ratio(self.threshold)
        if not 0 <= ratio <= 1:
            raise ValueError(f"threshold must lie in [0, 1], got {self.threshold}")
        if self.scope not in SCOPES:
            raise ValueError(f"scope must be one of {SCOPES}, got {self.scope!r}")
        object.__setattr__(self, "threshold", ratio)

    def to_dict(self) -> dict:
        return {
            "threshold": str(self.threshold),
            "scope": self.scope,
            "require_strict_count": self.require_strict_count,
        }


@dataclass(frozen=True)
class CandidatePair:
    write_op: OperationRef
    read_op: OperationRef
    similarity: Fraction
    candidate_attrs: tuple[AttributeRecord, ...]
    res_count: int
    req_count: int

    @property
    def candidate_keys(self) -> frozenset[str]:
        return frozenset(a.canonical_key for a in self.candidate_attrs)


def jaccard_similarity(a: Iterable[str], b: Iterable[str]) -> Fraction:
    """``|a & b| / |a | b|`` as an exact fraction; two empty sets score 0."""
    a, b = set(a), set(b)
    union = len(a | b)
    if union == 0:
        return Fraction(0)
    return Fraction(len(a & b), union)


def find_candidates(model: ApiModel, config: DetectorConfig | None = None) -> list[CandidatePair]:
    """Pair every write operation with every GET and keep the suspicious matches.

    A (write, read) pair is kept when the GET response has strictly more
    distinct canonical keys than the write request, their Jaccard similarity
    reaches the threshold, and the response has keys the request lacks.
    Pairs come out in document order of the write operation, then of the
    read operation.
    """
    cfg = config or DetectorConfig()
    ops = list(model.operations())
    reads = [op for op in ops if op.method in READ_METHODS]
    writes = [op for op in ops if op.method in WRITE_METHODS]

    pairs = []
    for write in writes:
        req = write.request_keys
        for read in reads:
            if cfg.scope == "same_path" and read.path != write.path:
                continue
            res = read.response_keys
            if cfg.require_strict_count and not len(res) > len(req):
                continue
            similarity = jaccard_similarity(req, res)
            if similarity < cfg.threshold:
                continue
            extra = tuple(a for a in read.response_attrs if a.canonical_key not in req)
            if not extra:
                continue
            pairs.append(
                CandidatePair(
                    write_op=OperationRef.of(write),
                    read_op=OperationRef.of(read),
                    similarity=similarity,
                    candidate_attrs=extra,
                    res_count=len(res),
                    req_count=len(req),
                )
            )
    return pairs


@dataclass(frozen=True)
class FlaggedCounts:
    endpoints: int = 0
    operations: int = 0
    attributes: int = 0


@dataclass(frozen=True)
class SpecReport:
    """Findings for one document plus the counts of one results-table row."""

    source_name: str
    total_endpoints: int
    total_operations: int
    flagged: FlaggedCounts = field(default_factory=FlaggedCounts)
    pairs: tuple[CandidatePair, ...] = ()
    warnings: tuple[Diagnostic, ...] = ()
    config: dict = field(default_factory=dict)
    tool_version: str = __version__

    def counted_flags(self) -> FlaggedCounts:
        return count_flags(self.pairs)


def count_flags(pairs: Iterable[CandidatePair]) -> FlaggedCounts:
    pairs = list(pairs)
    write_ops = {p.write_op for p in pairs}
    attrs = {(p.write_op, a.canonical_key) for p in pairs for a in p.candidate_attrs}
    return FlaggedCounts(
        endpoints=len({op.path for op in write_ops}),
        operations=len(write_ops),
        attributes=len(attrs),
    )


def summarize(
    candidates: Iterable[CandidatePair],
    model: ApiModel,
    config: DetectorConfig | None = None,
    extraction=None,
) -> SpecReport:
    pairs = tuple(candidates)
    echo = dict((config or DetectorConfig()).to_dict())
    if extraction is not None:
        echo.update(extraction.to_dict())
    return SpecReport(
        source_name=model.source_name,
        total_endpoints=model.endpoint_count,
        total_operations=model.operation_count,
        flagged=count_flags(pairs),
        pairs=pairs,
        warnings=model.warnings,
        config=echo,
    )
