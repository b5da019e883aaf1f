"""Building the per-operation attribute model from a resolved document."""

from __future__ import annotations

import re
from dataclasses import dataclass, field
from typing import Any, Iterable

from .canonical import canonical_key
from .loader import Diagnostic, ResolvedDocument, join_pointer

__all__ = [
    "AttributeRecord",
    "OperationModel",
    "Endpoint",
    "ApiModel",
    "ExtractionConfig",
    "ResponseCodeFilter",
    "HTTP_METHODS",
    "flatten_schema",
    "extract_model",
]

HTTP_METHODS = ("get", "put", "post", "delete", "options", "head", "patch", "trace")
PARAMETER_LOCATIONS = ("path", "query", "header")
LOCATIONS = ("body",) + PARAMETER_LOCATIONS


@dataclass(frozen=True)
class AttributeRecord:
    raw_name: str
    canonical_key: str
    location: str
    pointer: str
    declared_readonly: bool = False

    def to_dict(self) -> dict:
        return {
            "raw_name": self.raw_name,
            "canonical_key": self.canonical_key,
            "location": self.location,
            "pointer": self.pointer,
            "declared_readonly": self.declared_readonly,
        }

    @classmethod
    def from_dict(cls, data: dict) -> "AttributeRecord":
        return cls(
            raw_name=data["raw_name"],
            canonical_key=data["canonical_key"],
            location=data["location"],
            pointer=data["pointer"],
            declared_readonly=bool(data.get("declared_readonly", False)),
        )


@dataclass(frozen=True)
class OperationModel:
    method: str  # upper case, e.g. "GET"
    path: str
    operation_id: str | None = None
    request_attrs: tuple[AttributeRecord, ...] = ()
    response_attrs: tuple[AttributeRecord, ...] = ()

    @property
    def request_keys(self) -> frozenset[str]:
        return frozenset(a.canonical_key for a in self.request_attrs)

    @property
    def response_keys(self) -> frozenset[str]:
        return frozenset(a.canonical_key for a in self.response_attrs)


@dataclass(frozen=True)
class Endpoint:
    path: str
    operations: tuple[OperationModel, ...] = ()


@dataclass(frozen=True)
class ApiModel:
    source_name: str
    endpoints: tuple[Endpoint, ...] = ()
    warnings: tuple[Diagnostic, ...] = ()

    @property
    def endpoint_count(self) -> int:
        return len(self.endpoints)

    @property
    def operation_count(self) -> int:
        return sum(len(e.operations) for e in self.endpoints)

    @property
    def totals(self) -> dict:
        return {"endpoints": self.endpoint_count, "operations": self.operation_count}

    def operations(self) -> Iterable[OperationModel]:
        for endpoint in self.endpoints:
            yield from endpoint.operations


_CODE_TOKEN = re.compile(r"^([1-5])(?:([0-9]{2})|XX)$", re.IGNORECASE)


@dataclass(frozen=True)
class ResponseCodeFilter:
    """Which response codes feed an operation's response attributes.

    Built from a comma-separated expression: exact codes (``201``), code
    classes (``2xx``), ``default``, or ``all``.
    """

    expression: str = "2xx"

    def __post_init__(self):
        for token in self._tokens():
            if token not in ("all", "default") and not _CODE_TOKEN.match(token):
                raise ValueError(f"bad response code selector {token!r}")

    def _tokens(self) -> list[str]:
        return [t.strip().lower() for t in self.expression.split(",") if t.strip()]

    def matches(self, code: Any) -> bool:
        code = str(code).strip().lower()
        for token in self._tokens():
            if token == "all" or token == code:
                return True
            if token == "default":
                continue
            if token.endswith("xx"):
                # "2xx" selects 200..299 and the literal "2XX" range key
                if code[:1] == token[0] and (code[1:] == "xx" or (len(code) == 3 and code.isdigit())):
                    return True
            elif code.endswith("xx") and code[0] == token[0]:
                # a range key in the document covers the exact code asked for
                return True
        return False


@dataclass(frozen=True)
class ExtractionConfig:
    include_parameters: bool = True
    response_codes: ResponseCodeFilter = field(default_factory=ResponseCodeFilter)
    max_depth: int = 16

    def __post_init__(self):
        if isinstance(self.response_codes, str):
            object.__setattr__(self, "response_codes", ResponseCodeFilter(self.response_codes))
        if self.max_depth < 1:
            raise ValueError("max_depth must be positive")

    def to_dict(self) -> dict:
        return {
            "include_parameters": self.include_parameters,
            "response_codes": self.response_codes.expression,
            "max_depth": self.max_depth,
        }


# -- schema flattening -------------------------------------------------------

_COMBINATORS = ("allOf", "oneOf", "anyOf")


def _is_container(schema: dict) -> bool:
    return (
        isinstance(schema.get("properties"), dict)
        and bool(schema["properties"])
        or any(isinstance(schema.get(c), list) and schema[c] for c in _COMBINATORS)
        or ("items" in schema and _items_is_container(schema["items"]))
    )


def _items_is_container(items: Any) -> bool:
    return isinstance(items, dict) and _is_container(items)


def flatten_schema(
    schema: Any,
    location: str = "body",
    max_depth: int = 16,
    pointer: str = "",
    warnings: list[Diagnostic] | None = None,
) -> tuple[AttributeRecord, ...]:
    """Flatten a ref-free schema into leaf attributes with dotted names.

    Object properties nest as ``a.b``; arrays of objects add a ``[]``
    segment (``tags[].name``); arrays of scalars are a single leaf; the
    ``allOf``/``oneOf``/``anyOf`` branches are unioned. A scalar schema
    at the top level yields nothing. Records are deduplicated by canonical
    key, first occurrence wins.
    """
    if warnings is None:
        warnings = []
    found: dict[str, AttributeRecord] = {}

    def add(name: str, node: Any, where: str):
        key = canonical_key(name)
        if key not in found:
            readonly = isinstance(node, dict) and node.get("readOnly") is True
            found[key] = AttributeRecord(name, key, location, where, readonly)

    def visit(node: Any, prefix: str, where: str, depth: int):
        if not isinstance(node, dict):
            warnings.append(Diagnostic("MalformedSchema", where, "schema is not an object; skipped"))
            return
        if depth > max_depth:
            warnings.append(Diagnostic("MaxDepthReached", where, f"nesting deeper than {max_depth} not flattened"))
            return
        props = node.get("properties")
        if props is not None and not isinstance(props, dict):
            warnings.append(Diagnostic("MalformedSchema", join_pointer(where, "properties"), "properties is not a mapping"))
        elif props:
            for name, sub in props.items():
                child = f"{prefix}.{name}" if prefix else str(name)
                child_ptr = join_pointer(where, "properties", name)
                if isinstance(sub, dict) and _is_container(sub):
                    visit(sub, child, child_ptr, depth + 1)
                elif isinstance(sub, dict):
                    add(child, sub, child_ptr)
                else:
                    warnings.append(Diagnostic("MalformedSchema", child_ptr, "property schema is not an object"))
        for combinator in _COMBINATORS:
            branches = node.get(combinator)
            if branches is None:
                continue
            if not isinstance(branches, list):
                warnings.append(Diagnostic("MalformedSchema", join_pointer(where, combinator), f"{combinator} is not a list"))
                continue
            for i, branch in enumerate(branches):
                # a combinator does not add a nesting level of its own
                visit(branch, prefix, join_pointer(where, combinator, i), depth)
        if "items" in node:
            items = node["items"]
            items_ptr = join_pointer(where, "items")
            if _items_is_container(items):
                visit(items, prefix + "[]", items_ptr, depth + 1)
            elif not isinstance(items, dict):
                warnings.append(Diagnostic("MalformedSchema", items_ptr, "items is not a schema object"))
            # an array of scalars at the top level has no name to report

    visit(schema, "", pointer, 0)
    return tuple(found.values())


# -- operations --------------------------------------------------------------


def _merge(records: Iterable[AttributeRecord]) -> tuple[AttributeRecord, ...]:
    seen: dict[str, AttributeRecord] = {}
    for rec in records:
        seen.setdefault(rec.canonical_key, rec)
    return tuple(seen.values())


def _content_records(content: Any, where: str, cfg: ExtractionConfig, warnings) -> list[AttributeRecord]:
    out: list[AttributeRecord] = []
    if not isinstance(content, dict):
        return out
    for media_type, media in content.items():
        if isinstance(media, dict) and "schema" in media:
            out.extend(
                flatten_schema(
                    media["schema"],
                    "body",
                    cfg.max_depth,
                    join_pointer(where, media_type, "schema"),
                    warnings,
                )
            )
    return out


def _parameter_records(params: list[tuple[str, dict]]) -> list[AttributeRecord]:
    out = []
    for where, param in params:
        name = param.get("name")
        loc = param.get("in")
        if loc not in PARAMETER_LOCATIONS or not isinstance(name, str) or not name:
            continue
        schema = param.get("schema")
        readonly = isinstance(schema, dict) and schema.get("readOnly") is True
        out.append(AttributeRecord(name, canonical_key(name), loc, where, readonly))
    return out


def _collect_parameters(path_item: dict, op: dict, path_ptr: str, op_ptr: str) -> list[tuple[str, dict]]:
    """Path-level parameters followed by operation-level ones; the latter override."""
    op_params = [
        (join_pointer(op_ptr, "parameters", i), p)
        for i, p in enumerate(op.get("parameters") or [])
        if isinstance(p, dict)
    ]
    overridden = {(p.get("name"), p.get("in")) for _, p in op_params}
    shared = [
        (join_pointer(path_ptr, "parameters", i), p)
        for i, p in enumerate(path_item.get("parameters") or [])
        if isinstance(p, dict) and (p.get("name"), p.get("in")) not in overridden
    ]
    return shared + op_params


def _operation(path: str, method: str, path_item: dict, op: dict, cfg: ExtractionConfig, warnings) -> OperationModel:
    path_ptr = join_pointer("", "paths", path)
    op_ptr = join_pointer(path_ptr, method)

    request: list[AttributeRecord] = []
    params = _parameter_records(_collect_parameters(path_item, op, path_ptr, op_ptr)) if cfg.include_parameters else []
    body = op.get("requestBody")
    body_records = (
        _content_records(body.get("content"), join_pointer(op_ptr, "requestBody", "content"), cfg, warnings)
        if isinstance(body, dict)
        else []
    )
    # keep the document's own key order between parameters and requestBody
    keys = list(op)
    if "requestBody" in keys and "parameters" in keys and keys.index("requestBody") < keys.index("parameters"):
        request = body_records + params
    else:
        request = params + body_records

    response: list[AttributeRecord] = []
    responses = op.get("responses")
    if isinstance(responses, dict):
        for code, resp in responses.items():
            if not cfg.response_codes.matches(code) or not isinstance(resp, dict):
                continue
            response.extend(
                _content_records(resp.get("content"), join_pointer(op_ptr, "responses", code, "content"), cfg, warnings)
            )

    op_id = op.get("operationId")
    return OperationModel(
        method=method.upper(),
        path=path,
        operation_id=op_id if isinstance(op_id, str) else None,
        request_attrs=_merge(request),
        response_attrs=_merge(response),
    )


def extract_model(doc: ResolvedDocument, config: ExtractionConfig | None = None) -> ApiModel:
    """Every endpoint and operation of ``doc`` with its request/response attributes."""
    cfg = config or ExtractionConfig()
    warnings: list[Diagnostic] = []
    endpoints = []
    for path, path_item in (doc.root.get("paths") or {}).items():
        if not isinstance(path_item, dict):
            warnings.append(Diagnostic("MalformedPathItem", join_pointer("", "paths", path), "path item is not a mapping"))
            continue
        ops = tuple(
            _operation(path, key, path_item, value, cfg, warnings)
            for key, value in path_item.items()
            if key.lower() in HTTP_METHODS and isinstance(value, dict)
        )
        endpoints.append(Endpoint(path, ops))
    return ApiModel(
        source_name=doc.source_name,
        endpoints=tuple(endpoints),
        warnings=tuple(doc.warnings) + tuple(warnings),
    )
