"""Loading OpenAPI 3.x documents and inlining their internal ``$ref``s."""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from typing import Any
from urllib.parse import unquote

import yaml

__all__ = [
    "Diagnostic",
    "RawDocument",
    "ResolvedDocument",
    "SpecError",
    "SpecSyntaxError",
    "UnsupportedVersion",
    "StructureError",
    "DanglingRef",
    "ExternalRefUnsupported",
    "load_document",
    "load_path",
    "resolve_refs",
    "escape_pointer_token",
    "join_pointer",
    "pointer_get",
]


class SpecError(Exception):
    """Base class for every problem that stops a document from being analyzed."""


class SpecSyntaxError(SpecError):
    def __init__(self, message: str, line: int | None = None, column: int | None = None):
        self.line = line
        self.column = column
        where = f" (line {line}, column {column})" if line is not None else ""
        super().__init__(f"{message}{where}")


class UnsupportedVersion(SpecError):
    pass


class StructureError(SpecError):
    pass


class DanglingRef(SpecError):
    def __init__(self, ref: str, at: str):
        self.ref = ref
        self.at = at
        super().__init__(f"$ref {ref!r} at {at or '/'} points to nothing")


class ExternalRefUnsupported(SpecError):
    def __init__(self, ref: str, at: str):
        self.ref = ref
        self.at = at
        super().__init__(f"external $ref {ref!r} at {at or '/'} is not supported")


@dataclass(frozen=True)
class Diagnostic:
    """A non-fatal finding produced while loading or extracting."""

    kind: str
    json_pointer: str
    message: str

    def to_dict(self) -> dict:
        return {"kind": self.kind, "json_pointer": self.json_pointer, "message": self.message}


@dataclass(frozen=True)
class RawDocument:
    root: dict
    source_name: str
    syntax: str  # "json" or "yaml"


@dataclass(frozen=True)
class ResolvedDocument:
    root: dict
    source_name: str
    warnings: tuple[Diagnostic, ...] = field(default_factory=tuple)


# -- JSON pointers -----------------------------------------------------------


def escape_pointer_token(token: Any) -> str:
    return str(token).replace("~", "~0").replace("/", "~1")


def join_pointer(base: str, *tokens: Any) -> str:
    return base + "".join("/" + escape_pointer_token(t) for t in tokens)


def _unescape(token: str) -> str:
    return token.replace("~1", "/").replace("~0", "~")


def pointer_get(root: Any, pointer: str) -> Any:
    """Look up an RFC 6901 pointer (without the leading ``#``); KeyError if absent."""
    if pointer == "":
        return root
    if not pointer.startswith("/"):
        raise KeyError(pointer)
    node = root
    for raw in pointer[1:].split("/"):
        token = _unescape(raw)
        if isinstance(node, dict):
            if token not in node:
                raise KeyError(pointer)
            node = node[token]
        elif isinstance(node, list):
            if not token.isdigit() or int(token) >= len(node):
                raise KeyError(pointer)
            node = node[int(token)]
        else:
            raise KeyError(pointer)
    return node


# -- parsing -----------------------------------------------------------------


class _StringKeyLoader(yaml.SafeLoader):
    """SafeLoader that keeps mapping keys as written (``200`` stays ``"200"``)."""


def _construct_mapping(loader: _StringKeyLoader, node: yaml.MappingNode) -> dict:
    loader.flatten_mapping(node)
    out = {}
    for key_node, value_node in node.value:
        if isinstance(key_node, yaml.ScalarNode):
            key = key_node.value
        else:
            key = str(loader.construct_object(key_node, deep=True))
        out[key] = loader.construct_object(value_node, deep=True)
    return out


_StringKeyLoader.add_constructor(
    yaml.resolver.BaseResolver.DEFAULT_MAPPING_TAG, _construct_mapping
)


def _parse(text: str) -> tuple[Any, str]:
    try:
        return json.loads(text), "json"
    except ValueError:
        pass
    try:
        return yaml.load(text, Loader=_StringKeyLoader), "yaml"
    except yaml.YAMLError as exc:
        mark = getattr(exc, "problem_mark", None)
        problem = getattr(exc, "problem", None) or str(exc)
        if mark is not None:
            raise SpecSyntaxError(f"not valid JSON or YAML: {problem}", mark.line + 1, mark.column + 1) from None
        raise SpecSyntaxError(f"not valid JSON or YAML: {problem}") from None


def load_document(text: str, source_name: str = "<string>") -> RawDocument:
    """Parse ``text`` as JSON (falling back to YAML) and check it is OpenAPI 3.x."""
    if not text or not text.strip():
        raise SpecSyntaxError("empty document")
    root, syntax = _parse(text)
    if not isinstance(root, dict):
        raise StructureError(f"{source_name}: top level must be a mapping")
    version = root.get("openapi")
    if version is None:
        if "swagger" in root:
            raise UnsupportedVersion(
                f"{source_name}: Swagger {root['swagger']} documents are not supported; convert to OpenAPI 3"
            )
        raise UnsupportedVersion(f"{source_name}: missing 'openapi' version field")
    if not str(version).startswith("3"):
        raise UnsupportedVersion(f"{source_name}: OpenAPI version {version} is not supported (need 3.x)")
    if not isinstance(root.get("paths"), dict):
        if root.get("paths") is None and "paths" not in root:
            raise StructureError(f"{source_name}: missing 'paths'")
        raise StructureError(f"{source_name}: 'paths' must be a mapping")
    return RawDocument(root=root, source_name=source_name, syntax=syntax)


def load_path(path) -> RawDocument:
    from pathlib import Path

    p = Path(path)
    return load_document(p.read_text(encoding="utf-8"), source_name=str(path))


# -- reference resolution ----------------------------------------------------


def _inside(ref_target: str, source: str) -> bool:
    return source == ref_target or source.startswith(ref_target + "/")


def resolve_refs(doc: RawDocument | ResolvedDocument) -> ResolvedDocument:
    """Return a copy of ``doc`` with every ``{"$ref": "#/..."}`` replaced by its target.

    A reference whose target encloses the node currently being expanded
    would recurse forever; it is replaced by ``{}`` and reported as a
    ``CycleTruncated`` warning.
    """
    root = doc.root
    warnings: list[Diagnostic] = []
    # source pointers of the nodes being expanded, outermost first
    sources: list[str] = []
    # ids of containers on the stack; guards against YAML self-aliases
    live: set[int] = set()

    def walk(node: Any, here: str, source: str) -> Any:
        if isinstance(node, dict):
            ref = node.get("$ref")
            if isinstance(ref, str):
                if len(node) > 1:
                    extra = ", ".join(sorted(str(k) for k in node if k != "$ref"))
                    warnings.append(Diagnostic("RefSiblingsDiscarded", here, f"keys beside $ref ignored: {extra}"))
                if not ref.startswith("#"):
                    raise ExternalRefUnsupported(ref, here)
                target = unquote(ref[1:])
                if any(_inside(target, s) for s in sources) or _inside(target, source):
                    warnings.append(Diagnostic("CycleTruncated", here, f"recursive reference {ref} replaced by {{}}"))
                    return {}
                try:
                    resolved = pointer_get(root, target)
                except KeyError:
                    raise DanglingRef(ref, here) from None
                return walk(resolved, here, target)
            return _walk_container(node, node.items(), here, source)
        if isinstance(node, list):
            return _walk_container(node, enumerate(node), here, source)
        return node

    def _walk_container(node, items, here, source):
        if id(node) in live:
            warnings.append(Diagnostic("CycleTruncated", here, "self-referencing alias replaced by empty value"))
            return {} if isinstance(node, dict) else []
        live.add(id(node))
        sources.append(source)
        try:
            if isinstance(node, dict):
                return {k: walk(v, join_pointer(here, k), join_pointer(source, k)) for k, v in items}
            return [walk(v, join_pointer(here, i), join_pointer(source, i)) for i, v in items]
        finally:
            sources.pop()
            live.discard(id(node))

    resolved_root = walk(root, "", "")
    previous = tuple(getattr(doc, "warnings", ()))
    return ResolvedDocument(
        root=resolved_root,
        source_name=doc.source_name,
        warnings=previous + tuple(warnings),
    )
