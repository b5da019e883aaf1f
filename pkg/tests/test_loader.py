import json

import pytest
from hypothesis import given, settings, strategies as st

from massmine.loader import (
    DanglingRef,
    ExternalRefUnsupported,
    RawDocument,
    SpecSyntaxError,
    StructureError,
    UnsupportedVersion,
    load_document,
    pointer_get,
    resolve_refs,
)


def _doc(root):
    return RawDocument(root=root, source_name="t", syntax="json")


def _has_ref(node):
    if isinstance(node, dict):
        return "$ref" in node or any(_has_ref(v) for v in node.values())
    if isinstance(node, list):
        return any(_has_ref(v) for v in node)
    return False


class TestLoad:
    def test_tasks(self, tasks_text):
        doc = load_document(tasks_text, "task_management.yaml")
        assert doc.syntax == "yaml"
        assert list(doc.root["paths"]) == ["/tasks"]
        assert list(doc.root["paths"]["/tasks"]) == ["get", "post"]

    def test_minimal_json(self):
        doc = load_document('{"openapi":"3.0.1","info":{},"paths":{}}')
        assert doc.syntax == "json"
        assert doc.root["paths"] == {}

    def test_swagger_rejected(self):
        with pytest.raises(UnsupportedVersion, match="Swagger"):
            load_document('{"swagger":"2.0","paths":{}}')

    @pytest.mark.parametrize("version", ["2.0", "1"])
    def test_old_openapi_rejected(self, version):
        with pytest.raises(UnsupportedVersion):
            load_document(json.dumps({"openapi": version, "paths": {}}))

    def test_missing_version(self):
        with pytest.raises(UnsupportedVersion):
            load_document('{"paths": {}}')

    def test_numeric_yaml_version_accepted(self):
        # an unquoted 3.0 is a float in YAML
        doc = load_document("openapi: 3.0\npaths: {}\n")
        assert doc.root["openapi"] == 3.0

    @pytest.mark.parametrize("body", ['{"openapi":"3.0.0"}', '{"openapi":"3.0.0","paths":[]}'])
    def test_bad_paths(self, body):
        with pytest.raises(StructureError):
            load_document(body)

    def test_top_level_must_be_mapping(self):
        with pytest.raises(StructureError):
            load_document("- a\n- b\n")

    def test_syntax_error_has_position(self):
        with pytest.raises(SpecSyntaxError) as info:
            load_document("openapi: 3.0.0\npaths:\n  /a: {get: [\n")
        assert info.value.line is not None and info.value.column is not None

    def test_empty_text(self):
        with pytest.raises(SpecSyntaxError):
            load_document("   ")

    def test_yaml_keys_stay_strings(self):
        text = "openapi: 3.0.0\npaths:\n  /a:\n    get:\n      responses:\n        200: {description: ok}\n        on: {}\n"
        doc = load_document(text)
        assert list(doc.root["paths"]["/a"]["get"]["responses"]) == ["200", "on"]


class TestResolve:
    def test_inlines_component(self):
        task = {"type": "object", "properties": {"title": {"type": "string"}}}
        root = {
            "openapi": "3.0.0",
            "paths": {"/t": {"get": {"schema": {"$ref": "#/components/schemas/Task"}}}},
            "components": {"schemas": {"Task": task}},
        }
        out = resolve_refs(_doc(root))
        assert out.root["paths"]["/t"]["get"]["schema"] == task
        assert out.warnings == ()
        # deep copy, not aliasing
        assert out.root["paths"]["/t"]["get"]["schema"] is not out.root["components"]["schemas"]["Task"]

    def test_input_not_mutated(self):
        root = {"openapi": "3.0.0", "paths": {}, "a": {"$ref": "#/b"}, "b": {"x": 1}}
        before = json.dumps(root)
        resolve_refs(_doc(root))
        assert json.dumps(root) == before

    def test_chained_refs(self):
        root = {"openapi": "3.0.0", "paths": {}, "a": {"$ref": "#/b"}, "b": {"$ref": "#/c"}, "c": {"v": 1}}
        assert resolve_refs(_doc(root)).root["a"] == {"v": 1}

    def test_escaped_pointer_tokens(self):
        root = {
            "openapi": "3.0.0",
            "paths": {"/x/{id}": {"get": {"v": 1}}},
            "a": {"$ref": "#/paths/~1x~1%7Bid%7D/get"},
            "b": {"$ref": "#/list/1"},
            "list": [0, {"w": 2}],
        }
        out = resolve_refs(_doc(root)).root
        assert out["a"] == {"v": 1}
        assert out["b"] == {"w": 2}

    def test_dangling(self):
        root = {"openapi": "3.0.0", "paths": {"/t": {"get": {"$ref": "#/components/schemas/Missing"}}}}
        with pytest.raises(DanglingRef, match="Missing"):
            resolve_refs(_doc(root))

    @pytest.mark.parametrize("ref", ["other.yaml#/A", "https://example.com/s.json"])
    def test_external(self, ref):
        root = {"openapi": "3.0.0", "paths": {}, "x": {"$ref": ref}}
        with pytest.raises(ExternalRefUnsupported):
            resolve_refs(_doc(root))

    def test_siblings_discarded_with_warning(self):
        root = {"openapi": "3.0.0", "paths": {}, "x": {"$ref": "#/y", "description": "d"}, "y": {"v": 1}}
        out = resolve_refs(_doc(root))
        assert out.root["x"] == {"v": 1}
        assert [w.kind for w in out.warnings] == ["RefSiblingsDiscarded"]
        assert out.warnings[0].json_pointer == "/x"

    def test_mutual_cycle_truncated_once_per_use_site(self):
        schemas = {
            "A": {"type": "object", "properties": {"b": {"$ref": "#/components/schemas/B"}, "name": {}}},
            "B": {"type": "object", "properties": {"a": {"$ref": "#/components/schemas/A"}, "size": {}}},
        }
        root = {
            "openapi": "3.0.0",
            "paths": {"/n": {"get": {"schema": {"$ref": "#/components/schemas/A"}}}},
            "components": {"schemas": schemas},
        }
        out = resolve_refs(_doc(root))
        use = out.root["paths"]["/n"]["get"]["schema"]
        assert use["properties"]["name"] == {}
        assert use["properties"]["b"]["properties"]["size"] == {}
        assert use["properties"]["b"]["properties"]["a"] == {}
        at_use_site = [w for w in out.warnings if w.json_pointer.startswith("/paths/")]
        assert [w.kind for w in at_use_site] == ["CycleTruncated"]
        assert at_use_site[0].json_pointer == "/paths/~1n/get/schema/properties/b/properties/a"
        # each component definition re-enters its own cycle exactly once
        assert len(out.warnings) == 3
        assert not _has_ref(out.root)

    def test_self_reference(self):
        root = {"openapi": "3.0.0", "paths": {}, "Node": {"properties": {"next": {"$ref": "#/Node"}}}}
        out = resolve_refs(_doc(root))
        assert out.root["Node"] == {"properties": {"next": {}}}

    def test_recursive_yaml_alias_rejected(self):
        with pytest.raises(SpecSyntaxError, match="recursive"):
            load_document("openapi: 3.0.0\npaths: {}\nloop: &a\n  - *a\n")

    def test_cyclic_python_tree_terminates(self):
        loop = []
        loop.append(loop)
        out = resolve_refs(_doc({"openapi": "3.0.0", "paths": {}, "loop": loop}))
        assert out.root["loop"] == [[]]
        assert [w.kind for w in out.warnings] == ["CycleTruncated"]

    def test_idempotent_on_tasks(self, tasks_text):
        once = resolve_refs(load_document(tasks_text))
        assert resolve_refs(once).root == once.root


# -- random reference graphs ------------------------------------------------


@st.composite
def ref_graphs(draw):
    """Documents whose schemas reference each other arbitrarily, cycles included."""
    n = draw(st.integers(1, 6))
    names = [f"S{i}" for i in range(n)]
    schemas = {}
    for name in names:
        props = {}
        for j in range(draw(st.integers(0, 3))):
            if draw(st.booleans()):
                props[f"p{j}"] = {"$ref": "#/components/schemas/" + draw(st.sampled_from(names))}
            else:
                props[f"p{j}"] = {"type": "string"}
        if draw(st.booleans()):
            schemas[name] = {"type": "array", "items": {"properties": props}}
        else:
            schemas[name] = {"type": "object", "properties": props}
    uses = draw(st.lists(st.sampled_from(names), max_size=3))
    paths = {
        f"/r{i}": {"get": {"responses": {"200": {"content": {"application/json": {"schema": {"$ref": "#/components/schemas/" + u}}}}}}}
        for i, u in enumerate(uses)
    }
    return {"openapi": "3.0.0", "paths": paths, "components": {"schemas": schemas}}


def _count_nodes(node):
    if isinstance(node, dict):
        return 1 + sum(_count_nodes(v) for v in node.values())
    if isinstance(node, list):
        return 1 + sum(_count_nodes(v) for v in node)
    return 1


@settings(max_examples=300, deadline=None)
@given(ref_graphs())
def test_random_graphs_terminate_ref_free_and_idempotent(root):
    out = resolve_refs(_doc(root))
    assert not _has_ref(out.root)
    assert "$ref" not in json.dumps(out.root)
    assert resolve_refs(out).root == out.root
    for w in out.warnings:
        assert w.kind == "CycleTruncated"
        assert pointer_get(out.root, w.json_pointer) == {}
