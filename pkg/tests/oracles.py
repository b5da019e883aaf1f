"""Independent reference implementations used by the tests.

Nothing here imports the detector; models are described as plain tuples
and only converted to ``ApiModel`` for the code under test.
"""

import random
from fractions import Fraction

from massmine.extract import ApiModel, AttributeRecord, Endpoint, OperationModel

KEY_POOL = ["id", "name", "titl", "owner", "statu", "role", "email", "price", "sku", "tag[].name"]
METHODS = ["GET", "POST", "PUT", "PATCH", "DELETE"]


def random_spec(rng: random.Random):
    """[(path, [(method, request_keys, response_keys), ...]), ...]"""
    spec = []
    for e in range(rng.randint(0, 6)):
        methods = rng.sample(METHODS, rng.randint(1, len(METHODS)))
        ops = []
        for m in methods:
            req = rng.sample(KEY_POOL, rng.randint(0, 8))
            res = rng.sample(KEY_POOL, rng.randint(0, 8))
            ops.append((m, req, res))
        spec.append((f"/r{e}", ops))
    return spec


def to_model(spec, name="random") -> ApiModel:
    def recs(keys, where):
        return tuple(AttributeRecord(k, k, "body", f"{where}/{i}") for i, k in enumerate(keys))

    return ApiModel(
        source_name=name,
        endpoints=tuple(
            Endpoint(path, tuple(OperationModel(m, path, None, recs(req, f"/{path}/{m}/req"), recs(res, f"/{path}/{m}/res")) for m, req, res in ops))
            for path, ops in spec
        ),
    )


def brute_force(spec, threshold=Fraction(1, 2), same_path=False):
    """Apply the three flagging conditions literally over every (GET, write) combination.

    Returns [(write_method, write_path, read_method, read_path, similarity, sorted_keys)]
    in (write position, read position) order.
    """
    flat = [(pos, path, m, req, res) for pos, (path, ops) in enumerate(spec) for m, req, res in ops]
    found = []
    for wi, (_, wpath, wm, wreq, _) in enumerate(flat):
        if wm not in ("POST", "PUT", "PATCH"):
            continue
        for ri, (_, rpath, rm, _, rres) in enumerate(flat):
            if rm != "GET":
                continue
            if same_path and rpath != wpath:
                continue
            RES, REQ = set(rres), set(wreq)
            if not len(RES) > len(REQ):
                continue
            union = RES | REQ
            sim = Fraction(len(RES & REQ), len(union)) if union else Fraction(0)
            if not sim >= threshold:
                continue
            extra = RES - (RES & REQ)
            if not extra:
                continue
            found.append((wi, ri, (wm, wpath, rm, rpath, sim, tuple(sorted(extra)))))
    found.sort(key=lambda t: (t[0], t[1]))
    return [t[2] for t in found]


def brute_counts(rows):
    """(endpoints, operations, attributes) from brute_force rows."""
    ops = {(r[0], r[1]) for r in rows}
    return (
        len({path for _, path in ops}),
        len(ops),
        len({(r[0], r[1], k) for r in rows for k in r[5]}),
    )


def as_rows(pairs):
    return [
        (p.write_op.method, p.write_op.path, p.read_op.method, p.read_op.path, p.similarity, tuple(sorted(p.candidate_keys)))
        for p in pairs
    ]
