"""Static mining of OpenAPI 3 documents for mass-assignment candidates.

Write operations (POST/PUT/PATCH) are paired with GET operations whose
response attributes are similar; attributes that only the GET returns are
reported as read-only candidates.
"""

__version__ = "0.1.0"

from .canonical import canonical_key, tokenize  # noqa: E402
from .stemmer import porter_stem  # noqa: E402
from .loader import (  # noqa: E402
    DanglingRef,
    ExternalRefUnsupported,
    SpecError,
    SpecSyntaxError,
    StructureError,
    UnsupportedVersion,
    load_document,
    resolve_refs,
)
from .extract import ExtractionConfig, extract_model, flatten_schema  # noqa: E402
from .detector import (  # noqa: E402
    CandidatePair,
    DetectorConfig,
    SpecReport,
    find_candidates,
    jaccard_similarity,
    summarize,
)
from .report import aggregate, export_downstream, render_report, render_summary  # noqa: E402
from .pipeline import analyze_path, analyze_text  # noqa: E402
