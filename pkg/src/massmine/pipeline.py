"""Load -> resolve -> extract -> detect -> summarize, in one call."""

from __future__ import annotations

from pathlib import Path

from .detector import DetectorConfig, SpecReport, find_candidates, summarize
from .extract import ExtractionConfig, extract_model
from .loader import load_document, resolve_refs


def analyze_text(
    text: str,
    source_name: str = "<string>",
    detector: DetectorConfig | None = None,
    extraction: ExtractionConfig | None = None,
) -> SpecReport:
    detector = detector or DetectorConfig()
    extraction = extraction or ExtractionConfig()
    resolved = resolve_refs(load_document(text, source_name))
    model = extract_model(resolved, extraction)
    return summarize(find_candidates(model, detector), model, detector, extraction)


def analyze_path(path, detector=None, extraction=None, source_name=None) -> SpecReport:
    p = Path(path)
    return analyze_text(p.read_text(encoding="utf-8"), source_name or str(path), detector, extraction)
