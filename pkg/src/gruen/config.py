"""Metric configuration: every tunable constant, with file round-tripping.

Defaults are the fixed constants the score was designed around; any of them
can be overridden through a JSON config document with one section per
scoring stage (see ``DEFAULT_SECTIONS``).
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field, fields, replace
from pathlib import Path


@dataclass(frozen=True)
class StubConfig:
    """Constant probabilities for the deterministic stub backend."""

    token_prob: float = 0.5
    acceptability: float = 0.5
    sop: float = 0.5


@dataclass(frozen=True)
class MetricConfig:
    # grammaticality: combination weights for likelihood and acceptance
    grammar_likelihood_weight: float = 0.5
    grammar_acceptance_weight: float = 0.5
    # redundancy: per-feature trigger thresholds and per-trigger penalty
    redundancy_threshold_a: float = 0.8
    redundancy_threshold_b: float = 0.8
    redundancy_threshold_c: float = 0.6
    redundancy_threshold_d: float = 0.8
    redundancy_penalty: float = 0.1
    # focus: adjacent-pair similarity threshold and penalty
    focus_similarity_threshold: float = 0.05
    focus_penalty: float = 0.1
    focus_wms_variant: str = "inverse"  # "inverse" (1/(1+d)) or "exponential" (exp(-d))
    # coherence: loss weight and probability clamp
    coherence_weight: float = 0.1
    coherence_prob_clamp: float = 1e-6
    # final combination clamp
    clamp_low: float = 0.0
    clamp_high: float = 1.0
    # stub backend constants (inline section, used when scoring with the stub)
    stub: StubConfig = field(default_factory=StubConfig)

    def __post_init__(self):
        weights = self.grammar_likelihood_weight + self.grammar_acceptance_weight
        if abs(weights - 1.0) > 1e-9:
            raise ValueError("grammar weights must sum to 1, got %r" % weights)
        for name in (
            "redundancy_threshold_a",
            "redundancy_threshold_b",
            "redundancy_threshold_c",
            "redundancy_threshold_d",
            "focus_similarity_threshold",
        ):
            value = getattr(self, name)
            if not 0.0 < value < 1.0:
                raise ValueError("%s must lie in (0, 1), got %r" % (name, value))
        for name in ("redundancy_penalty", "focus_penalty", "coherence_weight"):
            if getattr(self, name) < 0.0:
                raise ValueError("%s must be >= 0" % name)
        if self.focus_wms_variant not in ("inverse", "exponential"):
            raise ValueError("unknown wms variant %r" % self.focus_wms_variant)
        if self.clamp_low >= self.clamp_high:
            raise ValueError("clamp bounds out of order")

    def override(self, **changes) -> "MetricConfig":
        return replace(self, **changes)


# Section layout of the config document: section name -> (file key, config field).
DEFAULT_SECTIONS: dict[str, dict[str, str]] = {
    "grammar": {
        "likelihood_weight": "grammar_likelihood_weight",
        "acceptance_weight": "grammar_acceptance_weight",
    },
    "redundancy": {
        "threshold_a": "redundancy_threshold_a",
        "threshold_b": "redundancy_threshold_b",
        "threshold_c": "redundancy_threshold_c",
        "threshold_d": "redundancy_threshold_d",
        "penalty": "redundancy_penalty",
    },
    "focus": {
        "similarity_threshold": "focus_similarity_threshold",
        "penalty": "focus_penalty",
        "wms_variant": "focus_wms_variant",
    },
    "coherence": {
        "weight": "coherence_weight",
        "prob_clamp": "coherence_prob_clamp",
    },
    "combine": {
        "clamp_low": "clamp_low",
        "clamp_high": "clamp_high",
    },
}


def config_to_dict(config: MetricConfig) -> dict:
    doc: dict = {}
    for section, mapping in DEFAULT_SECTIONS.items():
        doc[section] = {key: getattr(config, attr) for key, attr in mapping.items()}
    doc["stub"] = {
        "token_prob": config.stub.token_prob,
        "acceptability": config.stub.acceptability,
        "sop": config.stub.sop,
    }
    return doc


def config_from_dict(doc: dict) -> MetricConfig:
    kwargs: dict = {}
    for section, mapping in DEFAULT_SECTIONS.items():
        present = doc.get(section, {})
        if not isinstance(present, dict):
            raise ValueError("config section %r must be a mapping" % section)
        for key, attr in mapping.items():
            if key in present:
                kwargs[attr] = present[key]
        unknown = set(present) - set(mapping)
        if unknown:
            raise ValueError(
                "unknown keys in config section %r: %s" % (section, sorted(unknown))
            )
    stub_doc = doc.get("stub", {})
    known_stub = {f.name for f in fields(StubConfig)}
    unknown = set(stub_doc) - known_stub
    if unknown:
        raise ValueError("unknown keys in config section 'stub': %s" % sorted(unknown))
    kwargs["stub"] = StubConfig(**stub_doc)
    unknown_sections = set(doc) - set(DEFAULT_SECTIONS) - {"stub"}
    if unknown_sections:
        raise ValueError("unknown config sections: %s" % sorted(unknown_sections))
    return MetricConfig(**kwargs)


def load_config(path: str | Path) -> MetricConfig:
    with open(path, encoding="utf-8") as handle:
        return config_from_dict(json.load(handle))


def save_config(config: MetricConfig, path: str | Path) -> None:
    with open(path, "w", encoding="utf-8") as handle:
        json.dump(config_to_dict(config), handle, indent=2, sort_keys=True)
        handle.write("\n")
