"""Knowledge repository with the two-axis record classification
(mode: tacit/explicit, source: self/collective), the activity-to-mode
table, aggregation into design insights, and the loop-closing trigger.

Records are keyed to a product family (the rendered id of the original
product) and a generation number so the repository can answer "how much
have we learned about version N" and fire the next-generation design
trigger exactly once.
"""

from __future__ import annotations

import json
import re
from collections import Counter
from dataclasses import dataclass
from enum import Enum
from pathlib import Path

from .identity import ProductID, parse_product_id


class KnowledgeError(ValueError):
    """Base class for knowledge-layer failures."""


class EmptyFeedback(KnowledgeError):
    """Customer feedback text was empty."""


class ModeMismatch(KnowledgeError):
    """Record mode is not permitted for its activity."""


class DuplicateRecord(KnowledgeError):
    """A record id was inserted twice."""


class KnowledgeMode(str, Enum):
    TACIT = "Tacit"
    EXPLICIT = "Explicit"


class KnowledgeSource(str, Enum):
    SELF_SOURCE = "SelfSource"
    COLLECTIVE = "Collective"


class Activity(str, Enum):
    """The nine innovation-process activities that create knowledge."""

    USER_INSIGHT = "UserInsight"
    MARKET_INVESTIGATION = "MarketInvestigation"
    IDEA_CONCEPT_GENERATION = "IdeaConceptGeneration"
    PRODUCT_REQUIREMENTS = "ProductRequirements"
    ENGINEERING_DESIGN = "EngineeringDesign"
    MARKETING_LAUNCH = "MarketingLaunch"
    SALES = "Sales"
    CUSTOMER = "Customer"
    INTELLIGENT_PRODUCT = "IntelligentProduct"


_BOTH = frozenset({KnowledgeMode.TACIT, KnowledgeMode.EXPLICIT})
_EXPLICIT_ONLY = frozenset({KnowledgeMode.EXPLICIT})
_TACIT_ONLY = frozenset({KnowledgeMode.TACIT})

ACTIVITY_MODES: dict[Activity, frozenset[KnowledgeMode]] = {
    Activity.USER_INSIGHT: _BOTH,
    Activity.MARKET_INVESTIGATION: _EXPLICIT_ONLY,
    Activity.IDEA_CONCEPT_GENERATION: _BOTH,
    Activity.PRODUCT_REQUIREMENTS: _EXPLICIT_ONLY,
    Activity.ENGINEERING_DESIGN: _EXPLICIT_ONLY,
    Activity.MARKETING_LAUNCH: _BOTH,
    Activity.SALES: _BOTH,
    Activity.CUSTOMER: _BOTH,
    Activity.INTELLIGENT_PRODUCT: _TACIT_ONLY,
}

# Categories an on-product event log summary may carry, in emission order.
TACIT_CATEGORIES = ("use", "environment", "failure")


def classify_activity(activity: Activity) -> frozenset[KnowledgeMode]:
    """Modes a given activity may produce."""
    return ACTIVITY_MODES[activity]


@dataclass(frozen=True)
class KnowledgeRecord:
    """One classified observation headed for the repository."""

    record_id: str
    product_id: ProductID
    generation: int
    activity: Activity
    mode: KnowledgeMode
    source: KnowledgeSource
    payload: str
    created_at: int

    def __post_init__(self) -> None:
        if self.generation < 1:
            raise KnowledgeError(f"generation must be >= 1, got {self.generation}")
        if self.created_at < 0:
            raise KnowledgeError(f"created_at must be >= 0, got {self.created_at}")
        if self.mode not in classify_activity(self.activity):
            raise ModeMismatch(
                f"{self.mode.value} is not a permitted mode for {self.activity.value}"
            )

    @property
    def family(self) -> str:
        return self.product_id.render()

    def to_json_line(self) -> str:
        return json.dumps(
            {
                "record_id": self.record_id,
                "product_id": self.family,
                "generation": self.generation,
                "activity": self.activity.value,
                "mode": self.mode.value,
                "source": self.source.value,
                "payload": self.payload,
                "created_at": self.created_at,
            },
            separators=(",", ":"),
        )

    @classmethod
    def from_json_line(cls, line: str) -> "KnowledgeRecord":
        raw = json.loads(line)
        return cls(
            record_id=raw["record_id"],
            product_id=parse_product_id(raw["product_id"]),
            generation=raw["generation"],
            activity=Activity(raw["activity"]),
            mode=KnowledgeMode(raw["mode"]),
            source=KnowledgeSource(raw["source"]),
            payload=raw["payload"],
            created_at=raw["created_at"],
        )


@dataclass(frozen=True)
class DesignTrigger:
    """Signal that enough has been learned to start the next generation."""

    family: str
    from_generation: int
    next_generation: int


@dataclass(frozen=True)
class DesignInsight:
    """Aggregated view of one (family, generation): counts by mode plus
    issue keys ranked by frequency."""

    family: str
    generation: int
    record_count: int
    tacit_count: int
    explicit_count: int
    top_issues: tuple[str, ...]


class KnowledgeRepository:
    """Append-only record store with per-(family, generation) counting and
    one-shot trigger bookkeeping."""

    def __init__(self) -> None:
        self._records: list[KnowledgeRecord] = []
        self._ids: set[str] = set()
        self._counts: Counter[tuple[str, int]] = Counter()
        self._triggers_issued: set[tuple[str, int]] = set()

    def __len__(self) -> int:
        return len(self._records)

    @property
    def records(self) -> tuple[KnowledgeRecord, ...]:
        return tuple(self._records)

    def insert(self, record: KnowledgeRecord) -> None:
        if record.record_id in self._ids:
            raise DuplicateRecord(record.record_id)
        self._records.append(record)
        self._ids.add(record.record_id)
        self._counts[(record.family, record.generation)] += 1

    def count(self, family: str, generation: int) -> int:
        return self._counts[(family, generation)]

    def records_for(self, family: str, generation: int) -> tuple[KnowledgeRecord, ...]:
        return tuple(
            r for r in self._records
            if r.family == family and r.generation == generation
        )

    def trigger_issued(self, family: str, generation: int) -> bool:
        return (family, generation) in self._triggers_issued

    def mark_trigger_issued(self, family: str, generation: int) -> None:
        self._triggers_issued.add((family, generation))

    def save(self, path: Path | str) -> None:
        """Persist as JSON lines, one record per line, insertion order."""
        text = "".join(r.to_json_line() + "\n" for r in self._records)
        Path(path).write_text(text, encoding="utf-8")

    @classmethod
    def load(cls, path: Path | str) -> "KnowledgeRepository":
        repo = cls()
        for line in Path(path).read_text(encoding="utf-8").splitlines():
            if line.strip():
                repo.insert(KnowledgeRecord.from_json_line(line))
        return repo


def ingest_explicit(
    repo: KnowledgeRepository,
    product_id: ProductID,
    generation: int,
    feedback_text: str,
    tick: int,
    record_id: str | None = None,
) -> KnowledgeRecord:
    """Store one piece of customer feedback.

    Feedback is always an explicit, collectively-sourced Customer record.
    """
    if not feedback_text:
        raise EmptyFeedback("feedback text must be non-empty")
    record = KnowledgeRecord(
        record_id=record_id or f"kr-explicit-{len(repo):06d}",
        product_id=product_id,
        generation=generation,
        activity=Activity.CUSTOMER,
        mode=KnowledgeMode.EXPLICIT,
        source=KnowledgeSource.COLLECTIVE,
        payload=feedback_text,
        created_at=tick,
    )
    repo.insert(record)
    return record


def ingest_tacit(
    repo: KnowledgeRepository,
    peid_log_summary: dict[str, str],
    product_id: ProductID,
    generation: int,
    tick: int,
    record_id_prefix: str | None = None,
) -> list[KnowledgeRecord]:
    """Store automatically collected observations from an on-product log
    summary, one record per category present (use, environment, failure).

    All tacit records are self-sourced IntelligentProduct records. An
    empty summary yields no records.
    """
    prefix = record_id_prefix or f"kr-tacit-{len(repo):06d}"
    records: list[KnowledgeRecord] = []
    for category in TACIT_CATEGORIES:
        if category not in peid_log_summary:
            continue
        record = KnowledgeRecord(
            record_id=f"{prefix}-{category}",
            product_id=product_id,
            generation=generation,
            activity=Activity.INTELLIGENT_PRODUCT,
            mode=KnowledgeMode.TACIT,
            source=KnowledgeSource.SELF_SOURCE,
            payload=f"{category} {peid_log_summary[category]}".strip(),
            created_at=tick,
        )
        repo.insert(record)
        records.append(record)
    return records


_WORD_RE = re.compile(r"[a-z0-9]+")


def normalize_payload(payload: str) -> frozenset[str]:
    """Lowercase word-set extraction used to rank issues."""
    return frozenset(_WORD_RE.findall(payload.lower()))


def aggregate(repo: KnowledgeRepository, family: str, generation: int) -> DesignInsight:
    """Summarize one (family, generation): record counts by mode and issue
    keys ranked by descending frequency, ties broken lexicographically."""
    records = repo.records_for(family, generation)
    tacit = sum(1 for r in records if r.mode is KnowledgeMode.TACIT)
    explicit = sum(1 for r in records if r.mode is KnowledgeMode.EXPLICIT)
    freq: Counter[str] = Counter()
    for r in records:
        freq.update(normalize_payload(r.payload))
    ranked = sorted(freq.items(), key=lambda kv: (-kv[1], kv[0]))
    return DesignInsight(
        family=family,
        generation=generation,
        record_count=len(records),
        tacit_count=tacit,
        explicit_count=explicit,
        top_issues=tuple(word for word, _ in ranked),
    )


def check_loop_closure(
    repo: KnowledgeRepository, insight: DesignInsight, threshold: int
) -> DesignTrigger | None:
    """Return a trigger for the next generation once the record count
    reaches the threshold; at most one trigger per (family, generation).

    The repository remembers issued triggers, so repeated calls after the
    threshold is crossed return None.
    """
    if threshold < 1:
        raise KnowledgeError(f"threshold must be >= 1, got {threshold}")
    if insight.record_count < threshold:
        return None
    if repo.trigger_issued(insight.family, insight.generation):
        return None
    repo.mark_trigger_issued(insight.family, insight.generation)
    return DesignTrigger(
        family=insight.family,
        from_generation=insight.generation,
        next_generation=insight.generation + 1,
    )


def save_insight(insight: DesignInsight, path: Path | str) -> None:
    """Write an insight as a flat JSON summary file."""
    Path(path).write_text(
        json.dumps(
            {
                "family": insight.family,
                "generation": insight.generation,
                "record_count": insight.record_count,
                "tacit_count": insight.tacit_count,
                "explicit_count": insight.explicit_count,
                "top_issues": list(insight.top_issues),
            },
            indent=2,
        )
        + "\n",
        encoding="utf-8",
    )
