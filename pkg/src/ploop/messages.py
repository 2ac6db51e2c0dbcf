"""Message payload variants spoken between agents and the runtime.

Everything here is a plain value; payloads reference products by their
ProductID and never hold runtime state. The full payload union also
includes KnowledgeRecord and DesignTrigger from the knowledge layer.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Union

from .identity import ProductID, SensorEvent
from .knowledge import DesignTrigger, KnowledgeRecord

# Routing keys stamped on payloads generated inside the simulation.
KEY_SENSOR_PREFIX = "sensor."          # sensor.<category>
KEY_CUSTOMER_FEEDBACK = "feedback.customer"
KEY_FAULT_REPORTED = "fault.reported"
KEY_SERVICE_ORDER = "service.order"
KEY_KNOWLEDGE_RECORD = "knowledge.record"
KEY_DESIGN_TRIGGER = "design.trigger"


@dataclass(frozen=True)
class SensorBatch:
    """A readout of on-product sensor events, tagged with the tacit
    category it evidences (use, environment, failure)."""

    product_id: ProductID
    generation: int
    category: str
    events: tuple[SensorEvent, ...]
    note: str = ""


@dataclass(frozen=True)
class CustomerFeedback:
    product_id: ProductID
    generation: int
    text: str


@dataclass(frozen=True)
class FaultReported:
    product_id: ProductID
    generation: int
    detail: str


@dataclass(frozen=True)
class ServiceOrder:
    product_id: ProductID
    generation: int
    detail: str


Payload = Union[
    SensorBatch,
    CustomerFeedback,
    FaultReported,
    ServiceOrder,
    KnowledgeRecord,
    DesignTrigger,
]


@dataclass(frozen=True)
class Message:
    """A routed payload in flight between agents.

    Ids, timestamps, and the origin node are stamped by the runtime;
    latency is never negative, so delivery cannot precede sending.
    """

    msg_id: str
    sender: str
    routing_key: str
    payload: Payload
    sent_at: int
    deliver_at: int
    origin_node: str

    def __post_init__(self) -> None:
        if self.deliver_at < self.sent_at:
            raise ValueError(
                f"deliver_at {self.deliver_at} precedes sent_at {self.sent_at}"
            )


def payload_kind(payload: Payload) -> str:
    return type(payload).__name__


def sensor_routing_key(category: str) -> str:
    return f"{KEY_SENSOR_PREFIX}{category}"
