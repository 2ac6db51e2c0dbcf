"""Behavior rules for the five agent roles.

Agents are deterministic rule tables: ``handle`` maps (state, message,
node context) to a new state plus a list of effects, and mutates nothing
itself. The runtime owns all side effects; an agent's knowledge emissions,
sends, memory writes, and migrations only happen when the runtime applies
the returned effects.

Role summary:
  AgentProduct   shadows one physical product (same id); turns sensor
                 batches into tacit records and tracks counters.
  AgentService   reacts to fault reports with a service order for the
                 repair garage plus a tacit service record.
  AgentCustomer  turns interactive customer feedback into explicit,
                 collectively-sourced records.
  AgentImpact    watches environment-tagged sensor batches and emits
                 tacit impact records.
  AgentKnowledge keeps the repository: inserts every record it is routed
                 and fires the one-shot design trigger for the next
                 generation when the threshold is crossed.
"""

from __future__ import annotations

from dataclasses import dataclass, field, replace
from enum import Enum
from typing import Any, Collection, Mapping, Union

from .identity import ProductID
from .knowledge import (
    Activity,
    DesignTrigger,
    KnowledgeMode,
    KnowledgeRecord,
    KnowledgeRepository,
    KnowledgeSource,
)
from .messages import (
    KEY_DESIGN_TRIGGER,
    KEY_SERVICE_ORDER,
    CustomerFeedback,
    FaultReported,
    Message,
    Payload,
    SensorBatch,
    ServiceOrder,
    payload_kind,
)


class AgentError(ValueError):
    """Base class for agent behavior failures."""


class UnhandledMessage(AgentError):
    """The role has no rule for this payload kind."""


class UnknownNode(AgentError):
    """Itinerary head is not a registered node."""


class AgentRole(str, Enum):
    PRODUCT = "AgentProduct"
    SERVICE = "AgentService"
    CUSTOMER = "AgentCustomer"
    IMPACT = "AgentImpact"
    KNOWLEDGE = "AgentKnowledge"


@dataclass(frozen=True)
class AgentState:
    """Complete migratable state of one agent.

    product_id is mandatory for AgentProduct (the agent and the physical
    product share an id) and optional elsewhere. The itinerary lists nodes
    still to visit; the runtime pops entries on arrival.
    """

    agent_id: str
    role: AgentRole
    location: str
    product_id: ProductID | None = None
    memory: Mapping[str, Any] = field(default_factory=dict)
    itinerary: tuple[str, ...] = ()

    def __post_init__(self) -> None:
        if self.role is AgentRole.PRODUCT and self.product_id is None:
            raise AgentError("AgentProduct requires a product_id")


# Effects are inert data; the runtime interprets them.


@dataclass(frozen=True)
class SendMessage:
    """Ask the runtime to publish a payload under a routing key. The
    runtime stamps ids, timestamps, and the origin node."""

    routing_key: str
    payload: Payload


@dataclass(frozen=True)
class EmitKnowledge:
    """Submit a record to the knowledge repository. Applied as a direct
    insert when the emitter is the repository keeper (AgentKnowledge);
    forwarded as a routed knowledge.record message otherwise."""

    record: KnowledgeRecord


@dataclass(frozen=True)
class RequestMigration:
    target: str


@dataclass(frozen=True)
class UpdateMemory:
    key: str
    value: Any


Effect = Union[SendMessage, EmitKnowledge, RequestMigration, UpdateMemory, None]


@dataclass(frozen=True)
class NodeContext:
    """Read-only view of the hosting node handed to handlers."""

    node_id: str
    tick: int
    repository: KnowledgeRepository
    trigger_threshold: int = 10
    trigger_rule_enabled: bool = True


def _tacit_record(
    agent: AgentState, msg_id: str, batch: SensorBatch, tick: int
) -> KnowledgeRecord:
    return KnowledgeRecord(
        record_id=f"kr-{agent.agent_id}-{msg_id}",
        product_id=batch.product_id,
        generation=batch.generation,
        activity=Activity.INTELLIGENT_PRODUCT,
        mode=KnowledgeMode.TACIT,
        source=KnowledgeSource.SELF_SOURCE,
        payload=f"{batch.category} {batch.note}".strip(),
        created_at=tick,
    )


def _handle_product(
    agent: AgentState, message: Message, ctx: NodeContext
) -> list[Effect]:
    payload = message.payload
    if isinstance(payload, SensorBatch):
        if not payload.events:
            return []
        seen = agent.memory.get("events_seen", 0) + len(payload.events)
        return [
            UpdateMemory("events_seen", seen),
            EmitKnowledge(_tacit_record(agent, message.msg_id, payload, ctx.tick)),
        ]
    if isinstance(payload, ServiceOrder):
        # Acknowledge the repair order; the runtime advances the phase.
        count = agent.memory.get("service_orders_seen", 0) + 1
        return [UpdateMemory("service_orders_seen", count)]
    raise UnhandledMessage(f"AgentProduct has no rule for {payload_kind(payload)}")


def _handle_service(
    agent: AgentState, message: Message, ctx: NodeContext
) -> list[Effect]:
    payload = message.payload
    if isinstance(payload, FaultReported):
        order = ServiceOrder(
            product_id=payload.product_id,
            generation=payload.generation,
            detail=payload.detail,
        )
        record = KnowledgeRecord(
            record_id=f"kr-{agent.agent_id}-{message.msg_id}",
            product_id=payload.product_id,
            generation=payload.generation,
            activity=Activity.INTELLIGENT_PRODUCT,
            mode=KnowledgeMode.TACIT,
            source=KnowledgeSource.SELF_SOURCE,
            payload=f"service {payload.detail}".strip(),
            created_at=ctx.tick,
        )
        return [SendMessage(KEY_SERVICE_ORDER, order), EmitKnowledge(record)]
    raise UnhandledMessage(f"AgentService has no rule for {payload_kind(payload)}")


def _handle_customer(
    agent: AgentState, message: Message, ctx: NodeContext
) -> list[Effect]:
    payload = message.payload
    if isinstance(payload, CustomerFeedback):
        record = KnowledgeRecord(
            record_id=f"kr-{agent.agent_id}-{message.msg_id}",
            product_id=payload.product_id,
            generation=payload.generation,
            activity=Activity.CUSTOMER,
            mode=KnowledgeMode.EXPLICIT,
            source=KnowledgeSource.COLLECTIVE,
            payload=payload.text,
            created_at=ctx.tick,
        )
        return [EmitKnowledge(record)]
    raise UnhandledMessage(f"AgentCustomer has no rule for {payload_kind(payload)}")


def _handle_impact(
    agent: AgentState, message: Message, ctx: NodeContext
) -> list[Effect]:
    payload = message.payload
    if isinstance(payload, SensorBatch):
        if payload.category != "environment" or not payload.events:
            return []
        return [EmitKnowledge(_tacit_record(agent, message.msg_id, payload, ctx.tick))]
    raise UnhandledMessage(f"AgentImpact has no rule for {payload_kind(payload)}")


def _handle_knowledge(
    agent: AgentState, message: Message, ctx: NodeContext
) -> list[Effect]:
    payload = message.payload
    if isinstance(payload, KnowledgeRecord):
        effects: list[Effect] = [EmitKnowledge(payload)]
        family = payload.family
        generation = payload.generation
        # Count includes the record being inserted by the effect above.
        count_after = ctx.repository.count(family, generation) + 1
        guard = f"trigger_sent:{family}:g{generation}"
        if (
            ctx.trigger_rule_enabled
            and count_after >= ctx.trigger_threshold
            and not agent.memory.get(guard)
        ):
            trigger = DesignTrigger(
                family=family,
                from_generation=generation,
                next_generation=generation + 1,
            )
            effects.append(SendMessage(KEY_DESIGN_TRIGGER, trigger))
            effects.append(UpdateMemory(guard, True))
        return effects
    raise UnhandledMessage(f"AgentKnowledge has no rule for {payload_kind(payload)}")


_HANDLERS = {
    AgentRole.PRODUCT: _handle_product,
    AgentRole.SERVICE: _handle_service,
    AgentRole.CUSTOMER: _handle_customer,
    AgentRole.IMPACT: _handle_impact,
    AgentRole.KNOWLEDGE: _handle_knowledge,
}


def handle(
    agent: AgentState, message: Message, ctx: NodeContext
) -> tuple[AgentState, list[Effect]]:
    """Dispatch one delivered message to the agent's role rules.

    Pure: returns the (possibly unchanged) state and the effects to apply.
    Raises UnhandledMessage when the role has no rule for the payload
    kind; the runtime logs that and leaves the agent untouched.
    """
    effects = _HANDLERS[agent.role](agent, message, ctx)
    return agent, effects


def plan_migration(agent: AgentState, directory: Collection[str]) -> Effect:
    """Next hop from the itinerary, or None when there is nowhere to go.

    The head must be a registered node; the runtime pops it on arrival.
    """
    if not agent.itinerary:
        return None
    head = agent.itinerary[0]
    if head not in directory:
        raise UnknownNode(f"itinerary head {head!r} is not registered")
    if head == agent.location:
        return None
    return RequestMigration(head)


def apply_memory(agent: AgentState, key: str, value: Any) -> AgentState:
    """Copy-on-write memory update used by the runtime for UpdateMemory."""
    memory = dict(agent.memory)
    memory[key] = value
    return replace(agent, memory=memory)
