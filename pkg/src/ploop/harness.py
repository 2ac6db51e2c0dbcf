"""Scenario files, simulation orchestration, launch metrics, and reports.

A scenario is a single versioned JSON document (top-level ``format: 1``)
declaring nodes, products, agents, routing rules, latencies, partition
windows, scripted stimuli, and engine parameters. ``run`` executes it tick
by tick and derives the report purely from the emitted event log, so a
saved log can be re-reported later and must match.

Launch accounting: a generation's launch_time is the absolute tick at
which its manufacturing step completes. A feedback-enabled run triggers
the next generation from accumulated knowledge; the paired baseline
disables that rule and starts design at the scheduled retirement instead,
so comparing the two isolates the feedback loop as the only difference.
"""

from __future__ import annotations

import json
import logging
from dataclasses import dataclass, field
from pathlib import Path
from typing import Any, Sequence

from .identity import (
    IntelligenceChannel,
    IntelligenceGranularity,
    IntelligenceLocation,
    PEIDCapability,
    SensorEvent,
    mint_product_id,
)
from .knowledge import TACIT_CATEGORIES
from .lifecycle import ComponentCondition, EOLPolicy, LifecyclePhase
from .messages import (
    KEY_CUSTOMER_FEEDBACK,
    KEY_FAULT_REPORTED,
    CustomerFeedback,
    FaultReported,
    SensorBatch,
    sensor_routing_key,
)
from .runtime import (
    EVT_DESIGN_TRIGGER,
    EVT_EOL_DECISION,
    EVT_GENERATION_LAUNCHED,
    EVT_KNOWLEDGE_INSERTED,
    EVT_MESSAGE_DROPPED,
    EVT_MIGRATION_COMPLETED,
    EVT_RUN_FINISHED,
    EVT_RUN_STARTED,
    Action,
    ActionKind,
    AgentRole,
    InvalidRoutingTable,
    LatencyMap,
    LoggedEvent,
    NodeKind,
    PartitionWindow,
    RoutingRule,
    RoutingTable,
    SimParams,
    World,
    detail_str,
    tick,
)

logger = logging.getLogger(__name__)

SCENARIO_FORMAT = 1


class ScenarioError(Exception):
    """Base class for scenario loading failures."""


class ScenarioParseError(ScenarioError):
    """File is not valid JSON; message carries line information."""


class ScenarioValidationError(ScenarioError):
    """Document parsed but violates scenario rules."""


class IncomparableRuns(Exception):
    """A report required for comparison lacks a launch time."""


# -- scenario declarations ----------------------------------------------------


@dataclass(frozen=True)
class NodeDecl:
    node_id: str
    kind: NodeKind


@dataclass(frozen=True)
class ProductDecl:
    serial: str
    uri: str
    generation: int
    phase: LifecyclePhase
    node: str
    components: tuple[ComponentCondition, ...] = ()
    capabilities: tuple[PEIDCapability, ...] = tuple(PEIDCapability)
    memory: dict[str, Any] = field(default_factory=dict)
    location_meta: IntelligenceLocation | None = None

    @property
    def rendered_id(self) -> str:
        return f"{self.serial}@{self.uri}"


@dataclass(frozen=True)
class AgentDecl:
    agent_id: str
    role: AgentRole
    home: str
    product: str | None = None
    itinerary: tuple[str, ...] = ()


@dataclass(frozen=True)
class Stimulus:
    """One scripted input; kind selects which extra fields apply."""

    tick: int
    node: str
    kind: str                      # sensor_batch | customer_feedback | fault | retirement
    product: str
    category: str = ""             # sensor_batch
    note: str = ""                 # sensor_batch
    events: tuple[dict[str, Any], ...] = ()   # sensor_batch: sensor/value/unit
    text: str = ""                 # customer_feedback
    detail: str = ""               # fault


STIMULUS_KINDS = ("sensor_batch", "customer_feedback", "fault", "retirement")


@dataclass(frozen=True)
class Scenario:
    name: str
    seed: int
    horizon: int
    nodes: tuple[NodeDecl, ...]
    products: tuple[ProductDecl, ...]
    agents: tuple[AgentDecl, ...]
    routing: RoutingTable
    latency: LatencyMap
    partitions: tuple[PartitionWindow, ...]
    stimuli: tuple[Stimulus, ...]
    params: SimParams


# -- load / save --------------------------------------------------------------


def _require(cond: bool, message: str) -> None:
    if not cond:
        raise ScenarioValidationError(message)


def _enum_value(enum_cls: Any, raw: Any, what: str) -> Any:
    try:
        return enum_cls(raw)
    except ValueError:
        choices = ", ".join(member.value for member in enum_cls)
        raise ScenarioValidationError(
            f"{what}: {raw!r} is not one of {choices}"
        ) from None


def scenario_from_dict(doc: dict[str, Any]) -> Scenario:
    _require(isinstance(doc, dict), "scenario document must be a JSON object")
    _require(doc.get("format") == SCENARIO_FORMAT,
             f"unsupported scenario format {doc.get('format')!r}, expected {SCENARIO_FORMAT}")
    name = doc.get("name")
    _require(isinstance(name, str) and bool(name), "scenario name must be a non-empty string")
    seed = doc.get("seed", 0)
    _require(isinstance(seed, int) and seed >= 0, "seed must be a non-negative integer")
    horizon = doc.get("horizon")
    _require(isinstance(horizon, int) and horizon >= 1, "horizon must be an integer >= 1")

    nodes: list[NodeDecl] = []
    node_ids: set[str] = set()
    for raw in doc.get("nodes", []):
        node_id = raw.get("id")
        _require(isinstance(node_id, str) and bool(node_id), "node id must be a non-empty string")
        _require(node_id not in node_ids, f"duplicate node id {node_id!r}")
        node_ids.add(node_id)
        nodes.append(NodeDecl(node_id, _enum_value(NodeKind, raw.get("kind"), f"node {node_id}")))
    _require(bool(nodes), "at least one node is required")

    products: list[ProductDecl] = []
    product_ids: set[str] = set()
    for raw in doc.get("products", []):
        serial, uri = raw.get("serial"), raw.get("uri")
        try:
            mint_product_id(str(serial), str(uri))
        except ValueError as exc:
            raise ScenarioValidationError(f"product {serial!r}: {exc}") from None
        node = raw.get("node")
        _require(node in node_ids, f"product {serial!r} references unknown node {node!r}")
        generation = raw.get("generation", 1)
        _require(isinstance(generation, int) and generation >= 1,
                 f"product {serial!r}: generation must be an integer >= 1")
        components = []
        for c in raw.get("components", []):
            try:
                components.append(ComponentCondition(
                    component=c["component"],
                    condition=c["condition"],
                    hazardous=bool(c.get("hazardous", False)),
                ))
            except (KeyError, ValueError) as exc:
                raise ScenarioValidationError(f"product {serial!r} component: {exc}") from None
        capabilities = tuple(
            _enum_value(PEIDCapability, c, f"product {serial!r} capability")
            for c in raw.get("capabilities", [m.value for m in PEIDCapability])
        )
        meta_raw = raw.get("intelligence_location")
        location_meta = None
        if meta_raw is not None:
            location_meta = IntelligenceLocation(
                channel=_enum_value(IntelligenceChannel, meta_raw.get("channel"),
                                    f"product {serial!r} intelligence channel"),
                granularity=_enum_value(IntelligenceGranularity, meta_raw.get("granularity"),
                                        f"product {serial!r} intelligence granularity"),
            )
        decl = ProductDecl(
            serial=str(serial),
            uri=str(uri),
            generation=generation,
            phase=_enum_value(LifecyclePhase, raw.get("phase"), f"product {serial!r} phase"),
            node=node,
            components=tuple(components),
            capabilities=capabilities,
            memory=dict(raw.get("memory", {})),
            location_meta=location_meta,
        )
        _require(decl.rendered_id not in product_ids, f"duplicate product {decl.rendered_id!r}")
        product_ids.add(decl.rendered_id)
        products.append(decl)

    agents: list[AgentDecl] = []
    agent_ids: set[str] = set()
    for raw in doc.get("agents", []):
        agent_id = raw.get("id")
        _require(isinstance(agent_id, str) and bool(agent_id), "agent id must be a non-empty string")
        _require(agent_id not in agent_ids, f"duplicate agent id {agent_id!r}")
        agent_ids.add(agent_id)
        role = _enum_value(AgentRole, raw.get("role"), f"agent {agent_id} role")
        home = raw.get("home")
        _require(home in node_ids, f"agent {agent_id!r} references unknown node {home!r}")
        product = raw.get("product")
        if product is not None:
            _require(product in product_ids,
                     f"agent {agent_id!r} references unknown product {product!r}")
        _require(role is not AgentRole.PRODUCT or product is not None,
                 f"agent {agent_id!r}: AgentProduct requires a product binding")
        itinerary = tuple(raw.get("itinerary", []))
        for stop in itinerary:
            _require(stop in node_ids,
                     f"agent {agent_id!r} itinerary references unknown node {stop!r}")
        agents.append(AgentDecl(agent_id, role, home, product, itinerary))

    rules = tuple(
        RoutingRule(pattern=raw.get("pattern", ""), recipients=tuple(raw.get("recipients", [])))
        for raw in doc.get("routing", [])
    )
    try:
        routing = RoutingTable(rules=rules)
    except InvalidRoutingTable as exc:
        raise ScenarioValidationError(f"routing: {exc}") from None

    latency_raw = doc.get("latency", {})
    pairs: dict[tuple[str, str], int] = {}
    for raw in latency_raw.get("pairs", []):
        a, b, ticks_ = raw.get("a"), raw.get("b"), raw.get("ticks")
        _require(a in node_ids and b in node_ids, f"latency pair ({a!r}, {b!r}) unknown node")
        _require(a != b, f"latency pair ({a!r}, {b!r}) must name two distinct nodes")
        _require(isinstance(ticks_, int) and ticks_ >= 1, "latency ticks must be an integer >= 1")
        key = (a, b) if a <= b else (b, a)
        _require(key not in pairs, f"duplicate latency pair ({a!r}, {b!r})")
        pairs[key] = ticks_
    default_latency = latency_raw.get("default", 1)
    _require(isinstance(default_latency, int) and default_latency >= 1,
             "default latency must be an integer >= 1")
    latency = LatencyMap(default=default_latency, pairs=pairs)

    partitions: list[PartitionWindow] = []
    for raw in doc.get("partitions", []):
        a, b = raw.get("a"), raw.get("b")
        _require(a in node_ids and b in node_ids, f"partition ({a!r}, {b!r}) unknown node")
        _require(a != b, f"partition ({a!r}, {b!r}) must name two distinct nodes")
        lo, hi = raw.get("from_tick"), raw.get("to_tick")
        _require(isinstance(lo, int) and isinstance(hi, int) and 0 <= lo <= hi,
                 f"partition ({a!r}, {b!r}) needs 0 <= from_tick <= to_tick")
        partitions.append(PartitionWindow(a=a, b=b, from_tick=lo, to_tick=hi))

    stimuli: list[Stimulus] = []
    for raw in doc.get("stimuli", []):
        kind = raw.get("kind")
        _require(kind in STIMULUS_KINDS,
                 f"stimulus kind {kind!r} is not one of {', '.join(STIMULUS_KINDS)}")
        tick_ = raw.get("tick")
        _require(isinstance(tick_, int) and 1 <= tick_ <= horizon,
                 f"stimulus tick {tick_!r} must be within 1..{horizon}")
        node = raw.get("node")
        _require(node in node_ids, f"stimulus references unknown node {node!r}")
        product = raw.get("product")
        _require(product in product_ids, f"stimulus references unknown product {product!r}")
        stim = Stimulus(
            tick=tick_,
            node=node,
            kind=kind,
            product=product,
            category=raw.get("category", ""),
            note=raw.get("note", ""),
            events=tuple(raw.get("events", [])),
            text=raw.get("text", ""),
            detail=raw.get("detail", ""),
        )
        if kind == "sensor_batch":
            _require(stim.category in TACIT_CATEGORIES,
                     f"sensor_batch category {stim.category!r} must be one of "
                     f"{', '.join(TACIT_CATEGORIES)}")
            for event in stim.events:
                _require({"sensor", "value", "unit"} <= set(event),
                         "sensor_batch events need sensor, value, and unit fields")
        if kind == "customer_feedback":
            _require(bool(stim.text), "customer_feedback requires non-empty text")
        if kind == "fault":
            _require(bool(stim.detail), "fault requires a non-empty detail")
        stimuli.append(stim)

    params_raw = doc.get("params", {})
    policy_raw = params_raw.get("eol_policy", {})
    try:
        policy = EOLPolicy(
            reuse_threshold=policy_raw.get("reuse_threshold", 0.8),
            component_threshold=policy_raw.get("component_threshold", 0.6),
            reclaim_threshold=policy_raw.get("reclaim_threshold", 0.3),
        )
        params = SimParams(
            trigger_threshold=params_raw.get("trigger_threshold", 10),
            eol_policy=policy,
            message_latency=params_raw.get("message_latency", 1),
            design_ticks=params_raw.get("design_ticks", 3),
            manufacture_ticks=params_raw.get("manufacture_ticks", 4),
            disposal_ticks=params_raw.get("disposal_ticks", 1),
            trigger_rule_enabled=bool(params_raw.get("trigger_rule_enabled", True)),
        )
    except Exception as exc:
        raise ScenarioValidationError(f"params: {exc}") from None

    return Scenario(
        name=name,
        seed=seed,
        horizon=horizon,
        nodes=tuple(nodes),
        products=tuple(products),
        agents=tuple(agents),
        routing=routing,
        latency=latency,
        partitions=tuple(partitions),
        stimuli=tuple(stimuli),
        params=params,
    )


def scenario_to_dict(scenario: Scenario) -> dict[str, Any]:
    """Canonical document form; save(load(x)) is byte-stable."""
    stimuli_docs = []
    for s in scenario.stimuli:
        raw: dict[str, Any] = {"tick": s.tick, "node": s.node, "kind": s.kind,
                               "product": s.product}
        if s.kind == "sensor_batch":
            raw["category"] = s.category
            raw["note"] = s.note
            raw["events"] = [
                {"sensor": e["sensor"], "value": e["value"], "unit": e["unit"]}
                for e in s.events
            ]
        elif s.kind == "customer_feedback":
            raw["text"] = s.text
        elif s.kind == "fault":
            raw["detail"] = s.detail
        stimuli_docs.append(raw)
    return {
        "format": SCENARIO_FORMAT,
        "name": scenario.name,
        "seed": scenario.seed,
        "horizon": scenario.horizon,
        "nodes": [{"id": n.node_id, "kind": n.kind.value} for n in scenario.nodes],
        "products": [
            {
                "serial": p.serial,
                "uri": p.uri,
                "generation": p.generation,
                "phase": p.phase.value,
                "node": p.node,
                "components": [
                    {"component": c.component, "condition": c.condition,
                     "hazardous": c.hazardous}
                    for c in p.components
                ],
                "capabilities": [c.value for c in p.capabilities],
                "memory": p.memory,
                "intelligence_location": (
                    None if p.location_meta is None else {
                        "channel": p.location_meta.channel.value,
                        "granularity": p.location_meta.granularity.value,
                    }
                ),
            }
            for p in scenario.products
        ],
        "agents": [
            {
                "id": a.agent_id,
                "role": a.role.value,
                "home": a.home,
                "product": a.product,
                "itinerary": list(a.itinerary),
            }
            for a in scenario.agents
        ],
        "routing": [
            {"pattern": r.pattern, "recipients": list(r.recipients)}
            for r in scenario.routing.rules
        ],
        "latency": {
            "default": scenario.latency.default,
            "pairs": [
                {"a": a, "b": b, "ticks": ticks_}
                for (a, b), ticks_ in sorted(scenario.latency.pairs.items())
            ],
        },
        "partitions": [
            {"a": w.a, "b": w.b, "from_tick": w.from_tick, "to_tick": w.to_tick}
            for w in scenario.partitions
        ],
        "stimuli": stimuli_docs,
        "params": {
            "trigger_threshold": scenario.params.trigger_threshold,
            "message_latency": scenario.params.message_latency,
            "design_ticks": scenario.params.design_ticks,
            "manufacture_ticks": scenario.params.manufacture_ticks,
            "disposal_ticks": scenario.params.disposal_ticks,
            "trigger_rule_enabled": scenario.params.trigger_rule_enabled,
            "eol_policy": {
                "reuse_threshold": scenario.params.eol_policy.reuse_threshold,
                "component_threshold": scenario.params.eol_policy.component_threshold,
                "reclaim_threshold": scenario.params.eol_policy.reclaim_threshold,
            },
        },
    }


def load_scenario(path: Path | str) -> Scenario:
    path = Path(path)
    try:
        text = path.read_text(encoding="utf-8")
    except OSError as exc:
        raise ScenarioParseError(f"{path}: {exc}") from None
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ScenarioParseError(f"{path}:{exc.lineno}:{exc.colno}: {exc.msg}") from None
    return scenario_from_dict(doc)


def save_scenario(scenario: Scenario, path: Path | str) -> None:
    Path(path).write_text(
        json.dumps(scenario_to_dict(scenario), indent=2) + "\n", encoding="utf-8"
    )


# -- world construction and execution ----------------------------------------


def build_world(scenario: Scenario, seed_override: int | None = None) -> World:
    seed = scenario.seed if seed_override is None else seed_override
    world = World(
        seed=seed,
        routing=scenario.routing,
        latency=scenario.latency,
        params=scenario.params,
        partitions=scenario.partitions,
    )
    world.log(
        EVT_RUN_STARTED,
        detail=detail_str(scenario=scenario.name, seed=seed, horizon=scenario.horizon),
    )
    for decl in scenario.nodes:
        world.register_node(decl.kind, decl.node_id)
    for decl in scenario.products:
        world.register_product(
            product_id=mint_product_id(decl.serial, decl.uri),
            generation=decl.generation,
            phase=decl.phase,
            components=decl.components,
            capabilities=decl.capabilities,
            memory=decl.memory,
            node=decl.node,
            location_meta=decl.location_meta,
        )
    for decl in scenario.agents:
        product_id = None
        if decl.product is not None:
            product_id = world.products[decl.product].product_id
        world.spawn_agent(
            role=decl.role,
            home=decl.home,
            product_id=product_id,
            itinerary=decl.itinerary,
            agent_id=decl.agent_id,
        )
    for stim in scenario.stimuli:
        product = world.products[stim.product]
        if stim.kind == "retirement":
            world.schedule_action(stim.tick, Action(ActionKind.RETIREMENT, product.key))
            continue
        if stim.kind == "sensor_batch":
            payload = SensorBatch(
                product_id=product.product_id,
                generation=product.generation,
                category=stim.category,
                events=tuple(
                    SensorEvent(sensor=e["sensor"], value=e["value"], unit=e["unit"],
                                sim_time=stim.tick)
                    for e in stim.events
                ),
                note=stim.note,
            )
            key = sensor_routing_key(stim.category)
        elif stim.kind == "customer_feedback":
            payload = CustomerFeedback(
                product_id=product.product_id,
                generation=product.generation,
                text=stim.text,
            )
            key = KEY_CUSTOMER_FEEDBACK
        else:
            payload = FaultReported(
                product_id=product.product_id,
                generation=product.generation,
                detail=stim.detail,
            )
            key = KEY_FAULT_REPORTED
        world.send(key, payload, sender=stim.node, origin_node=stim.node,
                   sent_at=stim.tick, deliver_at=stim.tick)
    return world


# -- reports ------------------------------------------------------------------


@dataclass(frozen=True)
class LaunchTime:
    family: str
    generation: int
    tick: int


@dataclass(frozen=True)
class RunReport:
    scenario: str
    seed: int
    total_ticks: int
    launch_times: tuple[LaunchTime, ...]
    loop_closure_latency: int | None
    knowledge_by_mode: dict[str, int]
    knowledge_by_source: dict[str, int]
    knowledge_by_activity: dict[str, int]
    eol_decisions: dict[str, int]
    dropped_messages: int
    migrations: int

    def to_dict(self) -> dict[str, Any]:
        return {
            "scenario": self.scenario,
            "seed": self.seed,
            "total_ticks": self.total_ticks,
            "launch_times": [
                {"family": lt.family, "generation": lt.generation, "tick": lt.tick}
                for lt in self.launch_times
            ],
            "loop_closure_latency": self.loop_closure_latency,
            "knowledge_by_mode": self.knowledge_by_mode,
            "knowledge_by_source": self.knowledge_by_source,
            "knowledge_by_activity": self.knowledge_by_activity,
            "eol_decisions": self.eol_decisions,
            "dropped_messages": self.dropped_messages,
            "migrations": self.migrations,
        }

    @classmethod
    def from_dict(cls, raw: dict[str, Any]) -> "RunReport":
        return cls(
            scenario=raw["scenario"],
            seed=raw["seed"],
            total_ticks=raw["total_ticks"],
            launch_times=tuple(
                LaunchTime(lt["family"], lt["generation"], lt["tick"])
                for lt in raw["launch_times"]
            ),
            loop_closure_latency=raw["loop_closure_latency"],
            knowledge_by_mode=dict(raw["knowledge_by_mode"]),
            knowledge_by_source=dict(raw["knowledge_by_source"]),
            knowledge_by_activity=dict(raw["knowledge_by_activity"]),
            eol_decisions=dict(raw["eol_decisions"]),
            dropped_messages=raw["dropped_messages"],
            migrations=raw["migrations"],
        )

    def to_text(self) -> str:
        def counts(label: str, mapping: dict[str, int]) -> str:
            if not mapping:
                return f"{label:<22}(none)"
            body = "  ".join(f"{k}={v}" for k, v in sorted(mapping.items()))
            return f"{label:<22}{body}"

        lines = [
            f"{'scenario':<22}{self.scenario}",
            f"{'seed':<22}{self.seed}",
            f"{'total ticks':<22}{self.total_ticks}",
        ]
        if self.launch_times:
            for lt in self.launch_times:
                lines.append(
                    f"{'launch':<22}generation {lt.generation} of {lt.family} "
                    f"at tick {lt.tick}"
                )
        else:
            lines.append(f"{'launch':<22}(no next generation launched)")
        closure = "(no trigger)" if self.loop_closure_latency is None \
            else f"{self.loop_closure_latency} ticks"
        lines.append(f"{'loop closure':<22}{closure}")
        lines.append(counts("knowledge by mode", self.knowledge_by_mode))
        lines.append(counts("knowledge by source", self.knowledge_by_source))
        lines.append(counts("knowledge by activity", self.knowledge_by_activity))
        lines.append(counts("eol decisions", self.eol_decisions))
        lines.append(f"{'dropped messages':<22}{self.dropped_messages}")
        lines.append(f"{'migrations':<22}{self.migrations}")
        return "\n".join(lines) + "\n"


def compute_report(log_lines: Sequence[str]) -> RunReport:
    """Derive the run report purely from serialized event-log lines."""
    scenario = ""
    seed = 0
    total_ticks = 0
    first_record_tick: int | None = None
    first_trigger_tick: int | None = None
    launch_times: list[LaunchTime] = []
    by_mode: dict[str, int] = {}
    by_source: dict[str, int] = {}
    by_activity: dict[str, int] = {}
    eol_decisions: dict[str, int] = {}
    dropped = 0
    migrations = 0

    for line in log_lines:
        if not line.strip():
            continue
        event = LoggedEvent.from_json_line(line)
        detail = json.loads(event.detail) if event.detail else {}
        if event.event_kind == EVT_RUN_STARTED:
            scenario = detail.get("scenario", "")
            seed = detail.get("seed", 0)
            total_ticks = detail.get("horizon", 0)
        elif event.event_kind == EVT_RUN_FINISHED:
            total_ticks = event.tick
        elif event.event_kind == EVT_KNOWLEDGE_INSERTED:
            if first_record_tick is None:
                first_record_tick = event.tick
            by_mode[detail["mode"]] = by_mode.get(detail["mode"], 0) + 1
            by_source[detail["source"]] = by_source.get(detail["source"], 0) + 1
            by_activity[detail["activity"]] = by_activity.get(detail["activity"], 0) + 1
        elif event.event_kind == EVT_DESIGN_TRIGGER:
            if first_trigger_tick is None:
                first_trigger_tick = event.tick
        elif event.event_kind == EVT_GENERATION_LAUNCHED:
            launch_times.append(
                LaunchTime(detail["family"], detail["generation"], event.tick)
            )
        elif event.event_kind == EVT_EOL_DECISION:
            decision = detail["decision"]
            eol_decisions[decision] = eol_decisions.get(decision, 0) + 1
        elif event.event_kind == EVT_MESSAGE_DROPPED:
            dropped += 1
        elif event.event_kind == EVT_MIGRATION_COMPLETED:
            migrations += 1

    closure = None
    if first_trigger_tick is not None and first_record_tick is not None:
        closure = first_trigger_tick - first_record_tick
    return RunReport(
        scenario=scenario,
        seed=seed,
        total_ticks=total_ticks,
        launch_times=tuple(sorted(launch_times, key=lambda lt: (lt.tick, lt.family, lt.generation))),
        loop_closure_latency=closure,
        knowledge_by_mode=dict(sorted(by_mode.items())),
        knowledge_by_source=dict(sorted(by_source.items())),
        knowledge_by_activity=dict(sorted(by_activity.items())),
        eol_decisions=dict(sorted(eol_decisions.items())),
        dropped_messages=dropped,
        migrations=migrations,
    )


@dataclass(frozen=True)
class RunResult:
    """A finished run: the world, its serialized log, and the report."""

    world: World
    log_lines: tuple[str, ...]
    report: RunReport


def run(
    scenario: Scenario,
    seed_override: int | None = None,
    out_dir: Path | str | None = None,
) -> RunResult:
    """Execute ticks 1..horizon and report from the log alone.

    Fault events inside the simulation are logged, never raised. When
    out_dir is given, the event log, both report forms, and the knowledge
    repository are written there.
    """
    world = build_world(scenario, seed_override)
    for _ in range(scenario.horizon):
        tick(world)
    world.log(EVT_RUN_FINISHED, detail=detail_str(ticks=scenario.horizon))
    log_lines = tuple(event.to_json_line() for event in world.events)
    report = compute_report(log_lines)
    if out_dir is not None:
        write_run_files(scenario.name, world, log_lines, report, out_dir)
    return RunResult(world=world, log_lines=log_lines, report=report)


def write_run_files(
    name: str,
    world: World,
    log_lines: Sequence[str],
    report: RunReport,
    out_dir: Path | str,
) -> dict[str, Path]:
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    paths = {
        "events": out / f"{name}.events.jsonl",
        "report_json": out / f"{name}.report.json",
        "report_text": out / f"{name}.report.txt",
        "repository": out / f"{name}.repository.jsonl",
    }
    paths["events"].write_text("".join(line + "\n" for line in log_lines), encoding="utf-8")
    paths["report_json"].write_text(
        json.dumps(report.to_dict(), indent=2) + "\n", encoding="utf-8"
    )
    paths["report_text"].write_text(report.to_text(), encoding="utf-8")
    record_lines = [
        record.to_json_line()
        for node in world.nodes.values()
        for record in node.repository.records
    ]
    paths["repository"].write_text(
        "".join(line + "\n" for line in record_lines), encoding="utf-8"
    )
    return paths


# -- comparison ---------------------------------------------------------------


@dataclass(frozen=True)
class ComparisonSummary:
    feedback_launch_tick: int
    baseline_launch_tick: int
    delta: int
    improvement: bool

    def to_dict(self) -> dict[str, Any]:
        return {
            "feedback_launch_tick": self.feedback_launch_tick,
            "baseline_launch_tick": self.baseline_launch_tick,
            "delta": self.delta,
            "improvement": self.improvement,
        }

    def to_text(self) -> str:
        verdict = "improvement" if self.improvement else "no improvement"
        return (
            f"feedback launch tick   {self.feedback_launch_tick}\n"
            f"baseline launch tick   {self.baseline_launch_tick}\n"
            f"delta                  {self.delta} ({verdict})\n"
        )


def compare(report_feedback: RunReport, report_baseline: RunReport) -> ComparisonSummary:
    """Quantify the launch-phase gain of the feedback run over the
    baseline; positive delta means the feedback run launched earlier."""
    if not report_feedback.launch_times:
        raise IncomparableRuns(
            f"report {report_feedback.scenario!r} has no completed launch"
        )
    if not report_baseline.launch_times:
        raise IncomparableRuns(
            f"report {report_baseline.scenario!r} has no completed launch"
        )
    feedback_tick = min(lt.tick for lt in report_feedback.launch_times)
    baseline_tick = min(lt.tick for lt in report_baseline.launch_times)
    delta = baseline_tick - feedback_tick
    return ComparisonSummary(
        feedback_launch_tick=feedback_tick,
        baseline_launch_tick=baseline_tick,
        delta=delta,
        improvement=delta > 0,
    )
