#!/usr/bin/env python3
"""The extended-EOL phase machine and the disposition ladder.

Drives one product from design to disposal (including a repair loop in
the extended end-of-life), then sweeps component conditions to show how
the six disposition outcomes tile the input space.
"""

from ploop.lifecycle import (
    ComponentCondition,
    EOLPolicy,
    IllegalTransition,
    LifecycleEvent,
    advance,
    decide_eol,
    initial_state,
)

# --- one product's life ------------------------------------------------------

script = [
    LifecycleEvent.DESIGN_COMPLETE,
    LifecycleEvent.MANUFACTURED,
    LifecycleEvent.DELIVERED,          # delivery enters the extended EOL
    LifecycleEvent.FAULT_REPORTED,     # first garage visit
    LifecycleEvent.REPAIRED,
    LifecycleEvent.FAULT_REPORTED,     # the loop is unbounded
    LifecycleEvent.REPAIRED,
    LifecycleEvent.RETIREMENT_REQUESTED,
    LifecycleEvent.DISPOSITION_EXECUTED,
]

phase = initial_state()
print(f"{'':<24}{phase.value}")
for event in script:
    phase = advance(phase, event)
    print(f"{event.value:<24}{phase.value}")

try:
    advance(phase, LifecycleEvent.REPAIRED)
except IllegalTransition as exc:
    print("no resurrection:        ", exc)

# --- the disposition ladder ---------------------------------------------------

policy = EOLPolicy(reuse_threshold=0.8, component_threshold=0.6,
                   reclaim_threshold=0.3)
print(f"\npolicy: reuse>={policy.reuse_threshold} "
      f"component>={policy.component_threshold} "
      f"reclaim>={policy.reclaim_threshold}")

cases = {
    "like new": [("battery", 0.95, False), ("chassis", 0.9, False)],
    "one good part": [("battery", 0.9, False), ("chassis", 0.1, False)],
    "uneven wear": [("battery", 0.58, False), ("chassis", 0.2, False),
                    ("board", 0.2, False)],
    "uniform wear": [("battery", 0.4, False), ("chassis", 0.4, False)],
    "scrap, clean": [("battery", 0.1, False), ("chassis", 0.05, False)],
    "scrap, hazardous": [("battery", 0.1, True), ("chassis", 0.05, False)],
}
for label, parts in cases.items():
    conditions = [ComponentCondition(*p) for p in parts]
    decision = decide_eol(conditions, policy)
    print(f"  {label:<18} -> {decision.value}")

# --- sweep the mean condition -------------------------------------------------

print("\nmean-condition sweep (two equal components, no hazard)")
for tenths in range(0, 11, 2):
    value = tenths / 10
    conditions = [ComponentCondition("a", value), ComponentCondition("b", value)]
    print(f"  condition {value:>4.1f} -> {decide_eol(conditions, policy).value}")
