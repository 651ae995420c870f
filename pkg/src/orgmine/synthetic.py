"""Seeded synthetic event logs shaped loosely like an incident-management log."""

from __future__ import annotations

import numpy as np

from .event_log import Event, EventLog


def synthetic_log(
    n_events: int,
    n_actors: int = 250,
    n_activities: int = 40,
    mean_case_length: float = 8.0,
    team_size: int = 3,
    open_cases: int = 20,
    seed: int = 0,
) -> EventLog:
    """Generate ``n_events`` events spread over interleaved cases.

    Each case draws a small team from a skewed actor population, so actors
    recur inside cases and sub-contracting patterns occur. Up to
    ``open_cases`` cases are in flight at once, which interleaves their rows.
    """
    if n_events < 1:
        raise ValueError("n_events must be >= 1")
    rng = np.random.default_rng(seed)
    actor_weights = 1.0 / np.arange(1, n_actors + 1) ** 0.8
    actor_weights /= actor_weights.sum()
    activity_weights = 1.0 / np.arange(1, n_activities + 1) ** 0.6
    activity_weights /= activity_weights.sum()

    activities = rng.choice(n_activities, size=n_events, p=activity_weights)
    events: list[Event] = []
    active: list[list] = []  # [case_id, remaining, team]
    next_case = 0

    def open_case() -> list:
        nonlocal next_case
        length = max(1, int(rng.poisson(mean_case_length)))
        team = rng.choice(n_actors, size=team_size, replace=False, p=actor_weights)
        next_case += 1
        return [f"C{next_case:07d}", length, team]

    while len(events) < n_events:
        while len(active) < open_cases:
            active.append(open_case())
        slot = int(rng.integers(len(active)))
        case = active[slot]
        actor = int(case[2][rng.integers(team_size)])
        activity = int(activities[len(events)])
        events.append(Event(case[0], f"ACT{activity:03d}", f"G{actor:03d}", len(events)))
        case[1] -= 1
        if case[1] == 0:
            active.pop(slot)
    return EventLog.from_events(events)
