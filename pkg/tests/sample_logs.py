"""Shared fixture data for the test suite."""

from __future__ import annotations

import random

from orgmine.event_log import EventLog

# The worked example: (case, activity, actor), in file order
WORKED_ROWS = [
    ("1", "A", "Matt"),
    ("2", "A", "Matt"),
    ("1", "B", "Britney"),
    ("1", "E", "Matt"),
    ("2", "E", "Matt"),
    ("2", "B", "Britney"),
    ("3", "A", "Brad"),
    ("3", "E", "Matt"),
    ("4", "A", "Brad"),
    ("5", "A", "Brad"),
    ("3", "B", "Brad"),
    ("4", "B", "Britney"),
    ("4", "E", "Brad"),
    ("6", "A", "Brad"),
    ("5", "B", "Joan"),
    ("6", "C", "Joan"),
    ("5", "E", "Brad"),
    ("1", "D", "George"),
    ("6", "D", "George"),
]

PUBLISHED_MATRIX = {
    "Matt": {"A": 2, "B": 0, "C": 0, "D": 0, "E": 3},
    "Britney": {"A": 0, "B": 3, "C": 0, "D": 0, "E": 1},
    "Brad": {"A": 4, "B": 1, "C": 0, "D": 0, "E": 1},
    "Joan": {"A": 0, "B": 1, "C": 1, "D": 0, "E": 0},
    "George": {"A": 0, "B": 0, "C": 0, "D": 2, "E": 0},
}

PUBLISHED_SIMILARITY = {
    ("Matt", "Britney"): 0.263,
    ("Matt", "Brad"): 0.719,
    ("Matt", "Joan"): 0.00,
    ("Matt", "George"): 0.00,
    ("Britney", "Brad"): 0.298,
    ("Britney", "Joan"): 0.671,
    ("Britney", "George"): 0.00,
    ("Brad", "Joan"): 0.167,
    ("Brad", "George"): 0.00,
    ("Joan", "George"): 0.00,
}

# These rows yield Britney E=0 and Brad E=2, not the matrix above.
# Reassigning case 4's E to Britney realizes the published matrix exactly.
CONSISTENT_ROWS = [
    ("4", "E", "Britney") if row == ("4", "E", "Brad") else row for row in WORKED_ROWS
]

# hand-derived: normal = 5 * 1 + (1 + 0.5), one detection per listed pair at k = 2
WORKED_SUBCONTRACT = {
    ("Matt", "Britney"): 1 / 6.5,
    ("Brad", "Matt"): 1 / 6.5,
    ("Brad", "Britney"): 1 / 6.5,
    ("Brad", "Joan"): 1 / 6.5,
}


def worked_log() -> EventLog:
    return EventLog.from_triples(WORKED_ROWS)


def consistent_log() -> EventLog:
    return EventLog.from_triples(CONSISTENT_ROWS)


def worked_csv(delimiter: str = ",") -> bytes:
    lines = [delimiter.join(("CaseID", "Activity", "Actor"))]
    lines += [delimiter.join(row) for row in WORKED_ROWS]
    return ("\n".join(lines) + "\n").encode()


def rows_csv(rows, header=("case", "activity", "actor")) -> bytes:
    return ("\n".join([",".join(header)] + [",".join(r) for r in rows]) + "\n").encode()


def random_log(
    rng: random.Random, max_events: int, max_actors: int = 5, max_cases: int = 5, max_activities: int = 5
) -> EventLog:
    n = rng.randint(1, max_events)
    n_actors = rng.randint(1, max_actors)
    n_cases = rng.randint(1, max_cases)
    n_acts = rng.randint(1, max_activities)
    return EventLog.from_triples(
        (f"c{rng.randrange(n_cases)}", f"t{rng.randrange(n_acts)}", f"a{rng.randrange(n_actors)}")
        for _ in range(n)
    )
