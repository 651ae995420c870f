from __future__ import annotations

import random

import numpy as np
import pytest

from orgmine.backends import (
    ENGINES,
    SIMILAR_TASK_PHASES,
    SUB_CONTRACT_PHASES,
    GraphEngine,
    TabularEngine,
    make_engine,
)
from orgmine.backends.graph import NODE_BYTES, PROPERTY_BYTES, RELATIONSHIP_BYTES, GraphStore
from orgmine.backends.tabular import Column, Table
from orgmine.errors import EmptyLog, NotLoaded, WrongMode
from orgmine.event_log import EventLog
from orgmine.metrics import SubContractParams, similar_task_log, sub_contract_log
from sample_logs import PUBLISHED_SIMILARITY, WORKED_SUBCONTRACT, consistent_log, random_log, worked_log

ENGINE_NAMES = sorted(ENGINES)
XYX = EventLog.from_triples([("1", "A", "x"), ("1", "B", "y"), ("1", "A", "x")])


# -- tabular engine ----------------------------------------------------------------


def test_organised_table_is_case_ordered():
    engine = TabularEngine("subcontract").load(worked_log())
    org = engine.tables["organiseddata"]
    ids = [row[org.col("id")] for row in org.rows]
    assert ids == list(range(1, 20))
    case_col = org.col("case_id")
    assert [row[case_col] for row in org.rows[:4]] == ["1"] * 4
    actor_col = org.col("actor")
    assert [row[actor_col] for row in org.rows[:4]] == ["Matt", "Britney", "Matt", "George"]


def test_aamatrix_matt_row():
    engine = TabularEngine("similar").load(worked_log())
    aam = engine.tables["aamatrix"]
    names = [c.name for c in aam.columns]
    row = aam.lookup("Matt")
    assert dict(zip(names[1:], row[1:])) == {"A": 2, "B": 0, "E": 3, "C": 0, "D": 0}


def test_table_storage_rule():
    t = Table("t", [Column("id", "INT"), Column("name", "VARCHAR", 5), Column("v", "DOUBLE")], primary_key="id")
    t.insert((1, "abc", 0.5))
    t.insert((2, "de", 1.5))
    assert t.data_bytes() == 2 * (4 + 6 + 8)
    assert t.index_bytes() == 2 * (4 + 8)
    with pytest.raises(ValueError):
        t.insert((1, "dup", 0.0))


def test_tabular_storage_xyx():
    engine = TabularEngine("subcontract").load(XYX)
    # id INT + three VARCHAR(1): 4 + 3 * 2 = 10 bytes per row, PK index 12 per row
    assert engine.storage_report().parts == {"dataset": 66, "organiseddata": 66}
    engine.build_sub_contract()
    # performer VARCHAR(1) + two DOUBLE columns; PK index (2 + 8) per row
    assert engine.storage_report().parts["resulttable"] == 2 * 18 + 2 * 10


# -- graph engine ------------------------------------------------------------------


def test_graph_similar_load_shape():
    engine = GraphEngine("similar").load(worked_log())
    store = engine.store
    assert len(store.nodes_with_label("Actor")) == 5
    assert len(store.nodes_with_label("Activity")) == 5
    matt = store.merge_node("Actor", "name", "Matt")
    e = store.merge_node("Activity", "name", "E")
    rel = store.find_rel(matt, "PERFORMS", e)
    assert rel is not None and rel.props["times"] == 3


def test_graph_performs_sum_equals_event_count():
    for seed in range(20):
        log = random_log(random.Random(seed), 60)
        store = GraphEngine("similar").load(log).store
        total = sum(r.props["times"] for r in store.rels.values() if r.type == "PERFORMS")
        assert total == len(log)


def test_graph_case_occids():
    store = GraphEngine("subcontract").load(worked_log()).store
    case1 = store.merge_node("Case", "name", "1")
    persons = [r.end for r in case1.out if r.type == "CONTAINS"]
    assert [p.props["OccID"] for p in persons] == [0, 1, 2, 3]
    assert [p.props["name"] for p in persons] == ["Matt", "Britney", "Matt", "George"]


def test_graph_xyx_related_to():
    engine = GraphEngine("subcontract").load(XYX)
    s = engine.build_sub_contract()
    related = [r for r in engine.store.rels.values() if r.type == "RELATED_TO"]
    assert len(related) == 1
    assert related[0].props == {"value": 1, "length": 2}
    assert (related[0].start.props["name"], related[0].end.props["name"]) == ("x", "y")
    assert s.value("x", "y") == 1.0


def test_graph_distinct_activity_flag_gives_zero_matrix():
    engine = GraphEngine("subcontract").load(XYX)
    s = engine.build_sub_contract(SubContractParams(require_distinct_activities=True))
    assert not s.values.any()
    assert not [r for r in engine.store.rels.values() if r.type == "RELATED_TO"]


def test_graph_storage_rule():
    engine = GraphEngine("subcontract").load(XYX)
    report = engine.storage_report()
    store = engine.store
    assert report.parts == {
        "nodes": NODE_BYTES * len(store.nodes),
        "relationships": RELATIONSHIP_BYTES * len(store.rels),
        "properties": PROPERTY_BYTES * store.property_count(),
    }
    engine.build_sub_contract()
    # 1 Case + 3 Person + 2 UniqueActor; 3 CONTAINS + 1 RELATED_TO + 1 SUBCONTRACT;
    # Case{name,occ} + 3 * Person{name,OccID,activity} + RELATED_TO{value,length}
    # + 2 * UniqueActor{name} + SUBCONTRACT{strength}
    assert engine.storage_report().total == 6 * 15 + 5 * 33 + 16 * 41


def test_graph_store_edges_and_props():
    store = GraphStore()
    a = store.create_node("N", name="a")
    b = store.create_node("N", name="b", extra=1)
    store.create_rel("R", a, b, w=1)
    store.create_rel("R", b, a)
    assert store.property_count() == 4
    assert store.find_rel(b, "R", a, directed=True) is not None
    store.delete_rels("R")
    assert not store.rels and not a.out and not b.inc
    store.delete_nodes("N")
    assert not store.nodes


def test_empty_engine_storage_is_zero():
    for name in ENGINE_NAMES:
        assert make_engine(name).storage_report().total == 0


# -- shared engine contract ------------------------------------------------------


@pytest.mark.parametrize("name", ENGINE_NAMES)
def test_not_loaded(name):
    with pytest.raises(NotLoaded):
        make_engine(name).build_similar_task()
    with pytest.raises(NotLoaded):
        make_engine(name).build_sub_contract()


@pytest.mark.parametrize("name", ENGINE_NAMES)
def test_wrong_mode(name):
    with pytest.raises(WrongMode):
        make_engine(name, "similar").load(XYX).build_sub_contract()
    with pytest.raises(WrongMode):
        make_engine(name, "subcontract").load(XYX).build_similar_task()


@pytest.mark.parametrize("name", ENGINE_NAMES)
def test_empty_log_rejected(name):
    with pytest.raises(EmptyLog):
        make_engine(name).load(EventLog.from_events([]))


def test_unknown_engine_and_mode():
    with pytest.raises(ValueError):
        make_engine("columnar")
    with pytest.raises(ValueError):
        make_engine("graph", "both")


@pytest.mark.parametrize("name", ENGINE_NAMES)
def test_phase_coverage(name):
    engine = make_engine(name).load(worked_log())
    engine.build_similar_task()
    assert [t.phase for t in engine.phase_timings()] == ["load", *SIMILAR_TASK_PHASES]
    engine.build_sub_contract()
    assert [t.phase for t in engine.phase_timings()] == ["load", *SUB_CONTRACT_PHASES]
    assert all(t.duration_ns >= 0 for t in engine.phase_timings())


@pytest.mark.parametrize("name", ENGINE_NAMES)
def test_repeated_builds_are_identical(name):
    engine = make_engine(name).load(worked_log())
    params = SubContractParams(beta=0.25, depth=3)
    first_st = engine.build_similar_task()
    first_sc = engine.build_sub_contract(params)
    for _ in range(3):
        assert np.array_equal(engine.build_similar_task().values, first_st.values)
        assert np.array_equal(engine.build_sub_contract(params).values, first_sc.values)
    # a different parameter set in between does not leak into the next build
    engine.build_sub_contract(SubContractParams(beta=1.0))
    assert np.array_equal(engine.build_sub_contract(params).values, first_sc.values)


@pytest.mark.parametrize("name", ENGINE_NAMES)
def test_reload_replaces_state(name):
    engine = make_engine(name).load(XYX)
    engine.build_sub_contract()
    engine.load(worked_log())
    assert engine.build_sub_contract().max_abs_diff(sub_contract_log(worked_log())) == 0.0


@pytest.mark.parametrize("name", ENGINE_NAMES)
def test_published_similarity_values(name):
    s = make_engine(name, "similar").load(consistent_log()).build_similar_task()
    for (a, b), expected in PUBLISHED_SIMILARITY.items():
        assert s.value(a, b) == pytest.approx(expected, abs=1e-3)
        assert s.value(b, a) == pytest.approx(expected, abs=1e-3)


@pytest.mark.parametrize("name", ENGINE_NAMES)
def test_worked_subcontract_values(name):
    s = make_engine(name, "subcontract").load(worked_log()).build_sub_contract()
    assert s.normalizer == 6.5
    for (a, b), expected in WORKED_SUBCONTRACT.items():
        assert s.value(a, b) == pytest.approx(expected, abs=1e-12)


@pytest.mark.parametrize("name", ["tabular", "graph"])
def test_cross_engine_on_random_logs(name):
    rng = random.Random(1234)
    for _ in range(40):
        log = random_log(rng, 80)
        params = SubContractParams(
            beta=rng.choice([0.0, 0.25, 0.5, 1.0]),
            depth=rng.randint(1, 6),
            require_distinct_activities=rng.random() < 0.5,
            loop_bounds=rng.choice(["exclusive", "inclusive", "unbounded"]),
        )
        engine = make_engine(name).load(log)
        assert engine.build_similar_task().max_abs_diff(similar_task_log(log)) <= 1e-9
        sc = engine.build_sub_contract(params)
        assert sc.max_abs_diff(sub_contract_log(log, params)) <= 1e-9
