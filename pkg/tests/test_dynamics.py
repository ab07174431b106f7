import io
import itertools
import random
import statistics

import pytest

from conftest import random_records, records_of

from collabnet.clustering import CoverSet
from collabnet.dynamics import (
    MEASURES,
    AuthorCohort,
    career_stage_split,
    classify_area_launchers,
    coauthor_set,
    copublication_set,
    emit_boxplot_series,
    first_publication_years,
    intra_copublication_set,
    measure,
    publication_set,
    sample_connected_cohorts,
    sample_random_cohorts,
    seminar_cohorts,
    track_cohorts,
    typical_seminar_size,
)
from collabnet.graphs import build_authorship_graph, build_time_resolved, project_coauthorship
from collabnet.ingest import SeminarRecord


def record_oracle(records, members, which):
    """Oracle: evaluate a measure straight from the record lists."""
    present = {a for rec in records for a in rec.authors} & set(members)
    if not present:
        return None
    pubs = {rec.pub_key for rec in records if present & set(rec.authors)}
    copubs = {
        rec.pub_key
        for rec in records
        if present & set(rec.authors) and len(set(rec.authors)) >= 2
    }
    intra = {
        rec.pub_key for rec in records if len(present & set(rec.authors)) >= 2
    }
    coauthors = set()
    for rec in records:
        names = set(rec.authors)
        for a in names & present:
            coauthors.update(names - {a})
    if which == "ap":
        return len(pubs) / len(present)
    if which == "acp":
        return len(copubs) / len(present)
    if which == "aca":
        return len(coauthors) / len(present)
    if which == "cpr_intra":
        return len(intra) / len(copubs) if copubs else None
    pairs = sum(
        1
        for a, b in itertools.combinations(sorted(present), 2)
        if any({a, b} <= set(rec.authors) for rec in records)
    )
    slots = len(present) * (len(present) - 1) // 2
    return pairs / slots if slots else None


def test_publication_set_cases():
    g = build_authorship_graph(
        records_of(("p1", 2000, "", ("a",)), ("p2", 2000, "", ("a", "b")))
    )
    assert publication_set(g, {"a"}) == {"p1", "p2"}
    assert publication_set(g, {"a", "b"}) == {"p1", "p2"}  # shared pub counted once
    assert publication_set(g, {"nobody"}) == set()


def test_copublication_set_cases():
    g = build_authorship_graph(
        records_of(("solo", 2000, "", ("a",)), ("joint", 2000, "", ("a", "x")))
    )
    assert copublication_set(g, {"a"}) == {"joint"}  # solo work excluded
    # the coauthor may be outside the group
    assert copublication_set(g, {"a"}) == copublication_set(g, {"a", "x"})


def test_intra_copublication_set_cases():
    g = build_authorship_graph(
        records_of(
            ("inside", 2000, "", ("a", "b")),
            ("outside", 2000, "", ("a", "x")),
        )
    )
    group = {"a", "b"}
    assert intra_copublication_set(g, group) == {"inside"}
    assert copublication_set(g, group) == {"inside", "outside"}
    assert intra_copublication_set(g, group) <= copublication_set(g, group)


def test_coauthor_set_cases():
    g = build_authorship_graph(
        records_of(("p", 2000, "", ("a", "b")), ("q", 2000, "", ("loner",)))
    )
    assert coauthor_set(g, {"loner"}) == set()
    assert coauthor_set(g, {"a"}) == {"b"}
    assert coauthor_set(g, {"a", "b"}) == {"a", "b"}  # mutual coauthors


def test_measures_pair_with_one_joint_paper():
    g = build_authorship_graph(records_of(("p", 2000, "", ("a", "b"))))
    group = {"a", "b"}
    assert measure(g, group, "ap") == pytest.approx(0.5)
    assert measure(g, group, "acp") == pytest.approx(0.5)
    assert measure(g, group, "aca") == pytest.approx(1.0)
    assert measure(g, group, "cpr_intra") == pytest.approx(1.0)
    assert measure(g, group, "cad") == pytest.approx(1.0)


def test_measure_cad_two_of_three_pairs():
    # three tracked authors; only the pairs (a, b) and (b, c) have joint work
    g = build_authorship_graph(
        records_of(
            ("p1", 2000, "", ("a", "b")),
            ("p2", 2000, "", ("b", "c")),
            ("p3", 2000, "", ("d", "e")),
        )
    )
    assert measure(g, {"a", "b", "c"}, "cad") == pytest.approx(2 / 3)


def test_measures_present_but_inactive_members():
    g = build_authorship_graph(
        records_of(("p", 2000, "", ("x",))), authors=["a", "b", "x"]
    )
    group = {"a", "b"}
    assert measure(g, group, "ap") == 0.0
    assert measure(g, group, "acp") == 0.0
    assert measure(g, group, "aca") == 0.0
    assert measure(g, group, "cpr_intra") is None  # no copublications at all
    assert measure(g, group, "cad") == 0.0


def test_measure_undefined_markers():
    g = build_authorship_graph(records_of(("p", 2000, "", ("a", "b"))))
    assert measure(g, {"a"}, "cad") is None  # fewer than two members present
    assert measure(g, {"ghost"}, "ap") is None  # nobody present
    with pytest.raises(ValueError):
        measure(g, {"a"}, "nope")


def test_measures_match_record_oracle():
    rng = random.Random(41)
    for _ in range(300):
        records = random_records(rng, rng.randint(1, 12), rng.randint(2, 10))
        g = build_authorship_graph(records)
        pool = g.author_names + ["absent1", "absent2"]
        members = set(rng.sample(pool, rng.randint(1, min(6, len(pool)))))
        for which in MEASURES:
            got = measure(g, members, which)
            want = record_oracle(records, members, which)
            if want is None:
                assert got is None
            else:
                assert got == pytest.approx(want, abs=1e-12)


def test_measure_containment_invariants():
    rng = random.Random(43)
    for _ in range(200):
        records = random_records(rng, rng.randint(1, 10), rng.randint(2, 8))
        g = build_authorship_graph(records)
        members = set(rng.sample(g.author_names, rng.randint(1, min(5, g.author_count))))
        p = publication_set(g, members)
        cp = copublication_set(g, members)
        intra = intra_copublication_set(g, members)
        assert intra <= cp <= p
        ap = measure(g, members, "ap")
        acp = measure(g, members, "acp")
        assert acp <= ap
        cad = measure(g, members, "cad")
        if cad is not None:
            assert 0.0 <= cad <= 1.0
        cpr = measure(g, members, "cpr_intra")
        if cpr is not None:
            assert 0.0 <= cpr <= 1.0


def test_cad_one_iff_collaborative_clique():
    g = build_authorship_graph(
        records_of(("p1", 2000, "", ("a", "b", "c")), ("p2", 2000, "", ("c", "d")))
    )
    assert measure(g, {"a", "b", "c"}, "cad") == 1.0
    assert measure(g, {"a", "b", "c", "d"}, "cad") < 1.0


def test_sample_random_cohorts():
    pool = [f"a{i}" for i in range(10)]
    whole = sample_random_cohorts(pool, 10, 1, seed=3)[0]
    assert set(whole.members) == set(pool)
    again = sample_random_cohorts(pool, 4, 3, seed=5)
    repeat = sample_random_cohorts(pool, 4, 3, seed=5)
    assert [c.members for c in again] == [c.members for c in repeat]
    assert all(len(c.members) == 4 for c in again)
    with pytest.raises(ValueError):
        sample_random_cohorts(pool, 11, 1, seed=1)


def test_random_cohort_cad_tracks_projection_density():
    rng = random.Random(47)
    records = random_records(rng, 120, 40, max_per_pub=3)
    g = build_authorship_graph(records)
    ga = project_coauthorship(g)
    n = ga.node_count
    density = 2 * ga.edge_count / (n * (n - 1))
    cohorts = sample_random_cohorts(g.author_names, 10, 150, seed=7)
    values = [measure(g, c.members, "cad") for c in cohorts]
    assert abs(statistics.mean(values) - density) < 0.03


def test_sample_connected_cohorts_clique():
    g = build_authorship_graph(records_of(("p", 2000, "", ("a", "b", "c", "d"))))
    cohorts = sample_connected_cohorts(g, 4, 2, seed=1)
    for cohort in cohorts:
        assert set(cohort.members) == {"a", "b", "c", "d"}


def test_sample_connected_cohorts_restarts_across_components():
    # two components of 2 authors each; a cohort of 3 must span both
    g = build_authorship_graph(
        records_of(("p1", 2000, "", ("a", "b")), ("p2", 2000, "", ("c", "d")))
    )
    cohort = sample_connected_cohorts(g, 3, 1, seed=2)[0]
    assert len(cohort.members) == 3
    assert cohort.members & {"a", "b"}
    assert cohort.members & {"c", "d"}


def test_sample_connected_cohorts_deterministic_and_bounded():
    rng = random.Random(53)
    records = random_records(rng, 60, 30)
    g = build_authorship_graph(records)
    a = sample_connected_cohorts(g, 8, 5, seed=11)
    b = sample_connected_cohorts(g, 8, 5, seed=11)
    assert [c.members for c in a] == [c.members for c in b]
    with pytest.raises(ValueError):
        sample_connected_cohorts(g, g.author_count + 1, 1, seed=1)


def test_connected_cohorts_have_higher_mean_degree_than_random():
    # skewed collaboration graph: a few prolific authors, many occasional ones
    rng = random.Random(59)
    names = [f"a{i}" for i in range(60)]
    records = []
    for i in range(250):
        k = rng.randint(2, 4)
        # preferential flavor: low indices appear much more often
        authors = {names[min(59, int(60 * rng.random() ** 2.5))] for _ in range(k)}
        if len(authors) < 2:
            continue
        records.append(
            records_of((f"p{i}", 2000, "", tuple(sorted(authors))))[0]
        )
    g = build_authorship_graph(records)
    ga = project_coauthorship(g)
    idx = {name: i for i, name in enumerate(ga.author_names)}

    def mean_degree(cohorts):
        degrees = [
            ga.degree(idx[name]) for c in cohorts for name in c.members
        ]
        return statistics.mean(degrees)

    connected = sample_connected_cohorts(g, 10, 100, seed=61)
    randoms = sample_random_cohorts(g.author_names, 10, 100, seed=61)
    assert mean_degree(connected) > mean_degree(randoms)


def test_seminar_cohorts_and_typical_size():
    rows = []
    for i in range(6):
        rows.append(SeminarRecord("s1", 2004, f"att{i}", True))
    for i in range(6):
        rows.append(SeminarRecord("s1", 2004, f"abs{i}", False))
    rows.append(SeminarRecord("s2", 2005, "att0", True))
    rows.append(SeminarRecord("s2", 2005, "abs0", False))  # too few absentees
    known = {f"att{i}" for i in range(6)} | {f"abs{i}" for i in range(6)}
    cohorts = seminar_cohorts(rows, known, min_absentees=5)
    by_id = {c.cohort_id: c for c in cohorts}
    assert set(by_id) == {"attendees:s1", "absentees:s1", "attendees:s2"}
    assert by_id["attendees:s1"].anchor_year == 2004
    assert len(by_id["absentees:s1"].members) == 6
    assert typical_seminar_size(cohorts) == round(statistics.median([6, 1]))


def test_classify_area_launchers():
    cover = CoverSet(sets={"confA": {"a", "b", "c"}, "confB": {"x", "y", "z"}})
    invitees = {
        "embedded": {"a", "b"},  # contained in confA
        "outsider": {"q", "r"},  # disjoint from every conference
        "mixed": {"a", "x", "q", "r"},
    }
    scores = classify_area_launchers(invitees, cover, threshold=0.2)
    assert [s.seminar_id for s in scores] == ["outsider", "mixed", "embedded"]
    by_id = {s.seminar_id: s for s in scores}
    assert by_id["embedded"].max_overlap == 1.0
    assert not by_id["embedded"].is_candidate
    assert by_id["outsider"].max_overlap == 0.0
    assert by_id["outsider"].is_candidate
    assert by_id["embedded"].best_conference == "confA"
    everything = classify_area_launchers(invitees, cover, threshold=1.1)
    assert all(s.is_candidate for s in everything)
    with pytest.raises(ValueError):
        classify_area_launchers(invitees, CoverSet(sets={}), 0.2)


def test_classify_area_launchers_skips_empty(caplog):
    cover = CoverSet(sets={"confA": {"a"}})
    with caplog.at_level("WARNING"):
        scores = classify_area_launchers({"empty": set(), "ok": {"a"}}, cover)
    assert [s.seminar_id for s in scores] == ["ok"]


def test_track_solo_author_series():
    records = records_of(
        ("other1", 2000, "", ("x",)),
        ("mine", 2002, "", ("solo",)),
        ("other2", 2004, "", ("x",)),
    )
    seq = build_time_resolved(records, 1, 1)
    cohort = AuthorCohort("c", "all", frozenset({"solo"}), None)
    (series,) = track_cohorts(seq, [cohort], ["ap"])
    points = dict(series.points)
    assert points[2000] is None  # not yet a node
    assert points[2001] == 1.0  # window [2001, 2002] holds the publication
    assert points[2002] == 1.0  # window [2002, 2003] still holds it
    assert points[2003] == 0.0  # node exists, no publications
    assert points[2004] == 0.0


def test_track_alignment_offsets():
    records = records_of(
        *[(f"p{y}", y, "", ("a", "b")) for y in range(2000, 2006)]
    )
    seq = build_time_resolved(records, 1, 1)
    cohort = AuthorCohort("att", "attendees", frozenset({"a", "b"}), 2002)
    (series,) = track_cohorts(seq, [cohort], ["cad"])
    years = [year for year, _ in series.points]
    assert years == [-2, -1, 0, 1, 2, 3]
    assert years == sorted(years)


def test_track_absent_cohort_empty_series(caplog):
    records = records_of(("p", 2000, "", ("a",)))
    seq = build_time_resolved(records, 1, 1)
    ghost = AuthorCohort("g", "attendees", frozenset({"ghost"}), 2000)
    with caplog.at_level("WARNING"):
        series = track_cohorts(seq, [ghost], ["ap"])
    assert all(s.points == [] for s in series)
    assert any("no member" in m for m in caplog.messages)


def test_track_preserves_undefined_markers():
    records = records_of(
        ("solo", 2000, "", ("a",)),
        ("pair", 2003, "", ("a", "b")),
    )
    seq = build_time_resolved(records, 1, 1)
    cohort = AuthorCohort("c", "all", frozenset({"a", "b"}), None)
    (series,) = track_cohorts(seq, [cohort], ["cpr_intra"])
    points = dict(series.points)
    assert points[2000] is None  # solo publication only: no copublications
    assert points[2003] == 1.0  # the joint paper is internal to the pair


def test_track_stationary_stream_is_flat():
    # constant per-year output: every year each author pair publishes once
    records = []
    for year in range(2000, 2010):
        for i in range(0, 30, 2):
            records.extend(
                records_of((f"p{year}_{i}", year, "", (f"a{i}", f"a{i+1}")))
            )
    seq = build_time_resolved(records, 1, 1)
    everyone = AuthorCohort("all", "all", frozenset(f"a{i}" for i in range(30)), None)
    (series,) = track_cohorts(seq, [everyone], ["ap"])
    interior = [v for _, v in series.points[1:-1]]
    assert max(interior) - min(interior) < 1e-9


def test_career_stage_split_boundaries():
    first = {"fresh": 2010, "edge5": 2005, "edge15": 1995, "old": 1994}
    early, mid, late = career_stage_split(first.keys(), first, reference_year=2010)
    assert early == {"fresh", "edge5"}
    assert mid == {"edge15"}
    assert late == {"old"}


def test_career_stage_split_excludes_unknown(caplog):
    first = {"known": 2000, "future": 2015}
    with caplog.at_level("WARNING"):
        early, mid, late = career_stage_split(
            {"known", "future", "ghost"}, first, reference_year=2010
        )
    assert early | mid | late == {"known"}
    assert any("excluded" in m for m in caplog.messages)


def test_first_publication_years():
    records = records_of(
        ("p1", 2005, "", ("a", "b")),
        ("p2", 2001, "", ("b",)),
    )
    assert first_publication_years(records) == {"a": 2005, "b": 2001}


def test_emit_boxplot_series_shapes():
    series = [
        MeasureSeriesStub(cid, "attendees", "ap", [(-1, 0.5), (0, None), (1, 1.0)])
        for cid in ("c1", "c2")
    ]
    buffer = io.StringIO()
    rows = emit_boxplot_series(series, buffer)
    lines = buffer.getvalue().strip().splitlines()
    assert rows == 6
    assert len(lines) == 7  # header + 6 data rows
    assert lines[0] == "cohort_class,measure,relative_year,cohort_id,value"
    assert "attendees,ap,0,c1,NA" in lines

    empty = io.StringIO()
    assert emit_boxplot_series([], empty) == 0
    assert empty.getvalue().strip().splitlines() == [
        "cohort_class,measure,relative_year,cohort_id,value"
    ]


class MeasureSeriesStub:
    def __init__(self, cohort_id, label, measure_name, points):
        self.cohort_id = cohort_id
        self.label = label
        self.measure = measure_name
        self.points = points
