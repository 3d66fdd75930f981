"""Step machine: schedule, u-stream, step semantics, validation, verify."""

import itertools

import pytest

from addbasis import (
    INF,
    AmbientSpec,
    DilationFiniteError,
    FiniteSet,
    GroupSpec,
    NaturalsAdd,
    NoDecompositionError,
    NonnegativeMax,
    SearchBoundError,
    Summand,
    TargetFunction,
    TargetFunctionError,
    TrivialSemigroup,
    UStream,
    new_state,
    next_u,
    restricted_rep_fn,
    run,
    schedule_targets,
    step_restricted,
    step_unrestricted,
    validate,
    verify,
)

Z = GroupSpec([Summand(0, 1)])
TRIV_Z = AmbientSpec(TrivialSemigroup(), Z)
MAX_Z = AmbientSpec(NonnegativeMax(), Z)


def take(gen, n):
    return list(itertools.islice(gen, n))


# -- target functions ---------------------------------------------------------


def test_target_value_precedence():
    f = TargetFunction(
        TRIV_Z, default=1,
        overrides={(0, 5): 3, (0, 7): 0, (0, 2): INF},
        zero_fibers=[4, 5],
    )
    assert f.value((0, 5)) == 3      # override beats the zero fiber
    assert f.value((0, 4)) == 0      # fiber beats the default
    assert f.value((0, 7)) == 0
    assert f.value((0, 2)) == INF
    assert f.value((0, 9)) == 1
    assert f.effective_zero_fibers == {4, 5, 7}


def test_target_rejects_bad_values():
    with pytest.raises(TargetFunctionError):
        TargetFunction(TRIV_Z, default=-1)
    with pytest.raises(TargetFunctionError):
        TargetFunction(TRIV_Z, overrides={(0, 1): 2.5})


def test_target_json_round_trip():
    f = TargetFunction(
        TRIV_Z, default=2, overrides={(0, 5): INF, (0, -1): 0}, zero_fibers=[3]
    )
    doc = f.to_json()
    g = TargetFunction.from_json(TRIV_Z, doc)
    assert g.default == 2
    assert g.overrides == f.overrides
    assert g.zero_fibers == f.zero_fibers
    assert doc["default"] == 2
    assert [json_v for _, json_v in doc["overrides"]].count("inf") == 1


# -- schedule ------------------------------------------------------------------


def test_schedule_all_ones_follows_enumeration():
    f = TargetFunction(TRIV_Z, default=1)
    assert take(schedule_targets(f), 5) == [
        (0, 0), (0, 1), (0, -1), (0, 2), (0, -2)
    ]


def test_schedule_zero_never_appears():
    f = TargetFunction(TRIV_Z, default=1, zero_fibers=[0])
    got = take(schedule_targets(f), 50)
    assert (0, 0) not in got
    assert got[:4] == [(0, 1), (0, -1), (0, 2), (0, -2)]


def test_schedule_respects_multiplicities():
    f = TargetFunction(TRIV_Z, default=1, overrides={(0, 1): 3, (0, 0): 2})
    got = take(schedule_targets(f), 200)
    assert got.count((0, 1)) == 3
    assert got.count((0, 0)) == 2
    assert got.count((0, 5)) == 1


def test_schedule_interleaves_infinite_targets():
    a, b = (0, 0), (0, 1)
    f = TargetFunction(TRIV_Z, default=0, overrides={a: INF, b: INF})
    got = take(schedule_targets(f), 9)
    assert got == [a, b, a, b, a, b, a, b, a]


def test_schedule_prefix_counts_never_exceed_f():
    f = TargetFunction(TRIV_Z, default=2, overrides={(0, 0): 1})
    got = take(schedule_targets(f), 300)
    for i in range(len(got)):
        prefix = got[: i + 1]
        for x in set(prefix):
            assert prefix.count(x) <= f.value(x)


def test_schedule_finite_carrier_terminates():
    F8 = GroupSpec([Summand(2, 3)])
    amb = AmbientSpec(TrivialSemigroup(), F8)
    f = TargetFunction(amb, default=2)
    got = list(schedule_targets(f))
    assert len(got) == 16
    assert all(got.count(x) == 2 for x in set(got))


# -- u-stream ------------------------------------------------------------------


def test_ustream_excludes_zero_set():
    s = UStream(Z, excluded={0, 1})
    first = [s.take() for _ in range(4)]
    assert first == [-1, 2, -2, 3]
    assert s.skipped_zero_set == 2


def test_ustream_distinct_doubles_in_torsion():
    G4 = GroupSpec([Summand(4, None)])
    s = UStream(G4)
    seen = [s.take() for _ in range(40)]
    doubles = [G4.add(e, e) for e in seen]
    assert len(set(doubles)) == len(doubles)
    assert s.skipped_double > 0


# -- next_u / step examples ----------------------------------------------------


def test_next_u_empty_state_takes_first_candidate():
    problem = validate(TRIV_Z, TargetFunction(TRIV_Z, default=1), "restricted")
    state = new_state(problem)
    assert next_u(state, (0, 5)) == 0


def test_next_u_zero_fiber_skips_stream_elements():
    f = TargetFunction(TRIV_Z, default=1, zero_fibers=[0])
    state = new_state(validate(TRIV_Z, f, "restricted"))
    # stream skips 0; candidate 1 passes all rules against an empty basis
    assert next_u(state, (0, 0)) == 1


def test_step_restricted_first_step_example():
    problem = validate(TRIV_Z, TargetFunction(TRIV_Z, default=1), "restricted")
    state = new_state(problem)
    step_restricted(state, (0, 5))
    assert sorted(state.B) == [(0, 0), (0, 5)]
    assert state.counts[(0, 5)] == 1
    assert state.audit[0]["action"] == "added"
    assert state.audit[0]["u"] == []  # u = 0


def test_step_restricted_skips_saturated_target():
    problem = validate(TRIV_Z, TargetFunction(TRIV_Z, default=1), "restricted")
    state = new_state(problem)
    step_restricted(state, (0, 5))
    size = len(state.B)
    # (0, 5) now has one representation; f = 1, so the next occurrence skips
    with pytest.raises(ValueError):
        step_restricted(state, (0, 5))  # scheduled beyond f(x)
    # a different target whose count is already satisfied: build it
    f2 = TargetFunction(TRIV_Z, default=2)
    state2 = new_state(validate(TRIV_Z, f2, "restricted"))
    step_restricted(state2, (0, 5))
    step_restricted(state2, (0, 5))
    assert state2.counts[(0, 5)] == 2
    assert len(state2.B) == 4


def test_step_rejected_candidates_recorded():
    f = TargetFunction(TRIV_Z, default=1)
    state = new_state(validate(TRIV_Z, f, "restricted"))
    step_restricted(state, (0, 0))  # u = 0 fails c1 (2u = g); u = 1 accepted
    rec = state.audit[0]
    assert rec["candidates_rejected"] == 1
    assert rec["rejected_by_condition"] == {"c1": 1}
    assert rec["rejected_samples"] == [{"u": [], "condition": "c1"}]
    assert state.counts[(0, 0)] == 1
    assert sorted(state.B) == [(0, -1), (0, 1)]


def test_new_sums_have_count_one():
    f = TargetFunction(TRIV_Z, default=INF)
    state = new_state(validate(TRIV_Z, f, "restricted"))
    for x in take(schedule_targets(f), 12):
        before = dict(state.counts)
        step_restricted(state, x)
        for s, c in state.counts.items():
            if s not in before:
                assert c == 1
            elif s != x:
                assert c == before[s]


def test_validate_counterexample_naturals_plus():
    amb = AmbientSpec(NaturalsAdd(), Z)
    f = TargetFunction(amb, default=1)
    with pytest.raises(NoDecompositionError) as exc:
        validate(amb, f, "restricted")
    assert exc.value.witness == 1


def test_validate_dilation_finite_rejection():
    g = GroupSpec([Summand(2, None), Summand(5, 1)])
    amb = AmbientSpec(TrivialSemigroup(), g)
    f = TargetFunction(amb, default=1)
    with pytest.raises(DilationFiniteError) as exc:
        validate(amb, f, "restricted")
    assert exc.value.decision.finite
    assert exc.value.decision.decomposition["finite_part"] == [5]
    # unrestricted mode checks 12*G instead
    g12 = GroupSpec([Summand(3, None)])
    amb12 = AmbientSpec(TrivialSemigroup(), g12)
    f12 = TargetFunction(amb12, default=1)
    with pytest.raises(DilationFiniteError):
        validate(amb12, f12, "unrestricted")
    validate(amb12, f12, "restricted")  # 2*(Gamma3^inf) is infinite: fine


def test_validate_accepts_theorem_two_setting():
    assert validate(TRIV_Z, TargetFunction(TRIV_Z, default=1), "restricted")
    g = GroupSpec([Summand(0, 1), Summand(2, None)])
    amb = AmbientSpec(TrivialSemigroup(), g)
    assert validate(amb, TargetFunction(amb, default=1), "restricted")


def test_validate_default_zero_infinite_carrier():
    f = TargetFunction(TRIV_Z, default=0, overrides={(0, 1): 1})
    with pytest.raises(TargetFunctionError):
        validate(TRIV_Z, f, "restricted")


def test_run_zero_steps():
    f = TargetFunction(TRIV_Z, default=1)
    res = run(TRIV_Z, f, "restricted", 0)
    assert len(res.basis) == 0
    assert res.report.entries == ()
    assert res.report.cap_respected


def test_run_small_end_to_end_oracle():
    f = TargetFunction(TRIV_Z, default=1)
    res = run(TRIV_Z, f, "restricted", 50)
    assert res.report.targets_met and res.report.cap_respected
    assert not res.report.has_exceeded
    # oracle recount: every scheduled target has exactly one representation
    for x in res.report.entries:
        assert restricted_rep_fn(res.basis, x.x) == 1
    # and the incremental table matches a full recount
    from addbasis import full_rep_table

    assert res.state.counts == full_rep_table(res.basis, restricted=True).entries


def test_run_respects_zero_fiber():
    f = TargetFunction(TRIV_Z, default=1, zero_fibers=[0])
    res = run(TRIV_Z, f, "restricted", 60)
    assert restricted_rep_fn(res.basis, (0, 0)) == 0
    assert res.report.targets_met


def test_run_infinite_targets_keep_growing():
    f = TargetFunction(TRIV_Z, default=1, overrides={(0, 0): INF})
    res = run(TRIV_Z, f, "restricted", 40)
    assert restricted_rep_fn(res.basis, (0, 0)) >= 5
    assert res.report.cap_respected


def test_run_finite_override_exact():
    f = TargetFunction(TRIV_Z, default=1, overrides={(0, 3): 4})
    res = run(TRIV_Z, f, "restricted", 80)
    assert restricted_rep_fn(res.basis, (0, 3)) == 4
    assert res.report.targets_met


def test_unrestricted_small_run():
    f = TargetFunction(TRIV_Z, default=1)
    res = run(TRIV_Z, f, "unrestricted", 40)
    assert res.report.targets_met and res.report.cap_respected
    from addbasis import rep_fn

    for x in res.report.entries:
        assert rep_fn(res.basis, x.x) == 1


def test_unrestricted_infinite_default():
    f = TargetFunction(TRIV_Z, default=INF)
    res = run(TRIV_Z, f, "unrestricted", 30)
    assert res.report.cap_respected
    assert len(res.basis) > 0


def test_unrestricted_nontrivial_semigroup():
    f = TargetFunction(MAX_Z, default=1)
    res = run(MAX_Z, f, "unrestricted", 30)
    assert res.report.targets_met and res.report.cap_respected


def test_fast_and_generic_paths_agree():
    f = TargetFunction(TRIV_Z, default=1)
    a = run(TRIV_Z, f, "restricted", 60)
    b = run(TRIV_Z, f, "restricted", 60, accel=False)
    assert a.basis == b.basis
    assert a.audit == b.audit
    au = run(TRIV_Z, f, "unrestricted", 40)
    bu = run(TRIV_Z, f, "unrestricted", 40, accel=False)
    assert au.basis == bu.basis
    f0 = TargetFunction(TRIV_Z, default=1, zero_fibers=[0, 2])
    a0 = run(TRIV_Z, f0, "restricted", 50)
    b0 = run(TRIV_Z, f0, "restricted", 50, accel=False)
    assert a0.basis == b0.basis and a0.audit == b0.audit


def test_nontrivial_semigroup_split_rides_along():
    f = TargetFunction(MAX_Z, default=1)
    res = run(MAX_Z, f, "restricted", 40)
    assert res.report.targets_met
    # every step's added pair carries s' = s'' = s_n ((N0, max) splits s = s+s)
    for rec in res.audit:
        if rec["action"] == "added":
            s_target = rec["target"][0]
            assert rec["added"][0][0] == s_target
            assert rec["added"][1][0] == s_target


def test_cross_check_runs_clean():
    f = TargetFunction(TRIV_Z, default=1)
    res = run(TRIV_Z, f, "restricted", 50, cross_check=True)
    assert res.state.discrepancies == 0
    saw_sample = False
    for rec in res.audit:
        if rec["action"] == "added":
            assert rec["cross_check"]["accepted_recount_ok"]
            if rec["cross_check"]["rejected_sampled"]:
                saw_sample = True
                for item in rec["cross_check"]["rejected_sampled"]:
                    assert "recount_ok" in item
    assert saw_sample


def test_search_bound_error():
    f = TargetFunction(TRIV_Z, default=1)
    with pytest.raises(SearchBoundError) as exc:
        run(TRIV_Z, f, "restricted", 40, search_bound=3)
    assert exc.value.census


def test_determinism_in_process():
    f = TargetFunction(TRIV_Z, default=1)
    r1 = run(TRIV_Z, f, "restricted", 60)
    r2 = run(TRIV_Z, f, "restricted", 60)
    assert r1.basis == r2.basis
    assert r1.audit == r2.audit
    assert r1.report == r2.report


# -- verify --------------------------------------------------------------------


def test_verify_detects_tampering():
    f = TargetFunction(TRIV_Z, default=1)
    res = run(TRIV_Z, f, "restricted", 30)
    window = FiniteSet(TRIV_Z, [e.x for e in res.report.entries])
    # deleting one element drops some target to pending
    smaller = FiniteSet(TRIV_Z, res.basis.elements[1:])
    rep = verify(smaller, f, window, "restricted")
    assert any(e.status == "pending" for e in rep.entries)
    assert not rep.targets_met


def test_verify_flags_exceeded():
    f = TargetFunction(TRIV_Z, default=1)
    bad = FiniteSet(TRIV_Z, [(0, 0), (0, 1), (0, 2), (0, 3)])
    window = FiniteSet(TRIV_Z, [(0, 3)])
    rep = verify(bad, f, window, "restricted")
    assert rep.entries[0].achieved == 2  # {0,3} and {1,2}
    assert rep.entries[0].status == "exceeded"
    assert not rep.cap_respected


def test_verify_empty_basis():
    f = TargetFunction(TRIV_Z, default=1, zero_fibers=[0])
    window = FiniteSet(TRIV_Z, [(0, 0), (0, 1)])
    rep = verify(FiniteSet(TRIV_Z, []), f, window, "restricted")
    statuses = {tuple(e.x): e.status for e in rep.entries}
    assert statuses[(0, 0)] == "met"      # f = 0 there
    assert statuses[(0, 1)] == "pending"


def test_verify_matches_run_report():
    f = TargetFunction(TRIV_Z, default=1)
    res = run(TRIV_Z, f, "restricted", 40)
    window = FiniteSet(TRIV_Z, [e.x for e in res.report.entries])
    rep = verify(res.basis, f, window, "restricted", scheduled=res.state.scheduled)
    assert rep == res.report
