import itertools
import random

import pytest
from hypothesis import given, settings, strategies as st

from plconf.engine import (
    Backbone,
    DecisionState,
    Outcome,
    PartialConfiguration,
    Provenance,
    backbone,
    check_full,
    enumerate_valid,
    is_valid,
    propagate,
)
from plconf.model import UnknownFeatureError, parse_model

from gen import random_model
from oracle import completions, features_of, mask_of, valid_masks, valid_sets

SEL = DecisionState.SELECTED
REJ = DecisionState.REJECTED
UND = DecisionState.UNDECIDED


def texts(violations):
    return [v.describe() for v in violations]


# --------------------------------------------------------------------------
# check_full


class TestCheckFull:
    def test_valid_configuration(self, fig1_model):
        assert check_full(fig1_model, {"F1", "F3", "F4", "F9"}) == []

    def test_empty_selection_blames_root_only(self, fig1_model):
        assert texts(check_full(fig1_model, set())) == ["root(F1)"]

    def test_child_without_parent(self, fig1_model):
        vs = check_full(fig1_model, {"F1", "F3", "F4", "F9", "F7"})
        assert texts(vs) == ["parent(F7,F2)"]

    def test_missing_mandatory(self, fig1_model):
        vs = check_full(fig1_model, {"F1", "F3", "F9"})
        assert texts(vs) == ["mandatory(F1,F4)"]

    def test_rejected_parent_not_double_reported(self, fig1_model):
        # F3 absent while its group member is selected: the parent link is
        # the finding; the group under the rejected parent stays quiet.
        vs = check_full(fig1_model, {"F1", "F4", "F9"})
        assert texts(vs) == ["parent(F9,F3)", "mandatory(F1,F3)"]

    def test_requires(self, fig1_model):
        vs = check_full(fig1_model, {"F1", "F3", "F4", "F9", "F6"})
        assert texts(vs) == ["requires(F6,F12)"]

    def test_excludes(self, fig1_model):
        vs = check_full(fig1_model, {"F1", "F2", "F3", "F4", "F9", "F8"})
        assert texts(vs) == ["excludes(F2,F8)"]

    def test_group_over_upper(self, fig1_model):
        vs = check_full(fig1_model, {"F1", "F3", "F4", "F9", "F10"})
        assert texts(vs) == ["group(F3,1..1)"]

    def test_group_under_lower(self, fig1_model):
        vs = check_full(fig1_model, {"F1", "F3", "F4"})
        assert texts(vs) == ["group(F3,1..1)"]

    def test_violations_in_declaration_order(self, fig1_model):
        vs = check_full(fig1_model, {"F1", "F2", "F6", "F8", "F9", "F10"})
        assert texts(vs) == [
            "parent(F9,F3)",
            "parent(F10,F3)",
            "mandatory(F1,F3)",
            "mandatory(F1,F4)",
            "requires(F6,F12)",
            "excludes(F2,F8)",
        ]

    def test_unknown_feature_raises(self, fig1_model):
        with pytest.raises(UnknownFeatureError):
            check_full(fig1_model, {"F1", "Ghost"})

    def test_witness_states(self, fig1_model):
        (v,) = check_full(fig1_model, {"F1", "F3", "F4", "F9", "F6"})
        assert v.kind == "requires"
        assert v.features == ("F6", "F12")
        assert dict(v.witness) == {"F6": SEL, "F12": REJ}

    def test_is_valid_matches_check_full(self, dell_model, dell_catalog):
        for entry in dell_catalog.entries:
            assert is_valid(dell_model, entry.features) == (
                not check_full(dell_model, entry.features)
            )

    def test_dell_catalog_verdicts(self, dell_model, dell_catalog):
        by_id = {
            e.config_id: texts(check_full(dell_model, e.features))
            for e in dell_catalog.entries
        }
        assert by_id == {
            "C1.1": ["excludes(Mininotebook,DVD_ROM_DRIVE)"],
            "C1.2": ["excludes(Mininotebook,IntelCore2Duo)"],
            "C1.3": [],
            "C1.4": [],
        }


# --------------------------------------------------------------------------
# PartialConfiguration


class TestPartialConfiguration:
    def test_root_starts_selected(self, fig1_model):
        c = PartialConfiguration(fig1_model)
        assert c.state("F1") is SEL
        assert c.provenance("F1") is Provenance.ROOT
        assert c.state("F5") is UND
        assert c.provenance("F5") is None

    def test_root_is_immutable(self, fig1_model):
        c = PartialConfiguration(fig1_model)
        with pytest.raises(ValueError):
            c.set_user("F1", REJ)

    def test_set_and_clear(self, fig1_model):
        c = PartialConfiguration(fig1_model)
        c.set_user("F5", SEL)
        assert c.user_decisions() == {"F5": SEL}
        c.clear_user("F5")
        assert c.user_decisions() == {}
        assert c.state("F5") is UND

    def test_unknown_feature(self, fig1_model):
        c = PartialConfiguration(fig1_model)
        with pytest.raises(UnknownFeatureError):
            c.set_user("Ghost", SEL)

    def test_clone_is_independent(self, fig1_model):
        c = PartialConfiguration(fig1_model)
        c.set_user("F5", SEL)
        d = c.clone()
        d.set_user("F6", SEL)
        assert c.state("F6") is UND
        assert d.state("F5") is SEL


# --------------------------------------------------------------------------
# propagate


class TestPropagate:
    def test_mandatory_closure_from_root(self, fig1_model):
        c = PartialConfiguration(fig1_model)
        r = propagate(c)
        assert r.outcome is Outcome.CONSISTENT
        assert dict(r.derived) == {"F3": SEL, "F4": SEL}
        assert c.provenance("F3") is Provenance.PROPAGATED

    def test_requires_forward(self, fig1_model):
        c = PartialConfiguration(fig1_model, {"F6": SEL})
        propagate(c)
        assert c.state("F12") is SEL

    def test_requires_contrapositive(self, fig1_model):
        c = PartialConfiguration(fig1_model, {"F12": REJ})
        propagate(c)
        assert c.state("F6") is REJ

    def test_excludes_both_directions(self, fig1_model):
        c = PartialConfiguration(fig1_model, {"F8": SEL})
        propagate(c)
        assert c.state("F2") is REJ
        d = PartialConfiguration(fig1_model, {"F2": SEL})
        propagate(d)
        assert d.state("F8") is REJ

    def test_rejection_closes_subtree(self, fig1_model):
        c = PartialConfiguration(fig1_model, {"F2": REJ})
        propagate(c)
        assert c.state("F7") is REJ

    def test_child_selection_pulls_parent(self, fig1_model):
        c = PartialConfiguration(fig1_model, {"F7": SEL})
        propagate(c)
        assert c.state("F2") is SEL

    def test_group_upper_rejects_rest(self, fig1_model):
        c = PartialConfiguration(fig1_model, {"F9": SEL})
        propagate(c)
        assert c.state("F10") is REJ
        assert c.state("F11") is REJ

    def test_group_lower_selects_rest(self, fig1_model):
        c = PartialConfiguration(fig1_model, {"F10": REJ, "F11": REJ})
        propagate(c)
        assert c.state("F9") is SEL

    def test_conflict_leaves_config_untouched(self, fig1_model):
        c = PartialConfiguration(fig1_model, {"F3": REJ})
        before = c.state_map()
        r = propagate(c)
        assert r.outcome is Outcome.CONFLICT
        assert r.derived == ()
        assert texts(r.violations) == ["mandatory(F1,F3)"]
        assert c.state_map() == before

    def test_conflict_on_excludes(self, fig1_model):
        c = PartialConfiguration(fig1_model, {"F2": SEL, "F8": SEL})
        r = propagate(c)
        assert r.outcome is Outcome.CONFLICT
        assert texts(r.violations) == ["excludes(F2,F8)"]

    def test_conflict_on_group_overflow(self, fig1_model):
        c = PartialConfiguration(fig1_model, {"F9": SEL, "F10": SEL})
        r = propagate(c)
        assert r.outcome is Outcome.CONFLICT
        assert texts(r.violations) == ["group(F3,1..1)"]

    def test_idempotent(self, fig1_model):
        c = PartialConfiguration(fig1_model, {"F6": SEL, "F9": SEL})
        propagate(c)
        again = propagate(c)
        assert again.outcome is Outcome.CONSISTENT
        assert again.derived == ()

    @settings(max_examples=80, deadline=None)
    @given(seed=st.integers(0, 2**32 - 1))
    def test_incremental_equals_batch(self, seed):
        """Propagating after each decision or once at the end lands on the
        same fixpoint (when no intermediate step conflicts)."""
        rng = random.Random(seed)
        m = random_model(rng, rng.randint(3, 12))
        ids = [f.id for f in m.features if f.id != m.root]
        users = {
            fid: rng.choice((SEL, REJ))
            for fid in rng.sample(ids, min(len(ids), rng.randint(0, 4)))
        }

        batch = PartialConfiguration(m, dict(users))
        r_batch = propagate(batch)

        incr = PartialConfiguration(m)
        propagate(incr)  # root closure, as a fresh session would
        conflicted = False
        for fid, choice in users.items():
            incr.set_user(fid, choice)
            if propagate(incr).outcome is Outcome.CONFLICT:
                conflicted = True
                break
        if conflicted or r_batch.outcome is Outcome.CONFLICT:
            return
        assert incr.state_map() == batch.state_map()

    @settings(max_examples=80, deadline=None)
    @given(seed=st.integers(0, 2**32 - 1))
    def test_sound_against_completions(self, seed):
        """Every propagated decision holds in every valid completion of the
        user decisions (vacuously when there is none)."""
        rng = random.Random(seed)
        m = random_model(rng, rng.randint(3, 12))
        ids = [f.id for f in m.features if f.id != m.root]
        users = {
            fid: rng.choice((SEL, REJ))
            for fid in rng.sample(ids, min(len(ids), rng.randint(0, 4)))
        }
        c = PartialConfiguration(m, dict(users))
        r = propagate(c)
        if r.outcome is Outcome.CONFLICT:
            return
        comps = completions(
            m,
            [fid for fid, s in users.items() if s is SEL],
            [fid for fid, s in users.items() if s is REJ],
        )
        for fid, state in r.derived:
            if state is SEL:
                assert all(fid in s for s in comps)
            else:
                assert all(fid not in s for s in comps)


# --------------------------------------------------------------------------
# enumerate_valid


class TestEnumerate:
    def test_two_optionals_in_mask_order(self):
        m = parse_model("fm 1\nfeature R root\nfeature A R optional\nfeature B R optional\n")
        assert enumerate_valid(m) == [
            frozenset({"R"}),
            frozenset({"R", "A"}),
            frozenset({"R", "B"}),
            frozenset({"R", "A", "B"}),
        ]

    def test_limit_truncates_sorted_order(self):
        m = parse_model("fm 1\nfeature R root\nfeature A R optional\nfeature B R optional\n")
        assert enumerate_valid(m, limit=2) == [frozenset({"R"}), frozenset({"R", "A"})]
        assert enumerate_valid(m, limit=0) == []

    def test_results_sorted_by_mask(self, fig1_model):
        masks = [mask_of(fig1_model, s) for s in enumerate_valid(fig1_model)]
        assert masks == sorted(masks)

    def test_fig1_against_oracle(self, fig1_model):
        got = enumerate_valid(fig1_model)
        assert len(got) == 72
        assert got == valid_sets(fig1_model)

    def test_every_result_is_valid(self, fig1_model):
        for s in enumerate_valid(fig1_model):
            assert check_full(fig1_model, s) == []

    def test_dell_count(self, dell_model):
        # Independent arithmetic oracle: walk the eight exclusive choice
        # groups directly and count combinations that dodge the four
        # category exclusions.  [derived] 720, frozen.
        m = dell_model
        choice_sets = [g.members for g in m.groups]
        banned = {
            frozenset((c.a, c.b)) for c in m.cross_constraints
        }
        count = 0
        for combo in itertools.product(*choice_sets):
            chosen = set(combo)
            if any(len(pair & chosen) == 2 for pair in banned):
                continue
            count += 1
        assert count == 720
        assert len(enumerate_valid(m)) == 720

    @settings(max_examples=40, deadline=None)
    @given(seed=st.integers(0, 2**32 - 1))
    def test_random_models_match_oracle(self, seed):
        rng = random.Random(seed)
        m = random_model(rng, rng.randint(3, 12))
        got = [mask_of(m, s) for s in enumerate_valid(m)]
        assert got == [int(x) for x in valid_masks(m)]


# --------------------------------------------------------------------------
# backbone


class TestBackbone:
    def test_fresh_fig1(self, fig1_model):
        c = PartialConfiguration(fig1_model)
        b = backbone(fig1_model, c)
        assert b["F1"] is Backbone.FORCED_SELECTED
        assert b["F3"] is Backbone.FORCED_SELECTED
        assert b["F4"] is Backbone.FORCED_SELECTED
        assert b["F5"] is Backbone.FREE
        assert b["F9"] is Backbone.FREE

    def test_requires_chain(self, fig1_model):
        c = PartialConfiguration(fig1_model, {"F6": SEL})
        assert backbone(fig1_model, c)["F12"] is Backbone.FORCED_SELECTED

    def test_rejection_narrows(self, fig1_model):
        c = PartialConfiguration(fig1_model, {"F10": REJ, "F11": REJ})
        assert backbone(fig1_model, c)["F9"] is Backbone.FORCED_SELECTED

    def test_no_completion(self, fig1_model):
        c = PartialConfiguration(fig1_model, {"F2": SEL, "F8": SEL})
        b = backbone(fig1_model, c)
        assert set(b.values()) == {Backbone.NO_COMPLETION}

    def test_dell_category_pick(self, dell_model):
        c = PartialConfiguration(dell_model, {"Mininotebook": SEL})
        b = backbone(dell_model, c)
        assert b["320GB"] is Backbone.FORCED_REJECTED
        assert b["IntelCore2Duo"] is Backbone.FORCED_REJECTED
        assert b["IntelAtom"] is Backbone.FORCED_SELECTED
        assert b["BluRayDisc"] is Backbone.FORCED_SELECTED
        assert b["160GB"] is Backbone.FREE
