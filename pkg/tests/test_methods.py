import random

import pytest
from hypothesis import given, settings, strategies as st

from rcv_forensics import (
    BordaConfig,
    BordaModel,
    Candidate,
    CandidateRoster,
    RcvOptions,
    TiePolicy,
    TieError,
    ValidationError,
    WriteinPolicy,
    borda,
    bucklin_topk,
    condorcet_analysis,
    minimax_best,
    plurality,
    plurality_runoff,
    rcv_tabulate,
)
from rcv_forensics.profiles import PreferenceProfile

from conftest import make_random_profile

ABC = CandidateRoster(tuple(Candidate(c, c) for c in "ABC"))
AB = CandidateRoster(tuple(Candidate(c, c) for c in "AB"))


def profile_of(counts, roster=ABC):
    return PreferenceProfile.from_counts(roster, counts)


class TestRcv:
    def test_table1_rounds(self, table1):
        result = rcv_tabulate(table1)
        assert result.winner == "H"
        r1, r2 = result.rounds
        assert r1.tallies == {"H": 8227, "M": 8190, "R": 10015}
        assert r1.eliminated == ("M",)
        (transfer,) = r1.transfers
        assert transfer.source == "M"
        assert transfer.to == {"H": 4194, "R": 2150}
        assert transfer.exhausted == 1846
        assert r2.tallies == {"H": 12421, "R": 12165}

    def test_synthetic_correct_mode(self, synthetic_profile):
        result = rcv_tabulate(synthetic_profile)
        assert result.winner == "H"
        wi_round = result.rounds[0]
        assert wi_round.number == 0
        assert wi_round.tallies == {"H": 8147, "M": 8176, "R": 9977, "WI1": 269, "WI2": 0}
        assert wi_round.eliminated == ("WI1", "WI2")
        wi1 = next(t for t in wi_round.transfers if t.source == "WI1")
        assert wi1.to == {"H": 80, "M": 14, "R": 38}
        assert wi1.exhausted == 137
        assert result.rounds[1].tallies == {"H": 8227, "M": 8190, "R": 10015}

    def test_synthetic_buggy_mode(self, synthetic_profile):
        result = rcv_tabulate(synthetic_profile, RcvOptions(buggy_first_round=True))
        assert result.winner == "R"
        first_official = result.rounds[1]
        assert first_official.tallies == {"H": 8112, "M": 8153, "R": 9954}
        assert first_official.pending == 213
        assert first_official.exhausted == 137
        assert first_official.eliminated == ("H",)
        rejoin = next(t for t in first_official.transfers if t.source is None)
        assert rejoin.to == {"M": 37, "R": 61}
        assert rejoin.exhausted == 115
        assert result.rounds[2].tallies == {"M": 11753, "R": 12352}

    def test_buggy_requires_eliminate_first(self):
        with pytest.raises(ValidationError):
            RcvOptions(
                writein_policy=WriteinPolicy.TREAT_AS_CANDIDATES, buggy_first_round=True
            )

    def test_writeins_as_ordinary_candidates(self, synthetic_profile):
        result = rcv_tabulate(
            synthetic_profile, RcvOptions(writein_policy=WriteinPolicy.TREAT_AS_CANDIDATES)
        )
        assert result.winner == "H"
        assert result.rounds[0].number == 1  # no batch write-in round
        assert result.rounds[0].eliminated == ("WI2",)
        assert result.rounds[1].eliminated == ("WI1",)

    def test_single_candidate_wins_immediately(self):
        roster = CandidateRoster((Candidate("A", "A"),))
        result = rcv_tabulate(profile_of({("A",): 3}, roster))
        assert result.winner == "A"
        assert len(result.rounds) == 1

    def test_empty_profile_rejected(self):
        with pytest.raises(ValidationError):
            rcv_tabulate(PreferenceProfile(ABC, {}))

    def test_elimination_tie_raises_with_names(self):
        profile = profile_of({("A",): 5, ("B",): 5, ("C",): 7})
        with pytest.raises(TieError, match="A, B"):
            rcv_tabulate(profile)

    def test_lex_tie_policy_eliminates_smallest(self):
        profile = profile_of({("A",): 5, ("B", "A"): 5, ("C",): 7})
        result = rcv_tabulate(profile, RcvOptions(tie_policy=TiePolicy.ELIMINATE_LEX_SMALLEST))
        assert result.rounds[0].eliminated == ("A",)

    def test_buggy_equals_correct_without_flags(self, table1):
        assert rcv_tabulate(table1, RcvOptions(buggy_first_round=True)) == rcv_tabulate(table1)

    def test_round_conservation(self, synthetic_profile):
        for options in (RcvOptions(), RcvOptions(buggy_first_round=True)):
            result = rcv_tabulate(synthetic_profile, options)
            for rnd in result.rounds:
                assert sum(rnd.tallies.values()) + rnd.exhausted + rnd.pending == 26569


class TestPlurality:
    def test_table1(self, table1):
        tallies, winner = plurality(table1)
        assert winner == "R"
        assert tallies["R"] == 10015

    def test_single_ballot(self):
        _, winner = plurality(profile_of({("A", "B"): 1}))
        assert winner == "A"

    def test_tie_raises(self):
        with pytest.raises(TieError):
            plurality(profile_of({("A",): 5, ("B",): 5}))


class TestPluralityRunoff:
    def test_table1(self, table1):
        result = plurality_runoff(table1)
        assert result.winner == "H"
        assert result.rounds[0].eliminated == ("M",)
        assert result.rounds[1].tallies == {"H": 12421, "R": 12165}

    def test_synthetic_writeins_compete(self, synthetic_profile):
        result = plurality_runoff(synthetic_profile)
        assert result.winner == "R"
        assert set(result.rounds[0].eliminated) == {"H", "WI1", "WI2"}
        assert result.rounds[1].tallies == {"M": 11753, "R": 12352}

    def test_two_candidates_is_head_to_head(self):
        profile = profile_of({("A", "B"): 3, ("B", "A"): 4}, AB)
        result = plurality_runoff(profile)
        assert result.winner == "B"
        assert result.rounds[1].tallies == {"A": 3, "B": 4}

    def test_tie_for_second_raises(self):
        with pytest.raises(TieError):
            plurality_runoff(profile_of({("A",): 5, ("B",): 5, ("C",): 7}))

    def test_conservation(self, synthetic_profile):
        result = plurality_runoff(synthetic_profile)
        for rnd in result.rounds:
            assert sum(rnd.tallies.values()) + rnd.exhausted == 26569


class TestBorda:
    def test_table1_optimistic(self, table1):
        scores, winner = borda(table1, BordaConfig(BordaModel.OPTIMISTIC, 3))
        assert scores == {"H": 29329, "M": 29190, "R": 28690}
        assert winner == "H"

    def test_table1_pessimistic(self, table1):
        scores, winner = borda(table1, BordaConfig(BordaModel.PESSIMISTIC, 3))
        assert scores == {"H": 23743, "M": 23123, "R": 24517}
        assert winner == "R"

    def test_complete_ballot_models_coincide(self):
        profile = profile_of({("A", "B", "C"): 1})
        for model in BordaModel:
            scores, _ = borda(profile, BordaConfig(model, 3))
            assert sum(scores.values()) == 3  # n(n-1)/2 for n = 3
            assert scores == {"A": 2, "B": 1, "C": 0}

    def test_overlong_ballot_rejected(self):
        with pytest.raises(ValidationError):
            borda(profile_of({("A", "B", "C"): 1}), BordaConfig(BordaModel.OPTIMISTIC, 2))

    def test_optimistic_dominates_pessimistic_random(self):
        rng = random.Random(11)
        for _ in range(100):
            profile = make_random_profile(rng)
            n = len(profile.roster.candidates)
            opt, _ = _scores_only(profile, BordaModel.OPTIMISTIC, n)
            pes, _ = _scores_only(profile, BordaModel.PESSIMISTIC, n)
            assert all(opt[c] >= pes[c] for c in opt)

    def test_pessimistic_total_matches_formula(self):
        rng = random.Random(12)
        for _ in range(50):
            profile = make_random_profile(rng)
            n = len(profile.roster.candidates)
            scores, _ = _scores_only(profile, BordaModel.PESSIMISTIC, n)
            expected = sum(
                count * sum(n - i for i in range(1, len(ranking) + 1))
                for (ranking, _), count in profile.entries.items()
            )
            assert sum(scores.values()) == expected


def _scores_only(profile, model, n):
    ids = profile.roster.ids()
    scores = {c: 0 for c in ids}
    try:
        return borda(profile, BordaConfig(model, n))
    except TieError as exc:
        # scores are still well defined on ties; recompute without the argmax
        for (ranking, _), count in profile.entries.items():
            for i, c in enumerate(ranking):
                scores[c] += (n - 1 - i) * count
            if model is BordaModel.OPTIMISTIC:
                pts = max(n - len(ranking) - 1, 0)
                for c in ids:
                    if c not in ranking:
                        scores[c] += pts * count
        return scores, None


class TestBucklin:
    def test_table1_top2(self, table1):
        scores, winner = bucklin_topk(table1, 2)
        assert scores == {"H": 15516, "M": 14933, "R": 14502}
        assert winner == "H"

    def test_k1_equals_first_place_tally(self, table1):
        scores, _ = bucklin_topk(table1, 1)
        assert scores == table1.first_place_tally()

    def test_k_at_roster_size_counts_every_ranked(self):
        profile = profile_of({("A", "B"): 2, ("A",): 1, ("C",): 1})
        scores, _ = bucklin_topk(profile, 3)
        assert scores == {"A": 3, "B": 2, "C": 1}

    def test_invalid_k(self, table1):
        with pytest.raises(ValidationError):
            bucklin_topk(table1, 0)


class TestCondorcet:
    def test_table1_cycle(self, table1):
        report = condorcet_analysis(table1.pairwise_matrix())
        assert report.condorcet_winner is None
        assert report.cycle == ("H", "R", "M")
        assert report.minimax_scores == {"H": 48, "M": 599, "R": 256}
        assert minimax_best(report) == "H"

    def test_unanimous_winner(self):
        profile = profile_of({("A", "B", "C"): 3, ("A", "C"): 2})
        report = condorcet_analysis(profile.pairwise_matrix())
        assert report.condorcet_winner == "A"
        assert report.cycle is None
        assert report.minimax_scores["A"] == 0

    def test_consistency_no_cycle_through_winner(self):
        rng = random.Random(13)
        for _ in range(100):
            profile = make_random_profile(rng)
            report = condorcet_analysis(profile.pairwise_matrix())
            if report.condorcet_winner is not None:
                assert report.cycle is None


@settings(max_examples=60, deadline=None)
@given(st.integers(0, 10_000))
def test_round_conservation_random(seed):
    rng = random.Random(seed)
    profile = make_random_profile(rng, writein_rate=0.3)
    if profile.total() == 0:
        return
    options = RcvOptions(
        tie_policy=TiePolicy.ELIMINATE_LEX_SMALLEST,
        buggy_first_round=rng.random() < 0.5,
    )
    result = rcv_tabulate(profile, options)
    total = profile.total()
    for rnd in result.rounds:
        assert sum(rnd.tallies.values()) + rnd.exhausted + rnd.pending == total
    assert result.winner in profile.roster.ids()
