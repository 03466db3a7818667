"""Automated detection of election pathologies, each returned as a replayable
witness: spoiler effects, downward and upward monotonicity paradoxes, no-show
paradoxes, and compromise-vote failures.

Searches scan only ballot types already present in the profile and only
single-position (adjacent) shifts. The t-scan is linear because the winner as
a function of t need not be monotone across elimination-order changes.
Consecutive t values with the same new winner merge into one witness; a t
whose re-tabulation hits an elimination tie is never a witness and is
reported separately as a boundary.

``brute_force_oracle`` re-derives every report by plain enumeration over the
public profile edits and full tabulation, for small instances only; it exists
to pin the searches down, so it deliberately shares none of their scan code.
"""

from __future__ import annotations

import enum
import itertools
import os
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from typing import Callable, Sequence

from .cvr import CandidateRoster, ValidationError
from .methods import Entry, RcvOptions, TieError, rcv_tabulate, rcv_winner
from .profiles import PreferenceProfile, Ranking


class Direction(enum.Enum):
    DOWNWARD = "downward"
    UPWARD = "upward"


@dataclass(frozen=True)
class MonotonicityWitness:
    direction: Direction
    focal_candidate: str
    ballot_type: Ranking
    raw_first_invalid: bool
    modified_type: Ranking
    min_count: int
    max_count: int
    original_winner: str
    new_winner: str


@dataclass(frozen=True)
class NoShowWitness:
    ballot_type: Ranking
    raw_first_invalid: bool
    count: int
    original_winner: str
    new_winner: str


@dataclass(frozen=True)
class CompromiseWitness:
    ballot_type: Ranking
    raw_first_invalid: bool
    promoted_candidate: str
    count: int
    max_count: int
    original_winner: str
    new_winner: str


@dataclass(frozen=True)
class SpoilerWitness:
    removed: tuple[str, ...]
    original_winner: str
    new_winner: str


@dataclass(frozen=True)
class TieBoundary:
    """An edit size whose re-tabulation hit an elimination tie."""

    edit: str
    ballot_type: Ranking
    raw_first_invalid: bool
    candidate: str | None
    count: int
    tied: tuple[str, ...]


@dataclass(frozen=True)
class MonotonicityScan:
    direction: Direction
    witnesses: tuple[MonotonicityWitness, ...]
    boundaries: tuple[TieBoundary, ...]


@dataclass(frozen=True)
class NoShowScan:
    witnesses: tuple[NoShowWitness, ...]
    boundaries: tuple[TieBoundary, ...]


@dataclass(frozen=True)
class CompromiseScan:
    witnesses: tuple[CompromiseWitness, ...]
    boundaries: tuple[TieBoundary, ...]


@dataclass(frozen=True)
class SpoilerScan:
    witnesses: tuple[SpoilerWitness, ...]
    tie_subsets: tuple[tuple[str, ...], ...]


@dataclass(frozen=True)
class PathologyReport:
    spoilers: SpoilerScan
    downward: MonotonicityScan
    upward: MonotonicityScan
    noshow: NoShowScan
    compromise: CompromiseScan


@dataclass(frozen=True)
class OracleBounds:
    max_candidates: int = 4
    max_total_ballots: int = 60


class OracleBoundsError(ValueError):
    pass


def prefers(ranking: Sequence[str], a: str, b: str) -> bool:
    """True iff the ballot type strictly prefers a to b: unranked candidates
    sit below every ranked one and are mutually tied."""
    if a not in ranking:
        return False
    if b not in ranking:
        return True
    return ranking.index(a) < ranking.index(b)


def _thread_count() -> int:
    raw = os.environ.get("RCV_FORENSICS_THREADS", "")
    try:
        return max(1, int(raw))
    except ValueError:
        return 1


def _run_tasks(fn: Callable, tasks: list) -> list:
    workers = _thread_count()
    if workers <= 1 or len(tasks) <= 1:
        return [fn(task) for task in tasks]
    with ThreadPoolExecutor(max_workers=workers) as pool:
        return list(pool.map(fn, tasks))


def _entries_of(profile: PreferenceProfile) -> list[Entry]:
    return sorted((r, f, c) for (r, f), c in profile.entries.items())


Outcome = tuple  # ("win", winner) or ("tie", tied tuple)


def _outcomes_for_move(
    roster: CandidateRoster,
    entries: list[Entry],
    from_key: tuple[Ranking, bool],
    to_key: tuple[Ranking, bool] | None,
    options: RcvOptions,
) -> list[tuple[int, Outcome]]:
    """Re-tabulate for every t in 1..count(from_key), moving t ballots to
    to_key (or deleting them when to_key is None)."""
    work = [[r, f, c] for r, f, c in entries]
    src = next(row for row in work if (row[0], row[1]) == from_key)
    if to_key is None:
        dst = None
    else:
        dst = next((row for row in work if (row[0], row[1]) == to_key), None)
        if dst is None:
            dst = [to_key[0], to_key[1], 0]
            work.append(dst)
    outcomes = []
    for t in range(1, src[2] + 1):
        src[2] -= 1
        if dst is not None:
            dst[2] += 1
        snapshot = [(r, f, c) for r, f, c in work if c > 0]
        try:
            outcomes.append((t, ("win", rcv_winner(roster, snapshot, options))))
        except TieError as exc:
            outcomes.append((t, ("tie", exc.tied)))
        except ValidationError:
            # removal emptied the profile; no election outcome exists for this t
            outcomes.append((t, ("invalid",)))
    return outcomes


def _winner_runs(
    outcomes: list[tuple[int, Outcome]], qualifies: Callable[[str], bool]
) -> list[tuple[int, int, str]]:
    """Maximal runs of consecutive qualifying t with a constant winner."""
    runs: list[tuple[int, int, str]] = []
    current: list | None = None
    for t, outcome in outcomes:
        if outcome[0] == "win" and qualifies(outcome[1]):
            if current is not None and current[2] == outcome[1]:
                current[1] = t
            else:
                if current is not None:
                    runs.append(tuple(current))
                current = [t, t, outcome[1]]
        else:
            if current is not None:
                runs.append(tuple(current))
                current = None
    if current is not None:
        runs.append(tuple(current))
    return runs


def _tie_runs(outcomes: list[tuple[int, Outcome]]) -> list[tuple[int, tuple[str, ...]]]:
    """First t of each maximal run of identical elimination ties."""
    runs: list[tuple[int, tuple[str, ...]]] = []
    previous: tuple[str, ...] | None = None
    for t, outcome in outcomes:
        if outcome[0] == "tie":
            if outcome[1] != previous:
                runs.append((t, outcome[1]))
            previous = outcome[1]
        else:
            previous = None
    return runs


def _swap(ranking: Ranking, i: int, j: int) -> Ranking:
    swapped = list(ranking)
    swapped[i], swapped[j] = swapped[j], swapped[i]
    return tuple(swapped)


def search_monotonicity(
    profile: PreferenceProfile, options: RcvOptions, direction: Direction
) -> MonotonicityScan:
    """Downward: shift each losing candidate one position down on each ballot
    type ranking it above last place; a run of t where that candidate wins is
    a witness. Upward: shift the winner one position up where ranked below
    first; a run of t where the winner loses is a witness."""
    base = rcv_tabulate(profile, options)
    original_winner = base.winner
    roster = profile.roster
    entries = _entries_of(profile)
    if direction is Direction.DOWNWARD:
        focals = [cid for cid in roster.ids() if cid != original_winner]
    else:
        focals = [original_winner]

    tasks = []
    for focal in focals:
        for ranking, flag, count in entries:
            if focal not in ranking:
                continue
            i = ranking.index(focal)
            if direction is Direction.DOWNWARD:
                if i == len(ranking) - 1:
                    continue
                modified = _swap(ranking, i, i + 1)
            else:
                if i == 0:
                    continue
                modified = _swap(ranking, i, i - 1)
            tasks.append((focal, ranking, flag, modified))

    edit_name = "shift-down" if direction is Direction.DOWNWARD else "shift-up"

    def scan(task):
        focal, ranking, flag, modified = task
        outcomes = _outcomes_for_move(
            roster, entries, (ranking, flag), (modified, flag), options
        )
        if direction is Direction.DOWNWARD:
            qualifies = lambda w: w == focal
        else:
            qualifies = lambda w: w != focal
        witnesses = [
            MonotonicityWitness(
                direction, focal, ranking, flag, modified, lo, hi, original_winner, w
            )
            for lo, hi, w in _winner_runs(outcomes, qualifies)
        ]
        boundaries = [
            TieBoundary(edit_name, ranking, flag, focal, t, tied)
            for t, tied in _tie_runs(outcomes)
        ]
        return witnesses, boundaries

    witnesses: list[MonotonicityWitness] = []
    boundaries: list[TieBoundary] = []
    for wit, bnd in _run_tasks(scan, tasks):
        witnesses.extend(wit)
        boundaries.extend(bnd)
    return MonotonicityScan(direction, tuple(witnesses), tuple(boundaries))


def search_noshow(profile: PreferenceProfile, options: RcvOptions) -> NoShowScan:
    """Remove t ballots of each type; the minimal t whose new winner the type
    strictly prefers to the original winner is a witness."""
    base = rcv_tabulate(profile, options)
    original_winner = base.winner
    roster = profile.roster
    entries = _entries_of(profile)

    def scan(task):
        ranking, flag, count = task
        outcomes = _outcomes_for_move(roster, entries, (ranking, flag), None, options)
        witnesses = []
        for t, outcome in outcomes:
            if (
                outcome[0] == "win"
                and outcome[1] != original_winner
                and prefers(ranking, outcome[1], original_winner)
            ):
                witnesses.append(
                    NoShowWitness(ranking, flag, t, original_winner, outcome[1])
                )
                break
        boundaries = [
            TieBoundary("remove", ranking, flag, None, t, tied)
            for t, tied in _tie_runs(outcomes)
        ]
        return witnesses, boundaries

    witnesses: list[NoShowWitness] = []
    boundaries: list[TieBoundary] = []
    for wit, bnd in _run_tasks(scan, list(entries)):
        witnesses.extend(wit)
        boundaries.extend(bnd)
    return NoShowScan(tuple(witnesses), tuple(boundaries))


def _promote(ranking: Ranking, candidate: str) -> Ranking:
    return (candidate,) + tuple(cid for cid in ranking if cid != candidate)


def search_compromise(profile: PreferenceProfile, options: RcvOptions) -> CompromiseScan:
    """Move each non-first candidate to first on t ballots of each type; runs
    of t whose new winner the type strictly prefers to the original winner are
    witnesses (one per constant-winner run, count = the run's minimum)."""
    base = rcv_tabulate(profile, options)
    original_winner = base.winner
    roster = profile.roster
    entries = _entries_of(profile)

    tasks = []
    for ranking, flag, count in entries:
        if len(ranking) < 2:
            continue
        for promoted in ranking[1:]:
            tasks.append((ranking, flag, promoted, _promote(ranking, promoted)))

    def scan(task):
        ranking, flag, promoted, modified = task
        outcomes = _outcomes_for_move(
            roster, entries, (ranking, flag), (modified, flag), options
        )
        qualifies = lambda w: w != original_winner and prefers(
            ranking, w, original_winner
        )
        witnesses = [
            CompromiseWitness(ranking, flag, promoted, lo, hi, original_winner, w)
            for lo, hi, w in _winner_runs(outcomes, qualifies)
        ]
        boundaries = [
            TieBoundary("promote", ranking, flag, promoted, t, tied)
            for t, tied in _tie_runs(outcomes)
        ]
        return witnesses, boundaries

    witnesses: list[CompromiseWitness] = []
    boundaries: list[TieBoundary] = []
    for wit, bnd in _run_tasks(scan, tasks):
        witnesses.extend(wit)
        boundaries.extend(bnd)
    return CompromiseScan(tuple(witnesses), tuple(boundaries))


def find_spoilers(
    profile: PreferenceProfile, options: RcvOptions, max_subset_size: int = 1
) -> SpoilerScan:
    """Remove every nonempty subset of losing candidates up to the given size
    and report subsets whose removal changes the winner."""
    base = rcv_tabulate(profile, options)
    original_winner = base.winner
    losers = [cid for cid in profile.roster.ids() if cid != original_winner]
    witnesses = []
    tie_subsets = []
    for size in range(1, min(max_subset_size, len(losers)) + 1):
        for subset in itertools.combinations(losers, size):
            reduced = profile.remove_candidates(subset)
            try:
                result = rcv_tabulate(reduced, options)
            except TieError:
                tie_subsets.append(subset)
                continue
            except ValidationError:
                continue  # nothing left to tabulate
            if result.winner != original_winner:
                witnesses.append(SpoilerWitness(subset, original_winner, result.winner))
    return SpoilerScan(tuple(witnesses), tuple(tie_subsets))


def verify_witness(
    profile: PreferenceProfile, witness, options: RcvOptions
) -> bool:
    """Replay the claimed edit and re-tabulate; true iff the claimed winners
    match. Structurally invalid witnesses raise; merely wrong ones return
    False."""

    def winner_after(edited: PreferenceProfile) -> str | None:
        try:
            return rcv_tabulate(edited, options).winner
        except TieError:
            return None

    original = rcv_tabulate(profile, options).winner

    if isinstance(witness, MonotonicityWitness):
        expected_focal = (
            witness.new_winner
            if witness.direction is Direction.DOWNWARD
            else witness.original_winner
        )
        if witness.focal_candidate != expected_focal:
            return False
        if witness.min_count < 1 or witness.max_count < witness.min_count:
            return False
        if original != witness.original_winner or witness.new_winner == original:
            return False
        for t in {witness.min_count, witness.max_count}:
            edited = profile.replace_ballots(
                witness.ballot_type, witness.modified_type, t, witness.raw_first_invalid
            )
            if winner_after(edited) != witness.new_winner:
                return False
        return True

    if isinstance(witness, NoShowWitness):
        if original != witness.original_winner or witness.new_winner == original:
            return False
        if not prefers(witness.ballot_type, witness.new_winner, witness.original_winner):
            return False
        if witness.count < 1:
            return False
        edited = profile.remove_ballots(
            witness.ballot_type, witness.count, witness.raw_first_invalid
        )
        return winner_after(edited) == witness.new_winner

    if isinstance(witness, CompromiseWitness):
        if witness.promoted_candidate not in witness.ballot_type:
            raise ValidationError("promoted candidate is not ranked on the ballot type")
        if witness.ballot_type and witness.ballot_type[0] == witness.promoted_candidate:
            raise ValidationError("promoted candidate is already first on the ballot type")
        if original != witness.original_winner or witness.new_winner == original:
            return False
        if not prefers(witness.ballot_type, witness.new_winner, witness.original_winner):
            return False
        if witness.count < 1 or witness.max_count < witness.count:
            return False
        modified = _promote(witness.ballot_type, witness.promoted_candidate)
        for t in {witness.count, witness.max_count}:
            edited = profile.replace_ballots(
                witness.ballot_type, modified, t, witness.raw_first_invalid
            )
            if winner_after(edited) != witness.new_winner:
                return False
        return True

    if isinstance(witness, SpoilerWitness):
        for cid in witness.removed:
            if cid not in profile.roster:
                raise ValidationError(f"witness removes unknown candidate {cid!r}")
        if not witness.removed:
            return False
        if original != witness.original_winner or witness.new_winner == original:
            return False
        if original in witness.removed:
            return False
        edited = profile.remove_candidates(witness.removed)
        return winner_after(edited) == witness.new_winner

    raise ValidationError(f"unknown witness type {type(witness).__name__}")


def brute_force_oracle(
    profile: PreferenceProfile,
    options: RcvOptions | None = None,
    bounds: OracleBounds = OracleBounds(),
) -> PathologyReport:
    """Exhaustive pathology report by direct re-tabulation, for small profiles.

    Enumerates every single-type adjacent shift, removal, and promotion over
    all t, and every losing-candidate subset, using only the public profile
    edits and the full record-keeping tabulator.
    """
    options = options or RcvOptions()
    n_candidates = len(profile.roster.candidates)
    total = profile.total()
    if n_candidates > bounds.max_candidates or total > bounds.max_total_ballots:
        raise OracleBoundsError(
            f"profile has {n_candidates} candidates and {total} ballots; the oracle "
            f"accepts at most {bounds.max_candidates} candidates and "
            f"{bounds.max_total_ballots} ballots (it exists to cross-check the "
            "searches on small instances)"
        )
    original_winner = rcv_tabulate(profile, options).winner
    roster_ids = profile.roster.ids()
    keys = sorted(profile.entries)

    def outcome_of(edited: PreferenceProfile):
        try:
            return ("win", rcv_tabulate(edited, options).winner)
        except TieError as exc:
            return ("tie", exc.tied)
        except ValidationError:
            return ("invalid",)

    def runs_and_ties(per_t, qualifies):
        witnesses_lo_hi = []
        ties = []
        idx = 0
        while idx < len(per_t):
            t, outcome = per_t[idx]
            if outcome[0] == "tie":
                tied = outcome[1]
                ties.append((t, tied))
                while idx < len(per_t) and per_t[idx][1] == ("tie", tied):
                    idx += 1
                continue
            if outcome[0] != "win":
                idx += 1
                continue
            winner = outcome[1]
            if not qualifies(winner):
                idx += 1
                continue
            lo = t
            hi = t
            idx += 1
            while idx < len(per_t) and per_t[idx][1] == ("win", winner):
                hi = per_t[idx][0]
                idx += 1
            witnesses_lo_hi.append((lo, hi, winner))
        return witnesses_lo_hi, ties

    # spoilers: every subset of losing candidates
    losers = [cid for cid in roster_ids if cid != original_winner]
    spoiler_wits = []
    spoiler_ties = []
    for size in range(1, len(losers) + 1):
        for subset in itertools.combinations(losers, size):
            try:
                result = rcv_tabulate(profile.remove_candidates(subset), options)
            except TieError:
                spoiler_ties.append(subset)
                continue
            except ValidationError:
                continue
            if result.winner != original_winner:
                spoiler_wits.append(
                    SpoilerWitness(subset, original_winner, result.winner)
                )
    spoilers = SpoilerScan(tuple(spoiler_wits), tuple(spoiler_ties))

    def monotonicity(direction: Direction) -> MonotonicityScan:
        if direction is Direction.DOWNWARD:
            focals = [cid for cid in roster_ids if cid != original_winner]
            edit_name = "shift-down"
            shift = "down"
        else:
            focals = [original_winner]
            edit_name = "shift-up"
            shift = "up"
        wits = []
        ties = []
        for focal in focals:
            for ranking, flag in keys:
                if focal not in ranking:
                    continue
                i = ranking.index(focal)
                if direction is Direction.DOWNWARD and i == len(ranking) - 1:
                    continue
                if direction is Direction.UPWARD and i == 0:
                    continue
                j = i + 1 if direction is Direction.DOWNWARD else i - 1
                modified = list(ranking)
                modified[i], modified[j] = modified[j], modified[i]
                modified = tuple(modified)
                per_t = []
                for t in range(1, profile.entries[(ranking, flag)] + 1):
                    edited = profile.shift_candidate(ranking, focal, shift, t, flag)
                    per_t.append((t, outcome_of(edited)))
                if direction is Direction.DOWNWARD:
                    qualifies = lambda w: w == focal
                else:
                    qualifies = lambda w: w != focal
                found, tie_ts = runs_and_ties(per_t, qualifies)
                wits.extend(
                    MonotonicityWitness(
                        direction, focal, ranking, flag, modified, lo, hi,
                        original_winner, w,
                    )
                    for lo, hi, w in found
                )
                ties.extend(
                    TieBoundary(edit_name, ranking, flag, focal, t, tied)
                    for t, tied in tie_ts
                )
        return MonotonicityScan(direction, tuple(wits), tuple(ties))

    downward = monotonicity(Direction.DOWNWARD)
    upward = monotonicity(Direction.UPWARD)

    noshow_wits = []
    noshow_ties = []
    for ranking, flag in keys:
        per_t = []
        for t in range(1, profile.entries[(ranking, flag)] + 1):
            per_t.append((t, outcome_of(profile.remove_ballots(ranking, t, flag))))
        found = None
        for t, outcome in per_t:
            if (
                outcome[0] == "win"
                and outcome[1] != original_winner
                and prefers(ranking, outcome[1], original_winner)
            ):
                found = NoShowWitness(ranking, flag, t, original_winner, outcome[1])
                break
        if found:
            noshow_wits.append(found)
        _, tie_ts = runs_and_ties(per_t, lambda w: False)
        noshow_ties.extend(
            TieBoundary("remove", ranking, flag, None, t, tied) for t, tied in tie_ts
        )
    noshow = NoShowScan(tuple(noshow_wits), tuple(noshow_ties))

    comp_wits = []
    comp_ties = []
    for ranking, flag in keys:
        if len(ranking) < 2:
            continue
        for promoted in ranking[1:]:
            modified = (promoted,) + tuple(c for c in ranking if c != promoted)
            per_t = []
            for t in range(1, profile.entries[(ranking, flag)] + 1):
                edited = profile.replace_ballots(ranking, modified, t, flag)
                per_t.append((t, outcome_of(edited)))
            qualifies = lambda w: w != original_winner and prefers(
                ranking, w, original_winner
            )
            found, tie_ts = runs_and_ties(per_t, qualifies)
            comp_wits.extend(
                CompromiseWitness(ranking, flag, promoted, lo, hi, original_winner, w)
                for lo, hi, w in found
            )
            comp_ties.extend(
                TieBoundary("promote", ranking, flag, promoted, t, tied)
                for t, tied in tie_ts
            )
    compromise = CompromiseScan(tuple(comp_wits), tuple(comp_ties))

    return PathologyReport(spoilers, downward, upward, noshow, compromise)
