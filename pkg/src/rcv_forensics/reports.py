"""Report documents and their text rendering.

Every command builds one JSON-able dict; the text renderer consumes that same
dict, so both formats carry identical numbers by construction. Serialization
is deterministic (sorted keys, fixed separators) so identical runs produce
byte-identical output.
"""

from __future__ import annotations

import json

from .cvr import CandidateRoster
from .forensics import (
    CompromiseScan,
    MonotonicityScan,
    NoShowScan,
    SpoilerScan,
    TieBoundary,
)
from .methods import CondorcetReport, TabulationResult
from .profiles import PairwiseMatrix
from .sanitize import SanitizeStats


def dumps(doc: dict) -> str:
    return json.dumps(doc, indent=2, sort_keys=True) + "\n"


def label(roster: CandidateRoster, cid: str) -> str:
    candidate = roster.get(cid)
    return cid if candidate.name == cid else f"{candidate.name} ({cid})"


def _ranking_text(ranking) -> str:
    return " > ".join(ranking) if ranking else "(empty)"


def tabulation_to_dict(result: TabulationResult) -> dict:
    return {
        "method": result.method,
        "winner": result.winner,
        "total_ballots": result.total_ballots,
        "rounds": [
            {
                "number": r.number,
                "tallies": dict(r.tallies),
                "eliminated": list(r.eliminated),
                "exhausted": r.exhausted,
                "pending": r.pending,
                "transfers": [
                    {"source": t.source, "to": dict(t.to), "exhausted": t.exhausted}
                    for t in r.transfers
                ],
            }
            for r in result.rounds
        ],
    }


def render_rounds_text(doc: dict, roster: CandidateRoster) -> list[str]:
    lines = []
    for rnd in doc["rounds"]:
        tally_text = "  ".join(f"{cid}={votes}" for cid, votes in rnd["tallies"].items())
        extra = f"  exhausted={rnd['exhausted']}"
        if rnd["pending"]:
            extra += f"  not-counted={rnd['pending']}"
        lines.append(f"round {rnd['number']}: {tally_text}{extra}")
        if rnd["eliminated"]:
            lines.append("  eliminated: " + ", ".join(rnd["eliminated"]))
        for transfer in rnd["transfers"]:
            source = transfer["source"] if transfer["source"] is not None else "(uncounted ballots rejoin)"
            parts = [f"{cid} +{votes}" for cid, votes in transfer["to"].items()]
            if transfer["exhausted"]:
                parts.append(f"exhausted +{transfer['exhausted']}")
            lines.append(f"    from {source}: " + ("; ".join(parts) if parts else "nothing"))
    lines.append(f"winner: {label(roster, doc['winner'])}")
    return lines


def scores_to_dict(method: str, scores: dict[str, int], winner: str | None, **extra) -> dict:
    doc = {"method": method, "scores": dict(scores), "winner": winner}
    doc.update(extra)
    return doc


def pairwise_to_dict(matrix: PairwiseMatrix) -> dict:
    return {
        x: {y: matrix.n(x, y) for y in matrix.candidates if y != x}
        for x in matrix.candidates
    }


def condorcet_to_dict(matrix: PairwiseMatrix, report: CondorcetReport, best: str | None) -> dict:
    return {
        "method": "condorcet",
        "pairwise": pairwise_to_dict(matrix),
        "condorcet_winner": report.condorcet_winner,
        "cycle": list(report.cycle) if report.cycle else None,
        "minimax_scores": dict(report.minimax_scores),
        "minimax_best": best,
    }


def render_condorcet_text(doc: dict, roster: CandidateRoster) -> list[str]:
    lines = []
    for x, row in doc["pairwise"].items():
        lines.append("pairwise " + "  ".join(f"{x}>{y}={n}" for y, n in row.items()))
    winner = doc["condorcet_winner"]
    lines.append(
        "condorcet winner: " + (label(roster, winner) if winner else "none")
    )
    if doc["cycle"]:
        lines.append("majority cycle: " + " > ".join(doc["cycle"] + [doc["cycle"][0]]))
    lines.append(
        "minimax scores: "
        + "  ".join(f"{cid}={s}" for cid, s in doc["minimax_scores"].items())
    )
    if doc["minimax_best"]:
        lines.append(f"closest to condorcet (minimax): {label(roster, doc['minimax_best'])}")
    return lines


def stats_to_dict(stats: SanitizeStats) -> dict:
    return {
        "total": stats.total,
        "ballots_with_overvote": stats.ballots_with_overvote,
        "ballots_skipped_then_ranked": stats.ballots_skipped_then_ranked,
        "invalid_first_with_official": stats.invalid_first_with_official,
    }


def render_stats_text(doc: dict) -> list[str]:
    return [
        f"ballots: {doc['total']}",
        f"ballots with an overvote: {doc['ballots_with_overvote']}",
        f"ballots with a skipped rank before a later rank: {doc['ballots_skipped_then_ranked']}",
        f"invalid first rank but an official candidate ranked: {doc['invalid_first_with_official']}",
    ]


def _boundary_to_dict(boundary: TieBoundary) -> dict:
    return {
        "edit": boundary.edit,
        "ballot_type": list(boundary.ballot_type),
        "raw_first_invalid": boundary.raw_first_invalid,
        "candidate": boundary.candidate,
        "count": boundary.count,
        "tied": list(boundary.tied),
    }


def spoiler_scan_to_dict(scan: SpoilerScan) -> dict:
    return {
        "witnesses": [
            {
                "kind": "spoiler",
                "removed": list(w.removed),
                "original_winner": w.original_winner,
                "new_winner": w.new_winner,
            }
            for w in scan.witnesses
        ],
        "tie_subsets": [list(s) for s in scan.tie_subsets],
    }


def monotonicity_scan_to_dict(scan: MonotonicityScan) -> dict:
    return {
        "witnesses": [
            {
                "kind": "monotonicity",
                "direction": w.direction.value,
                "focal_candidate": w.focal_candidate,
                "ballot_type": list(w.ballot_type),
                "raw_first_invalid": w.raw_first_invalid,
                "modified_type": list(w.modified_type),
                "min_count": w.min_count,
                "max_count": w.max_count,
                "original_winner": w.original_winner,
                "new_winner": w.new_winner,
            }
            for w in scan.witnesses
        ],
        "boundaries": [_boundary_to_dict(b) for b in scan.boundaries],
    }


def noshow_scan_to_dict(scan: NoShowScan) -> dict:
    return {
        "witnesses": [
            {
                "kind": "noshow",
                "ballot_type": list(w.ballot_type),
                "raw_first_invalid": w.raw_first_invalid,
                "count": w.count,
                "original_winner": w.original_winner,
                "new_winner": w.new_winner,
            }
            for w in scan.witnesses
        ],
        "boundaries": [_boundary_to_dict(b) for b in scan.boundaries],
    }


def compromise_scan_to_dict(scan: CompromiseScan) -> dict:
    return {
        "witnesses": [
            {
                "kind": "compromise",
                "ballot_type": list(w.ballot_type),
                "raw_first_invalid": w.raw_first_invalid,
                "promoted_candidate": w.promoted_candidate,
                "count": w.count,
                "max_count": w.max_count,
                "original_winner": w.original_winner,
                "new_winner": w.new_winner,
            }
            for w in scan.witnesses
        ],
        "boundaries": [_boundary_to_dict(b) for b in scan.boundaries],
    }


def render_witness_text(witness: dict) -> str:
    kind = witness["kind"]
    if kind == "spoiler":
        return (
            f"witness: remove {{{', '.join(witness['removed'])}}}: "
            f"winner {witness['original_winner']} -> {witness['new_winner']}"
        )
    if kind == "monotonicity":
        verb = "down" if witness["direction"] == "downward" else "up"
        return (
            f"witness: shift {witness['focal_candidate']} {verb} on "
            f"{witness['min_count']}..{witness['max_count']} ballots of "
            f"{_ranking_text(witness['ballot_type'])} -> "
            f"{_ranking_text(witness['modified_type'])}: "
            f"winner {witness['original_winner']} -> {witness['new_winner']}"
        )
    if kind == "noshow":
        return (
            f"witness: {witness['count']} ballots of "
            f"{_ranking_text(witness['ballot_type'])} abstain: "
            f"winner {witness['original_winner']} -> {witness['new_winner']}"
        )
    if kind == "compromise":
        return (
            f"witness: promote {witness['promoted_candidate']} to first on "
            f"{witness['count']}..{witness['max_count']} ballots of "
            f"{_ranking_text(witness['ballot_type'])}: "
            f"winner {witness['original_winner']} -> {witness['new_winner']}"
        )
    raise ValueError(f"unknown witness kind {kind!r}")


def render_boundary_text(boundary: dict) -> str:
    target = boundary["candidate"] or ""
    target = f" {target}" if target else ""
    return (
        f"tie boundary: {boundary['edit']}{target} at t={boundary['count']} on "
        f"{_ranking_text(boundary['ballot_type'])} (tied: {', '.join(boundary['tied'])})"
    )
