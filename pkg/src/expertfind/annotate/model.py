"""Dual-coder annotation protocol: sessions, rounds, the agreement
gate, evidence resolution and adjudication.

State machine: warmup -> (gated)* -> bulk -> adjudication -> closed.
A session may only enter bulk once some round's Cohen's kappa reaches
the 0.70 gate.  All mutations are events appended to a per-session
log; replaying the log reconstructs identical state.
"""

from __future__ import annotations

import json
import time
import uuid
from dataclasses import dataclass, field
from importlib import resources
from pathlib import Path
from typing import Callable, Optional

from ..classes import CLASS_NAMES, EXPERT, NON_EXPERT, OUT_OF_SCOPE, parse_class
from ..stats import cohens_kappa

KAPPA_GATE = 0.70
DEFAULT_WARMUP_SIZE = 20
OVERLAP_EVERY = 10  # every 10th bulk item is coded by both coders

STATE_WARMUP = "warmup"
STATE_GATED = "gated"
STATE_BULK = "bulk"
STATE_ADJUDICATION = "adjudication"
STATE_CLOSED = "closed"


class ProtocolError(ValueError):
    """Rule violation with a stable machine-readable code."""

    def __init__(self, code: str, message: str):
        super().__init__(message)
        self.code = code
        self.message = message


def load_criteria() -> dict:
    text = resources.files("expertfind.annotate").joinpath("criteria.json").read_text(
        encoding="utf-8"
    )
    return json.loads(text)


_CRITERIA = load_criteria()
EXPERT_CRITERIA_IDS = frozenset(item["id"] for item in _CRITERIA["expert"])
ALL_CRITERIA_IDS = frozenset(
    item["id"]
    for group in ("expert", "non_expert", "out_of_scope")
    for item in _CRITERIA[group]
)
EXPERT_MINIMUM = int(_CRITERIA["expert_minimum"])


@dataclass(frozen=True)
class EvidenceSet:
    classes: frozenset[int]
    criteria_met: frozenset[str] = frozenset()

    @classmethod
    def of(cls, classes, criteria=()) -> "EvidenceSet":
        parsed = frozenset(parse_class(c) for c in classes)
        crit = frozenset(criteria)
        unknown = crit - ALL_CRITERIA_IDS
        if unknown:
            raise ProtocolError("unknown_criteria", f"unknown criteria ids: {sorted(unknown)}")
        return cls(parsed, crit)

    @property
    def expert_criteria_count(self) -> int:
        return len(self.criteria_met & EXPERT_CRITERIA_IDS)


def resolve_evidence(evidence: EvidenceSet) -> int:
    """Strongest-class schema over the evidence classes.

    Expert evidence only counts when at least EXPERT_MINIMUM expert
    criteria are checked; otherwise the expert class is removed before
    resolution (an emptied set degrades to out-of-scope).  Among the
    remaining classes: expert beats non-expert beats out-of-scope.
    """
    classes = set(evidence.classes)
    if not classes:
        raise ProtocolError("empty_evidence", "evidence class set must be non-empty")
    if EXPERT in classes and evidence.expert_criteria_count < EXPERT_MINIMUM:
        classes.discard(EXPERT)
    if not classes:
        return OUT_OF_SCOPE
    if EXPERT in classes:
        return EXPERT
    if NON_EXPERT in classes:
        return NON_EXPERT
    return OUT_OF_SCOPE


@dataclass
class LabelEntry:
    coder: str
    comment_id: str
    resolved: int
    classes: list[int]
    criteria: list[str]
    ts: float = 0.0


@dataclass
class Round:
    index: int
    ids: list[str]
    # assignment: comment id -> coders expected to label it
    assignment: dict[str, list[str]]
    labels: dict[tuple[str, str], LabelEntry] = field(default_factory=dict)
    kappa: Optional[float] = None
    closed: bool = False
    opened_at: float = 0.0
    closed_at: Optional[float] = None

    def expected(self) -> list[tuple[str, str]]:
        return [(coder, cid) for cid in self.ids for coder in self.assignment[cid]]

    def missing(self) -> list[tuple[str, str]]:
        return [key for key in self.expected() if (key[0], key[1]) not in
                {(e.coder, e.comment_id) for e in self.labels.values()}]

    def complete(self) -> bool:
        return not self.missing()

    @property
    def duration_s(self) -> Optional[float]:
        if self.closed_at is None:
            return None
        return self.closed_at - self.opened_at

    def coder_durations(self) -> dict[str, float]:
        """Per-coder labeling span: last label time minus round open."""
        spans: dict[str, float] = {}
        for entry in self.labels.values():
            span = max(0.0, entry.ts - self.opened_at)
            spans[entry.coder] = max(spans.get(entry.coder, 0.0), span)
        return spans

    def both_coded_ids(self, coders: tuple[str, str]) -> list[str]:
        a, b = coders
        return [
            cid
            for cid in self.ids
            if (a, cid) in self.labels and (b, cid) in self.labels
        ]


@dataclass
class AnnotationSession:
    id: str
    sample_ids: list[str]
    coder_a: str
    coder_b: str
    warmup_size: int
    state: str = STATE_WARMUP
    rounds: list[Round] = field(default_factory=list)
    adjudications: dict[str, tuple[int, str]] = field(default_factory=dict)
    events: list[dict] = field(default_factory=list)

    # -- construction ----------------------------------------------------

    @classmethod
    def create(
        cls,
        sample_ids: list[str],
        coder_a: str,
        coder_b: str,
        warmup_size: int = DEFAULT_WARMUP_SIZE,
        session_id: Optional[str] = None,
        now: Callable[[], float] = time.time,
    ) -> "AnnotationSession":
        if not sample_ids:
            raise ProtocolError("empty_sample", "sample must be non-empty")
        if len(set(sample_ids)) != len(sample_ids):
            raise ProtocolError("duplicate_ids", "sample contains duplicate ids")
        if coder_a == coder_b:
            raise ProtocolError("same_coder", "coders must be distinct identities")
        if warmup_size <= 0:
            raise ProtocolError("bad_warmup", "warmup_size must be positive")
        session = cls(
            id=session_id or uuid.uuid4().hex[:12],
            sample_ids=list(sample_ids),
            coder_a=coder_a,
            coder_b=coder_b,
            warmup_size=warmup_size,
        )
        event = {
            "type": "session_created",
            "ts": now(),
            "session_id": session.id,
            "sample_ids": list(sample_ids),
            "coder_a": coder_a,
            "coder_b": coder_b,
            "warmup_size": warmup_size,
        }
        session._apply(event)
        return session

    # -- event sourcing ---------------------------------------------------

    def _apply(self, event: dict) -> None:
        handler = getattr(self, f"_on_{event['type']}")
        handler(event)
        self.events.append(event)

    @classmethod
    def replay(cls, events: list[dict]) -> "AnnotationSession":
        if not events or events[0]["type"] != "session_created":
            raise ProtocolError("bad_log", "event log must start with session_created")
        head = events[0]
        session = cls(
            id=head["session_id"],
            sample_ids=list(head["sample_ids"]),
            coder_a=head["coder_a"],
            coder_b=head["coder_b"],
            warmup_size=head["warmup_size"],
        )
        for event in events:
            session._apply(event)
        return session

    # -- event handlers (pure state mutation, no validation) --------------

    def _on_session_created(self, event: dict) -> None:
        first = self.sample_ids[: min(self.warmup_size, len(self.sample_ids))]
        self.rounds = [
            Round(
                index=0,
                ids=list(first),
                assignment={cid: [self.coder_a, self.coder_b] for cid in first},
                opened_at=event["ts"],
            )
        ]
        self.state = STATE_WARMUP

    def _on_label_submitted(self, event: dict) -> None:
        entry = LabelEntry(
            coder=event["coder"],
            comment_id=event["comment_id"],
            resolved=event["resolved"],
            classes=list(event["classes"]),
            criteria=list(event["criteria"]),
            ts=event["ts"],
        )
        self.current_round().labels[(entry.coder, entry.comment_id)] = entry

    def _on_round_closed(self, event: dict) -> None:
        rnd = self.current_round()
        rnd.kappa = event["kappa"]
        rnd.closed = True
        rnd.closed_at = event["ts"]
        self.state = event["next_state"]
        if event.get("next_round_ids"):
            ids = event["next_round_ids"]
            assignment = {cid: list(coders) for cid, coders in event["next_assignment"].items()}
            self.rounds.append(
                Round(
                    index=rnd.index + 1,
                    ids=list(ids),
                    assignment=assignment,
                    opened_at=event["ts"],
                )
            )

    def _on_adjudicated(self, event: dict) -> None:
        self.adjudications[event["comment_id"]] = (event["final"], event["note"])
        self.state = event["next_state"]

    # -- queries ----------------------------------------------------------

    def current_round(self) -> Round:
        return self.rounds[-1]

    def coders(self) -> tuple[str, str]:
        return (self.coder_a, self.coder_b)

    def used_ids(self) -> set[str]:
        return {cid for rnd in self.rounds for cid in rnd.ids}

    def remaining_ids(self) -> list[str]:
        used = self.used_ids()
        return [cid for cid in self.sample_ids if cid not in used]

    def disagreements(self) -> list[str]:
        """Ids labelled by both coders with differing classes, in sample order."""
        out = []
        resolved: dict[tuple[str, str], int] = {}
        for rnd in self.rounds:
            for entry in rnd.labels.values():
                resolved[(entry.coder, entry.comment_id)] = entry.resolved
        for cid in self.sample_ids:
            la = resolved.get((self.coder_a, cid))
            lb = resolved.get((self.coder_b, cid))
            if la is not None and lb is not None and la != lb:
                out.append(cid)
        return out

    def pending_adjudications(self) -> list[str]:
        return [cid for cid in self.disagreements() if cid not in self.adjudications]

    def next_for(self, coder: str) -> Optional[str]:
        if coder not in self.coders():
            raise ProtocolError("foreign_coder", f"coder {coder!r} not in session")
        if self.state in (STATE_CLOSED, STATE_ADJUDICATION):
            return None
        rnd = self.current_round()
        for cid in rnd.ids:
            if coder in rnd.assignment[cid] and (coder, cid) not in rnd.labels:
                return cid
        return None

    # -- operations --------------------------------------------------------

    def submit_label(
        self,
        coder: str,
        comment_id: str,
        evidence: EvidenceSet,
        now: Callable[[], float] = time.time,
    ) -> int:
        if self.state in (STATE_CLOSED, STATE_ADJUDICATION):
            raise ProtocolError("not_labelling", f"session state is {self.state}")
        if coder not in self.coders():
            raise ProtocolError("foreign_coder", f"coder {coder!r} not in session")
        rnd = self.current_round()
        if comment_id not in rnd.assignment:
            raise ProtocolError("not_in_round", f"{comment_id} is not in the current round")
        if coder not in rnd.assignment[comment_id]:
            raise ProtocolError("not_assigned", f"{comment_id} is not assigned to {coder}")
        if (coder, comment_id) in rnd.labels:
            raise ProtocolError("double_submission", f"{coder} already labelled {comment_id}")
        resolved = resolve_evidence(evidence)
        self._apply(
            {
                "type": "label_submitted",
                "ts": now(),
                "coder": coder,
                "comment_id": comment_id,
                "classes": sorted(evidence.classes),
                "criteria": sorted(evidence.criteria_met),
                "resolved": resolved,
            }
        )
        return resolved

    def close_round(self, now: Callable[[], float] = time.time) -> Round:
        if self.state in (STATE_CLOSED, STATE_ADJUDICATION):
            raise ProtocolError("not_labelling", f"session state is {self.state}")
        rnd = self.current_round()
        missing = rnd.missing()
        if missing:
            listing = ", ".join(f"{coder}:{cid}" for coder, cid in missing[:10])
            raise ProtocolError("round_incomplete", f"missing labels: {listing}")

        both = rnd.both_coded_ids(self.coders())
        kappa = None
        if set(both) == set(rnd.ids):
            labels_a = [rnd.labels[(self.coder_a, cid)].resolved for cid in rnd.ids]
            labels_b = [rnd.labels[(self.coder_b, cid)].resolved for cid in rnd.ids]
            kappa = cohens_kappa(labels_a, labels_b).kappa

        next_round_ids: Optional[list[str]] = None
        next_assignment: Optional[dict[str, list[str]]] = None
        if self.state in (STATE_WARMUP, STATE_GATED):
            remaining = self.remaining_ids()
            if kappa is not None and kappa >= KAPPA_GATE:
                if remaining:
                    next_round_ids = remaining
                    next_assignment = self._bulk_assignment(remaining)
                    next_state = STATE_BULK
                else:
                    next_state = (
                        STATE_ADJUDICATION if self.pending_adjudications() else STATE_CLOSED
                    )
            else:
                if not remaining:
                    raise ProtocolError(
                        "sample_exhausted",
                        "agreement gate not reached and no items remain",
                    )
                size = min(len(rnd.ids), len(remaining))
                next_round_ids = remaining[:size]
                next_assignment = {
                    cid: [self.coder_a, self.coder_b] for cid in next_round_ids
                }
                next_state = STATE_GATED
        else:  # bulk
            next_state = STATE_ADJUDICATION if self.pending_adjudications() else STATE_CLOSED

        self._apply(
            {
                "type": "round_closed",
                "ts": now(),
                "index": rnd.index,
                "kappa": kappa,
                "next_state": next_state,
                "next_round_ids": next_round_ids,
                "next_assignment": next_assignment,
            }
        )
        return self.rounds[-2] if next_round_ids else self.current_round()

    def _bulk_assignment(self, ids: list[str]) -> dict[str, list[str]]:
        """Disjoint alternating split with every OVERLAP_EVERY-th item
        double-coded for drift monitoring."""
        assignment: dict[str, list[str]] = {}
        solo_counter = 0
        for i, cid in enumerate(ids):
            if i % OVERLAP_EVERY == 0:
                assignment[cid] = [self.coder_a, self.coder_b]
            else:
                assignment[cid] = [
                    self.coder_a if solo_counter % 2 == 0 else self.coder_b
                ]
                solo_counter += 1
        return assignment

    def adjudicate(
        self,
        comment_id: str,
        final_class,
        note: str = "",
        now: Callable[[], float] = time.time,
    ) -> int:
        if self.state not in (STATE_BULK, STATE_ADJUDICATION):
            raise ProtocolError(
                "bad_state", f"adjudication only in bulk/adjudication, not {self.state}"
            )
        if comment_id in self.adjudications:
            raise ProtocolError("already_adjudicated", f"{comment_id} already adjudicated")
        if comment_id not in self.disagreements():
            raise ProtocolError(
                "not_disagreed", f"{comment_id} is not a coder disagreement"
            )
        final = parse_class(final_class)
        pending_after = [
            cid for cid in self.pending_adjudications() if cid != comment_id
        ]
        if self.state == STATE_ADJUDICATION and not pending_after:
            next_state = STATE_CLOSED
        else:
            next_state = self.state
        self._apply(
            {
                "type": "adjudicated",
                "ts": now(),
                "comment_id": comment_id,
                "final": final,
                "note": note,
                "next_state": next_state,
            }
        )
        return final

    def export_labels(self) -> list[dict]:
        """One record per sample id; only for closed sessions.

        Deterministic content: identical submitted labels produce
        byte-identical exports regardless of session id or timing.
        """
        if self.state != STATE_CLOSED:
            raise ProtocolError("not_closed", f"cannot export in state {self.state}")
        by_coder: dict[str, dict[str, LabelEntry]] = {self.coder_a: {}, self.coder_b: {}}
        round_of: dict[str, int] = {}
        for rnd in self.rounds:
            for entry in rnd.labels.values():
                by_coder[entry.coder][entry.comment_id] = entry
                round_of[entry.comment_id] = rnd.index
        records = []
        for cid in self.sample_ids:
            ea = by_coder[self.coder_a].get(cid)
            eb = by_coder[self.coder_b].get(cid)
            consensus = self.adjudications.get(cid)
            if consensus is not None:
                final = consensus[0]
            elif ea is not None and eb is not None:
                final = ea.resolved  # agreed (disagreements must be adjudicated)
            else:
                final = (ea or eb).resolved
            record = {
                "comment_id": cid,
                "label": CLASS_NAMES[final],
                "round": round_of.get(cid),
                "coders": {},
            }
            for coder, entry in ((self.coder_a, ea), (self.coder_b, eb)):
                if entry is not None:
                    record["coders"][coder] = {
                        "label": CLASS_NAMES[entry.resolved],
                        "classes": [CLASS_NAMES[c] for c in entry.classes],
                        "criteria": entry.criteria,
                    }
            if consensus is not None:
                record["consensus"] = {
                    "label": CLASS_NAMES[consensus[0]],
                    "note": consensus[1],
                }
            records.append(record)
        return records

    def export_text(self) -> str:
        return "".join(
            json.dumps(record, sort_keys=True) + "\n" for record in self.export_labels()
        )

    def agreement_report(self) -> dict:
        rounds = []
        for rnd in self.rounds:
            rounds.append(
                {
                    "index": rnd.index,
                    "n_items": len(rnd.ids),
                    "kappa": rnd.kappa,
                    "closed": rnd.closed,
                    "duration_s": rnd.duration_s,
                    "coder_durations_s": rnd.coder_durations(),
                }
            )
        # drift monitoring: agreement over double-coded bulk items
        overlap_agreement = None
        if self.state in (STATE_BULK, STATE_ADJUDICATION, STATE_CLOSED) and self.rounds:
            last = self.rounds[-1]
            both = last.both_coded_ids(self.coders())
            if both and set(both) != set(last.ids):
                same = sum(
                    1
                    for cid in both
                    if last.labels[(self.coder_a, cid)].resolved
                    == last.labels[(self.coder_b, cid)].resolved
                )
                overlap_agreement = same / len(both)
        return {
            "state": self.state,
            "gate_threshold": KAPPA_GATE,
            "gate_passed": any(
                r.kappa is not None and r.kappa >= KAPPA_GATE for r in self.rounds
            ),
            "rounds": rounds,
            "overlap_agreement": overlap_agreement,
            "pending_adjudications": self.pending_adjudications(),
        }

    def snapshot(self) -> dict:
        rnd = self.current_round()
        return {
            "id": self.id,
            "state": self.state,
            "coder_a": self.coder_a,
            "coder_b": self.coder_b,
            "sample_size": len(self.sample_ids),
            "warmup_size": self.warmup_size,
            "n_rounds": len(self.rounds),
            "current_round": {
                "index": rnd.index,
                "n_items": len(rnd.ids),
                "n_labelled": len(rnd.labels),
                "closed": rnd.closed,
            },
            "pending_adjudications": self.pending_adjudications(),
        }


# ---------------------------------------------------------------------------
# Persistence: append-only JSONL event logs, one file per session
# ---------------------------------------------------------------------------


class SessionLog:
    def __init__(self, directory: str | Path):
        self.directory = Path(directory)
        self.directory.mkdir(parents=True, exist_ok=True)

    def path(self, session_id: str) -> Path:
        return self.directory / f"{session_id}.jsonl"

    def append(self, session_id: str, events: list[dict], start: int) -> None:
        with self.path(session_id).open("a", encoding="utf-8") as fh:
            for event in events[start:]:
                fh.write(json.dumps(event, sort_keys=True) + "\n")

    def load(self, session_id: str) -> AnnotationSession:
        path = self.path(session_id)
        if not path.exists():
            raise ProtocolError("unknown_session", f"no session {session_id!r}")
        events = [
            json.loads(line)
            for line in path.read_text(encoding="utf-8").splitlines()
            if line.strip()
        ]
        return AnnotationSession.replay(events)

    def list_ids(self) -> list[str]:
        return sorted(p.stem for p in self.directory.glob("*.jsonl"))
