"""Learner notes and the note-pointer messaging system.

Notes hang off course activities with three access levels: private (author
only), tutors (tutors plus the author) and all.  Messages carry no prose at
all, only pointers to notes the sender can see; the Message type simply has
no body field.

A store binds one course environment and is append-only; operations return
a new store.  Persistence is one JSON object per line with a ``kind``
discriminator, written deterministically so a flush/reload/flush cycle is
byte-identical.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field, replace
from enum import Enum
from pathlib import Path

from .errors import AccessDenied, DanglingRef, DuplicateId, EmptyContent
from .model import LearningEnvironment

BROADCAST = "*"


class NoteAccess(str, Enum):
    PRIVATE = "private"
    TUTORS = "tutors"
    ALL = "all"


@dataclass(frozen=True)
class LearnerNote:
    note_id: str
    node_id: str
    learner_id: str
    timestamp: int
    access: NoteAccess = NoteAccess.PRIVATE
    body: str = ""
    attachments: tuple[str, ...] = ()


@dataclass(frozen=True)
class Message:
    """Pointer-only mail: recipients get note references, never free text."""

    message_id: str
    sender_id: str
    recipients: tuple[str, ...] | str  # explicit ids, or BROADCAST
    note_refs: tuple[str, ...]
    sent_at: int

    def __post_init__(self) -> None:
        if self.recipients != BROADCAST:
            object.__setattr__(self, "recipients", tuple(sorted(set(self.recipients))))
        object.__setattr__(self, "note_refs", tuple(self.note_refs))


@dataclass(frozen=True)
class NoteStore:
    env: LearningEnvironment
    notes: dict[str, LearnerNote] = field(default_factory=dict)
    messages: dict[str, Message] = field(default_factory=dict)


def new_store(env: LearningEnvironment) -> NoteStore:
    return NoteStore(env)


def attach_note(store: NoteStore, note: LearnerNote) -> NoteStore:
    """Append one note; the target activity must exist in the store's course."""
    if note.note_id in store.notes:
        raise DuplicateId(note.note_id, "note")
    if note.node_id not in store.env.activities:
        raise DanglingRef(note.node_id)
    if note.timestamp < 0:
        raise ValueError("note timestamp must be non-negative")
    notes = dict(store.notes)
    notes[note.note_id] = note
    return replace(store, notes=notes)


def can_view(note: LearnerNote, requester_id: str, requester_role: str) -> bool:
    if note.learner_id == requester_id:
        return True
    if note.access is NoteAccess.ALL:
        return True
    if note.access is NoteAccess.TUTORS:
        return requester_role == "tutor"
    return False


def list_notes(
    store: NoteStore,
    node_id: str,
    requester_id: str,
    requester_role: str = "learner",
) -> list[LearnerNote]:
    """Notes on one activity that the requester may see, oldest first."""
    if node_id not in store.env.activities:
        raise DanglingRef(node_id)
    visible = [
        n
        for n in store.notes.values()
        if n.node_id == node_id and can_view(n, requester_id, requester_role)
    ]
    return sorted(visible, key=lambda n: (n.timestamp, n.note_id))


def send_message(store: NoteStore, message: Message, sender_role: str = "learner") -> NoteStore:
    """Store a message after checking the sender can see every referenced note."""
    if message.message_id in store.messages:
        raise DuplicateId(message.message_id, "message")
    if not message.note_refs:
        raise EmptyContent("a message must reference at least one note")
    for ref in message.note_refs:
        note = store.notes.get(ref)
        if note is None:
            raise DanglingRef(ref)
        if not can_view(note, message.sender_id, sender_role):
            raise AccessDenied(f"sender {message.sender_id!r} may not reference note {ref!r}")
    messages = dict(store.messages)
    messages[message.message_id] = message
    return replace(store, messages=messages)


def inbox(store: NoteStore, user_id: str) -> list[Message]:
    """Messages addressed to the user or broadcast, oldest first."""
    mine = [
        m
        for m in store.messages.values()
        if m.recipients == BROADCAST or user_id in m.recipients
    ]
    return sorted(mine, key=lambda m: (m.sent_at, m.message_id))


# --- persistence ------------------------------------------------------------


def dumps(store: NoteStore) -> str:
    records = []
    for note in store.notes.values():
        records.append(
            {
                "kind": "note",
                "note_id": note.note_id,
                "node_id": note.node_id,
                "learner_id": note.learner_id,
                "timestamp": note.timestamp,
                "access": note.access.value,
                "body": note.body,
                "attachments": list(note.attachments),
            }
        )
    for message in store.messages.values():
        records.append(
            {
                "kind": "message",
                "message_id": message.message_id,
                "sender_id": message.sender_id,
                "recipients": BROADCAST if message.recipients == BROADCAST else list(message.recipients),
                "note_refs": list(message.note_refs),
                "sent_at": message.sent_at,
            }
        )
    return "".join(json.dumps(r, sort_keys=True, ensure_ascii=False, separators=(",", ":")) + "\n" for r in records)


def loads(text: str, env: LearningEnvironment) -> NoteStore:
    store = new_store(env)
    for line_no, line in enumerate(text.splitlines(), 1):
        if not line.strip():
            continue
        record = json.loads(line)
        kind = record.get("kind")
        if kind == "note":
            note = LearnerNote(
                record["note_id"],
                record["node_id"],
                record["learner_id"],
                record["timestamp"],
                NoteAccess(record["access"]),
                record.get("body", ""),
                tuple(record.get("attachments", ())),
            )
            store = attach_note(store, note)
        elif kind == "message":
            recipients = record["recipients"]
            message = Message(
                record["message_id"],
                record["sender_id"],
                BROADCAST if recipients == BROADCAST else tuple(recipients),
                tuple(record["note_refs"]),
                record["sent_at"],
            )
            messages = dict(store.messages)
            if message.message_id in messages:
                raise DuplicateId(message.message_id, "message")
            messages[message.message_id] = message
            store = replace(store, messages=messages)
        else:
            raise ValueError(f"line {line_no}: unknown record kind {kind!r}")
    return store


def flush(store: NoteStore, path: str | Path) -> None:
    Path(path).write_text(dumps(store), encoding="utf-8")


def reload(path: str | Path, env: LearningEnvironment) -> NoteStore:
    return loads(Path(path).read_text(encoding="utf-8"), env)
