"""Session-based interactive parsing service.

The service reproduces the interactive workflow: create a session for a
sentence, pick one of the filter-surviving lexical selections, then step
through node merges one at a time — with undo — while inspecting the
evolving description.  When the description saturates, the session
exposes the extracted models, which match what the batch pipeline
produces for the same selection.

The semantic core (:class:`DebugService`) is transport-independent and
fully deterministic; :func:`create_app` wraps it in an HTTP/JSON app for
local use.  Sessions live in memory only and expire after 30 idle
minutes.  Errors carry machine-readable codes: EMPTY_INPUT,
UNKNOWN_GRAMMAR, UNKNOWN_SESSION, WRONG_STATE, BAD_INDEX, BAD_PAIR,
MERGE_FAILED.
"""

from __future__ import annotations

import time
import uuid
from dataclasses import dataclass, field
from typing import Mapping, Optional

from polartree.descriptions import (
    MergeError,
    candidate_merges,
    export_ptd,
    is_saturated,
    juxtapose,
    merge_nodes,
    saturation_status,
)
from polartree.engines import ParseOptions, extract_models, model_document
from polartree.filtering import filter_selections
from polartree.grammar import Grammar, Lexicon, build_selection_graph, tokenize
from polartree.trees import check_model

SELECTING = "SELECTING"
MERGING = "MERGING"
SATURATED = "SATURATED"
DEAD_END = "DEAD_END"

DEFAULT_IDLE_SECONDS = 30 * 60


class ServiceError(Exception):
    """An operation failure with a machine-readable code."""

    def __init__(self, code: str, message: str):
        super().__init__(message)
        self.code = code
        self.message = message


@dataclass
class Session:
    id: str
    sentence: str
    grammar_id: str
    selections: list  # lists of AnchoredIPTD, deterministic order
    selections_total: int
    chosen: Optional[int] = None
    history: list = field(default_factory=list)  # PTD stack; bottom = juxtaposition
    merges: list = field(default_factory=list)  # applied (a, b) pairs, parallel to pushes
    status: str = SELECTING
    last_used: float = field(default_factory=time.monotonic)

    @property
    def top(self):
        return self.history[-1]


def _selection_document(selection) -> list:
    return [
        {
            "word": iptd.word,
            "template": iptd.template,
            "usage": dict(sorted(iptd.usage.items())),
            "instance": iptd.instance,
        }
        for iptd in selection
    ]


class DebugService:
    """In-memory session store over a registry of named grammars.

    Every method takes and returns plain data; all semantic work is
    delegated to the library primitives, so replaying a session's merge
    sequence through those primitives yields the identical description.
    """

    def __init__(
        self,
        grammars: Mapping[str, tuple],
        idle_seconds: float = DEFAULT_IDLE_SECONDS,
        options: Optional[ParseOptions] = None,
    ):
        #: grammar id -> (Grammar, Lexicon)
        self.grammars = dict(grammars)
        self.idle_seconds = idle_seconds
        self.options = options or ParseOptions()
        self.sessions: dict = {}

    # -- housekeeping ------------------------------------------------------

    def _expire(self) -> None:
        now = time.monotonic()
        for sid in [s for s, sess in self.sessions.items() if now - sess.last_used > self.idle_seconds]:
            del self.sessions[sid]

    def _session(self, session_id: str) -> Session:
        self._expire()
        session = self.sessions.get(session_id)
        if session is None:
            raise ServiceError("UNKNOWN_SESSION", f"no session {session_id!r}")
        session.last_used = time.monotonic()
        return session

    # -- status bookkeeping ------------------------------------------------

    def _predicted_candidates(self, session: Session) -> list:
        """Every candidate pair with its speculatively evaluated outcome."""
        out = []
        for a, b, name, kind in candidate_merges(session.top):
            try:
                merge_nodes(session.top, a, b)
                outcome = "OK"
            except MergeError as exc:
                outcome = exc.kind
            out.append({"a": a, "b": b, "feature": name, "kind": kind, "outcome": outcome})
        return out

    def _refresh_status(self, session: Session) -> None:
        if is_saturated(session.top):
            session.status = SATURATED
        elif any(c["outcome"] == "OK" for c in self._predicted_candidates(session)):
            session.status = MERGING
        else:
            session.status = DEAD_END

    # -- operations --------------------------------------------------------

    def create_session(self, sentence: str, grammar_id: str) -> dict:
        self._expire()
        if not sentence or not sentence.strip():
            raise ServiceError("EMPTY_INPUT", "sentence is empty")
        if grammar_id not in self.grammars:
            raise ServiceError("UNKNOWN_GRAMMAR", f"no grammar {grammar_id!r}")
        grammar, lexicon = self.grammars[grammar_id]
        tg = tokenize(sentence, grammar.contractions)
        sgraph = build_selection_graph(tg, lexicon, grammar)
        if self.options.use_filter:
            selections = filter_selections(sgraph, grammar).automaton.accepted_selections()
        else:
            selections = sgraph.selections()
        session = Session(
            id=uuid.uuid4().hex,
            sentence=sentence,
            grammar_id=grammar_id,
            selections=selections,
            selections_total=sgraph.path_count(),
        )
        self.sessions[session.id] = session
        return self.get_state(session.id)

    def list_selections(self, session_id: str, offset: int = 0, cap: int = 50) -> dict:
        session = self._session(session_id)
        if session.status != SELECTING:
            raise ServiceError("WRONG_STATE", f"cannot list selections in {session.status}")
        window = session.selections[offset : offset + cap]
        items = [
            {"index": offset + i, "items": _selection_document(sel)}
            for i, sel in enumerate(window)
        ]
        next_offset = offset + len(window)
        return {
            "session": session.id,
            "selections": items,
            "total": len(session.selections),
            "continuation": next_offset if next_offset < len(session.selections) else None,
        }

    def choose_selection(self, session_id: str, index: int) -> dict:
        session = self._session(session_id)
        if session.status != SELECTING:
            raise ServiceError("WRONG_STATE", f"cannot choose a selection in {session.status}")
        if not isinstance(index, int) or not 0 <= index < len(session.selections):
            raise ServiceError("BAD_INDEX", f"no selection {index!r}")
        session.chosen = index
        session.history = [juxtapose([iptd.ptd for iptd in session.selections[index]])]
        session.merges = []
        self._refresh_status(session)
        return self.get_state(session.id)

    def list_candidate_merges(self, session_id: str) -> dict:
        session = self._session(session_id)
        if session.status not in (MERGING, DEAD_END):
            raise ServiceError("WRONG_STATE", f"no candidates in {session.status}")
        return {"session": session.id, "candidates": self._predicted_candidates(session)}

    def apply_merge(self, session_id: str, a: str, b: str) -> dict:
        session = self._session(session_id)
        if session.status != MERGING:
            raise ServiceError("WRONG_STATE", f"cannot merge in {session.status}")
        listed = {(c["a"], c["b"]): c["outcome"] for c in self._predicted_candidates(session)}
        outcome = listed.get((a, b)) or listed.get((b, a))
        if outcome is None:
            raise ServiceError("BAD_PAIR", f"({a!r}, {b!r}) is not a candidate pair")
        try:
            merged = merge_nodes(session.top, a, b)
        except MergeError as exc:
            # the prediction already evaluated this merge, so it must agree
            if outcome != exc.kind:
                raise ServiceError(
                    "MERGE_FAILED", f"prediction {outcome} diverged from outcome {exc.kind}"
                ) from exc
            raise ServiceError("MERGE_FAILED", f"{exc.kind}: {exc}") from exc
        if outcome != "OK":
            raise ServiceError("MERGE_FAILED", f"prediction {outcome} diverged from success")
        session.history.append(merged)
        session.merges.append((a, b))
        self._refresh_status(session)
        return self.get_state(session.id)

    def undo(self, session_id: str) -> dict:
        session = self._session(session_id)
        if session.status == SELECTING or len(session.history) <= 1:
            raise ServiceError("WRONG_STATE", "nothing to undo")
        session.history.pop()
        session.merges.pop()
        self._refresh_status(session)
        return self.get_state(session.id)

    def get_state(self, session_id: str) -> dict:
        session = self._session(session_id)
        state: dict = {
            "session": session.id,
            "sentence": session.sentence,
            "grammar": session.grammar_id,
            "status": session.status,
            "selections_total": session.selections_total,
            "selections_kept": len(session.selections),
            "chosen": session.chosen,
            "depth": max(len(session.history) - 1, 0),
            "merges": [list(pair) for pair in session.merges],
            "ptd": None,
            "saturation": [],
            "candidates": [],
            "models": [],
        }
        if session.history:
            state["ptd"] = export_ptd(session.top)
            state["saturation"] = [
                {"node": nid, "feature": name, "polarities": [p.value for p in pols]}
                for nid, name, pols in saturation_status(session.top)
            ]
            if session.status in (MERGING, DEAD_END):
                state["candidates"] = self._predicted_candidates(session)
        if session.status == SATURATED:
            selection = session.selections[session.chosen]
            words = [iptd.word for iptd in selection]
            originals = [iptd.ptd for iptd in selection]
            models = []
            for model in extract_models(session.top, words, self.options):
                if check_model(model.tree, originals, model.interpretation).ok:
                    models.append(model_document(model))
            state["models"] = models
        return state

    def delete_session(self, session_id: str) -> dict:
        self._session(session_id)
        del self.sessions[session_id]
        return {"deleted": session_id}


# --------------------------------------------------------------------------
# HTTP wiring


def load_service(paths: Mapping[str, tuple], **kwargs) -> DebugService:
    """Build a service from ``{grammar_id: (grammar_path, lexicon_path)}``."""
    from polartree.grammar import load_grammar, load_lexicon

    grammars = {}
    for gid, (gpath, lpath) in paths.items():
        grammar = load_grammar(gpath)
        grammars[gid] = (grammar, load_lexicon(lpath, grammar.signature))
    return DebugService(grammars, **kwargs)


_HTTP_STATUS = {
    "EMPTY_INPUT": 400,
    "UNKNOWN_GRAMMAR": 404,
    "UNKNOWN_SESSION": 404,
    "WRONG_STATE": 409,
    "BAD_INDEX": 400,
    "BAD_PAIR": 400,
    "MERGE_FAILED": 500,
}


def create_app(service: DebugService):
    """HTTP/JSON frontend; every endpoint is a POST with an object body."""
    from fastapi import Body, FastAPI
    from fastapi.responses import JSONResponse

    app = FastAPI(title="polartree debug service")
    app.state.service = service

    def guard(fn, payload: dict):
        try:
            return JSONResponse(fn(payload))
        except ServiceError as exc:
            return JSONResponse(
                {"error": {"code": exc.code, "message": exc.message}},
                status_code=_HTTP_STATUS.get(exc.code, 400),
            )
        except (KeyError, TypeError) as exc:
            return JSONResponse(
                {"error": {"code": "BAD_REQUEST", "message": f"malformed payload: {exc}"}},
                status_code=400,
            )

    @app.post("/create-session")
    def create_session(payload: dict = Body(...)):
        return guard(
            lambda p: service.create_session(p["sentence"], p["grammar"]), payload
        )

    @app.post("/list-selections")
    def list_selections(payload: dict = Body(...)):
        return guard(
            lambda p: service.list_selections(
                p["session"], int(p.get("offset", 0)), int(p.get("cap", 50))
            ),
            payload,
        )

    @app.post("/choose-selection")
    def choose_selection(payload: dict = Body(...)):
        return guard(lambda p: service.choose_selection(p["session"], p["index"]), payload)

    @app.post("/candidates")
    def candidates(payload: dict = Body(...)):
        return guard(lambda p: service.list_candidate_merges(p["session"]), payload)

    @app.post("/merge")
    def merge(payload: dict = Body(...)):
        return guard(lambda p: service.apply_merge(p["session"], p["a"], p["b"]), payload)

    @app.post("/undo")
    def undo(payload: dict = Body(...)):
        return guard(lambda p: service.undo(p["session"]), payload)

    @app.post("/state")
    def state(payload: dict = Body(...)):
        return guard(lambda p: service.get_state(p["session"]), payload)

    @app.post("/delete-session")
    def delete_session(payload: dict = Body(...)):
        return guard(lambda p: service.delete_session(p["session"]), payload)

    return app
