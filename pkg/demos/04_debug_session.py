"""Driving the step debugger in process.

The debug service exposes parsing as an interactive session: pick a
lexical selection, apply merges one at a time (each candidate comes with
a predicted outcome), undo freely, and read the full state back as plain
JSON at any point.  The same object graph is what the HTTP layer serves;
here we call it directly.

Run:  python3 demos/04_debug_session.py
"""

import json
import pathlib

from polartree.service import load_service

FIXTURES = pathlib.Path(__file__).resolve().parent.parent / "fixtures"


def main() -> None:
    service = load_service(
        {"clitic": (FIXTURES / "clitic/grammar.json", FIXTURES / "clitic/lexicon.json")}
    )

    state = service.create_session("jean la voit .", "clitic")
    sid = state["session"]
    print(f"session {sid[:8]}… status={state['status']}")

    listing = service.list_selections(sid)
    for sel in listing["selections"]:
        words = ", ".join(f"{it['word']}:{it['template']}" for it in sel["items"])
        print(f"  selection {sel['index']}: {words}")

    state = service.choose_selection(sid, 0)
    print(f"\nchose selection 0, status={state['status']}")

    step = 0
    while state["status"] == "MERGING":
        okay = [c for c in state["candidates"] if c["outcome"] == "OK"]
        bad = [c for c in state["candidates"] if c["outcome"] != "OK"]
        print(f"step {step}: {len(okay)} viable / {len(bad)} predicted-to-fail candidates")
        cand = okay[0]
        state = service.apply_merge(sid, cand["a"], cand["b"])
        print(f"  merged {cand['a']} + {cand['b']} on {cand['feature']} ({cand['kind']})")
        step += 1

    print(f"\nstatus={state['status']} after {state['depth']} merges")
    for model in state.get("models", []):
        print("model:", model["bracketed"])

    # undo is exact: the exported state before a merge and after undoing
    # it are byte-for-byte identical
    before = json.dumps(service.get_state(sid), sort_keys=True)
    service.undo(sid)
    state = service.get_state(sid)
    print(f"\nafter undo: status={state['status']}, depth={state['depth']}")
    cand = next(c for c in state["candidates"] if c["outcome"] == "OK")
    service.apply_merge(sid, cand["a"], cand["b"])
    after = json.dumps(service.get_state(sid), sort_keys=True)
    print("redo restores the exact state:", before == after)

    service.delete_session(sid)


if __name__ == "__main__":
    main()
