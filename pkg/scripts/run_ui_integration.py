#!/usr/bin/env python3
"""Drive the frontend integration tests against a real service instance.

Seeds a toy session into a temp directory, starts the HTTP service, waits
for readiness, runs the vitest integration file with SCHEMAMATCH_URL set,
and tears the server down. Requires `npm install` in frontend/ first.
"""

import os
import socket
import subprocess
import sys
import tempfile
import time
from pathlib import Path

import uvicorn

REPO = Path(__file__).resolve().parent.parent


def _free_port() -> int:
    with socket.socket() as sock:
        sock.bind(("127.0.0.1", 0))
        return sock.getsockname()[1]


def _seed(directory: Path) -> None:
    from schemamatch.engine import MatchConfig
    from schemamatch.model import Node, Schema
    from schemamatch.session import Session, save_session

    def T(name, *children, doc=""):
        return Node(name=name, documentation=doc, children=tuple(children))

    left = Schema.build("sa", "sa", "canonical", [
        T("All_Event_Vitals",
          T("DATE_BEGIN_156", doc="the begin date of the event"),
          T("EVENT_CODE", doc="coded event category value")),
        T("Person_Master", T("PERSON_NAME", doc="full name of the person")),
    ])
    right = Schema.build("sb", "sb", "canonical", [
        T("EventInformation",
          T("DATETIME_FIRST_INFO", doc="the begin date of the event"),
          T("eventCategoryCode", doc="coded event category value")),
        T("PersonRecord", T("personFullName", doc="full name of the person")),
    ])
    session = Session("uitest", MatchConfig())
    session.register_schema(left)
    session.register_schema(right)
    session.add_matrix("sa", "sb")
    session.assign_concept("sa", "Event", ["sa:1", "sa:2", "sa:3"])
    session.record_decision("sa:3", "sb:3", "accepted", annotation="equivalent",
                            author="seed", assignee="team-a")
    session.record_decision("sa:5", "sb:5", "rejected", author="seed", assignee="team-b")
    save_session(session, directory / "uitest.json")


def main() -> int:
    port = _free_port()
    with tempfile.TemporaryDirectory() as tmp:
        directory = Path(tmp)
        _seed(directory)
        server_proc = subprocess.Popen(
            [sys.executable, "-m", "schemamatch", "serve", str(directory),
             "--listen", f"127.0.0.1:{port}"],
            stdout=subprocess.DEVNULL,
            stderr=subprocess.DEVNULL,
        )
        try:
            base = f"http://127.0.0.1:{port}"
            import urllib.request

            for _ in range(100):
                try:
                    with urllib.request.urlopen(f"{base}/sessions", timeout=1):
                        break
                except Exception:
                    time.sleep(0.1)
            else:
                print("service never became ready", file=sys.stderr)
                return 2
            env = dict(os.environ, SCHEMAMATCH_URL=base)
            result = subprocess.run(
                ["npx", "vitest", "run", "tests/integration.test.ts"],
                cwd=REPO / "frontend",
                env=env,
            )
            return result.returncode
        finally:
            server_proc.terminate()
            server_proc.wait(timeout=10)


if __name__ == "__main__":
    sys.exit(main())
