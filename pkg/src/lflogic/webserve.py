"""HTTP front door for the browser interface: serves the static bundle
and forwards serialized session requests to an in-process session.

The browser speaks the same request/response shapes as the stdio
protocol, one request per POST; requests are serialized by the client, so
a single session suffices.
"""

from __future__ import annotations

import json
import threading
from http.server import BaseHTTPRequestHandler, HTTPServer
from pathlib import Path
from typing import Optional

from .kernel import CheckError
from .parser import ParseError
from .session import Session, SessionError
from .syntax import MalformedError
from .tactics import TacticError


def _default_web_root() -> Optional[Path]:
    here = Path(__file__).resolve()
    for cand in [here.parent / "webui",
                 here.parent.parent.parent / "frontend" / "dist",
                 Path.cwd() / "frontend" / "dist"]:
        if cand.is_dir():
            return cand
    return None


def handle_request(session: Session, req: dict) -> dict:
    rid = req.get("id")
    op = req.get("op")
    arg = req.get("arg")
    try:
        if op == "load":
            files = arg if isinstance(arg, list) else [arg]
            for f in files:
                session.load_file(f)
        elif op == "tactic":
            session.run_tactic(arg)
        elif op == "undo":
            session.undo()
        elif op == "state":
            pass
        else:
            return {"id": rid, "ok": False, "error": f"unknown op {op!r}"}
        done = session.state is not None and session.state.done()
        return {"id": rid, "ok": True, "goals": session.goals_json(),
                "theorem": session.theorem, "done": done,
                "log": list(session.state.log) if session.state else []}
    except (ParseError, SessionError, TacticError, CheckError,
            MalformedError, OSError) as e:
        return {"id": rid, "ok": False, "error": str(e),
                "goals": session.goals_json()}


def serve_web(port: int, web_root: Optional[str] = None,
              search_depth: int = 5) -> int:
    root = Path(web_root) if web_root else _default_web_root()
    session = Session(search_depth=search_depth)
    lock = threading.Lock()

    class Handler(BaseHTTPRequestHandler):
        def log_message(self, *a):
            pass

        def do_POST(self):
            if self.path != "/session":
                self.send_error(404)
                return
            length = int(self.headers.get("Content-Length", "0"))
            body = self.rfile.read(length)
            try:
                req = json.loads(body)
            except json.JSONDecodeError as e:
                self._json({"ok": False, "error": f"bad json: {e}"})
                return
            with lock:
                resp = handle_request(session, req)
            self._json(resp)

        def do_GET(self):
            if root is None:
                self.send_error(404, "no browser bundle available")
                return
            rel = self.path.lstrip("/") or "index.html"
            target = (root / rel).resolve()
            if not str(target).startswith(str(root.resolve())) \
                    or not target.is_file():
                self.send_error(404)
                return
            ctype = {"html": "text/html", "js": "text/javascript",
                     "css": "text/css", "json": "application/json"}.get(
                target.suffix.lstrip("."), "application/octet-stream")
            data = target.read_bytes()
            self.send_response(200)
            self.send_header("Content-Type", ctype)
            self.send_header("Content-Length", str(len(data)))
            self.end_headers()
            self.wfile.write(data)

        def _json(self, obj):
            data = json.dumps(obj).encode()
            self.send_response(200)
            self.send_header("Content-Type", "application/json")
            self.send_header("Content-Length", str(len(data)))
            self.end_headers()
            self.wfile.write(data)

    httpd = HTTPServer(("127.0.0.1", port), Handler)
    print(f"serving on http://127.0.0.1:{port}/", flush=True)
    try:
        httpd.serve_forever()
    except KeyboardInterrupt:
        pass
    return 0
