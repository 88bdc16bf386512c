"""HTTP translation service speaking the toolkit's bridge protocol.

``POST /translate`` with ``{"texts": [...]}`` answers
``{"translations": [...]}`` with one translation per text, in order.
Malformed requests get a 400.  Requests are handled one at a time per
model instance; concurrent clients queue.
"""

from __future__ import annotations

import json
import threading
from http.server import BaseHTTPRequestHandler, ThreadingHTTPServer


def _make_handler(model, lock):
    class TranslateHandler(BaseHTTPRequestHandler):
        server_version = "nmt-adapter/0.1"

        def _reply(self, code, payload):
            body = json.dumps(payload, ensure_ascii=False).encode("utf-8")
            self.send_response(code)
            self.send_header("Content-Type", "application/json")
            self.send_header("Content-Length", str(len(body)))
            self.end_headers()
            self.wfile.write(body)

        def do_GET(self):
            if self.path == "/health":
                self._reply(200, {"status": "ok"})
            else:
                self._reply(404, {"error": "not found"})

        def do_POST(self):
            if self.path != "/translate":
                self._reply(404, {"error": "not found"})
                return
            try:
                length = int(self.headers.get("Content-Length", 0))
                payload = json.loads(self.rfile.read(length))
                texts = payload["texts"]
                if not isinstance(texts, list) or not all(
                    isinstance(t, str) for t in texts
                ):
                    raise ValueError("'texts' must be a list of strings")
            except (ValueError, KeyError) as exc:
                self._reply(400, {"error": f"malformed request: {exc}"})
                return
            with lock:
                translations = model.translate_batch(texts)
            if len(translations) != len(texts):  # defensive; never expected
                self._reply(500, {"error": "model broke the count contract"})
                return
            self._reply(200, {"translations": translations})

        def log_message(self, *args):
            pass

    return TranslateHandler


class TranslationServer:
    """Wraps ThreadingHTTPServer so tests can run it in-process."""

    def __init__(self, model, host: str = "127.0.0.1", port: int = 0):
        # one model instance, serialized access
        self._lock = threading.Lock()
        self.httpd = ThreadingHTTPServer((host, port), _make_handler(model, self._lock))
        self.host, self.port = self.httpd.server_address[:2]
        self._thread = None

    @property
    def endpoint(self) -> str:
        return f"http://{self.host}:{self.port}"

    def start_background(self):
        self._thread = threading.Thread(target=self.httpd.serve_forever, daemon=True)
        self._thread.start()
        return self

    def serve_forever(self):
        self.httpd.serve_forever()

    def shutdown(self):
        self.httpd.shutdown()
        if self._thread is not None:
            self._thread.join(timeout=5)
