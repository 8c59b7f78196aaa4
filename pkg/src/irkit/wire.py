"""Newline-delimited JSON protocol for external prediction backends.

The backend runs as a child process. It must write one handshake line,
``{"classes": <int>}``, then answer each request line

    {"id": <int>, "mode": "tabular"|"image", "instances": [...]}

with a response line ``{"id": <int>, "probabilities": [[...], ...]}``.
Tabular instances are number lists; image instances are base64-encoded PNGs.
One request is in flight at a time. ``serve`` implements the child side for
wrapping an arbitrary predict function.
"""

from __future__ import annotations

import json
import queue
import subprocess
import sys
import threading
from collections import deque

from irkit.errors import BackendError, ProtocolError

_STDERR_KEEP = 40  # lines retained for error excerpts


class WireClient:
    """Client side of the protocol; owns the child process."""

    def __init__(self, argv: list[str], timeout: float = 30.0):
        self.argv = list(argv)
        self.timeout = timeout
        self._next_id = 0
        self._lock = threading.Lock()
        try:
            self._proc = subprocess.Popen(
                self.argv, stdin=subprocess.PIPE, stdout=subprocess.PIPE,
                stderr=subprocess.PIPE, text=True, bufsize=1)
        except OSError as e:
            raise BackendError(f"cannot start backend {self.argv!r}: {e}") from None

        self._lines: queue.Queue = queue.Queue()
        self._stderr: deque = deque(maxlen=_STDERR_KEEP)
        threading.Thread(target=self._pump, args=(self._proc.stdout, self._lines),
                         daemon=True).start()
        threading.Thread(target=self._pump_stderr, daemon=True).start()

        handshake = self._read_line()
        try:
            self.classes = int(json.loads(handshake)["classes"])
        except (ValueError, KeyError, TypeError):
            raise ProtocolError(f"bad handshake line: {handshake!r}") from None
        if self.classes < 1:
            raise ProtocolError(f"backend announced {self.classes} classes")

    @staticmethod
    def _pump(stream, sink):
        for line in stream:
            sink.put(line)
        sink.put(None)  # EOF marker

    def _pump_stderr(self):
        for line in self._proc.stderr:
            self._stderr.append(line.rstrip("\n"))

    def _stderr_excerpt(self) -> str:
        return "\n".join(self._stderr)

    def _read_line(self) -> str:
        try:
            line = self._lines.get(timeout=self.timeout)
        except queue.Empty:
            self.close()
            raise BackendError(
                f"backend timed out after {self.timeout}s",
                stderr_excerpt=self._stderr_excerpt()) from None
        if line is None:
            code = self._proc.poll()
            raise BackendError(
                f"backend exited (code {code}) before replying",
                stderr_excerpt=self._stderr_excerpt())
        return line

    def request(self, mode: str, instances: list) -> list:
        """Send one batch; returns the probability rows."""
        with self._lock:
            req_id = self._next_id
            self._next_id += 1
            message = json.dumps({"id": req_id, "mode": mode, "instances": instances})
            try:
                self._proc.stdin.write(message + "\n")
                self._proc.stdin.flush()
            except (BrokenPipeError, OSError):
                raise BackendError("backend pipe closed",
                                   stderr_excerpt=self._stderr_excerpt()) from None
            reply = self._read_line()

        try:
            payload = json.loads(reply)
        except ValueError:
            raise ProtocolError(f"backend sent invalid JSON: {reply[:200]!r}") from None
        if payload.get("id") != req_id:
            raise ProtocolError(
                f"response id {payload.get('id')!r} does not match request {req_id}")
        probs = payload.get("probabilities")
        if (not isinstance(probs, list) or len(probs) != len(instances)
                or any(not isinstance(r, list) or len(r) != self.classes for r in probs)):
            raise ProtocolError(
                f"probability matrix must be {len(instances)}x{self.classes}")
        return probs

    def close(self) -> None:
        if self._proc.poll() is None:
            try:
                self._proc.stdin.close()
            except OSError:
                pass
            try:
                self._proc.wait(timeout=2)
            except subprocess.TimeoutExpired:
                self._proc.kill()

    def __enter__(self):
        return self

    def __exit__(self, *exc):
        self.close()


def serve(predict_fn, classes: int, stdin=None, stdout=None) -> None:
    """Child-side loop: wrap ``predict_fn(mode, instances) -> rows`` as a backend."""
    stdin = stdin or sys.stdin
    stdout = stdout or sys.stdout
    stdout.write(json.dumps({"classes": classes}) + "\n")
    stdout.flush()
    for line in stdin:
        line = line.strip()
        if not line:
            continue
        req = json.loads(line)
        rows = predict_fn(req["mode"], req["instances"])
        rows = [[float(v) for v in r] for r in rows]
        stdout.write(json.dumps({"id": req["id"], "probabilities": rows}) + "\n")
        stdout.flush()
