"""Local HTTP service driving the interactive explorer.

One solve at a time: a POST while a job is queued or running gets 409.
Request handling itself is threaded; job state transitions happen under a
single lock and are observable through ``GET /status/{id}``.  Payloads are
the same JSON documents the CLI writes, so the service and the CLI produce
bit-identical embeddings for equal settings.

Endpoints
---------
GET  /tensor           labels and grid of the loaded tensor
POST /solve            body: settings object; returns ``{"job_id": ...}``
GET  /status/{id}      ``{"id", "status"}`` with status queued|running|done|failed
GET  /embedding/{id}   embedding document (409 until the job is done)
GET  /metrics/{id}     diagnostics document (409 until the job is done)
"""

from __future__ import annotations

import json
import threading
from http.server import BaseHTTPRequestHandler, ThreadingHTTPServer

from .exceptions import CmdsError
from .fileformats import embedding_document, metrics_document
from .model import DistanceTensor, settings_from_dict
from .solver import build_weights, cmds


class SolveService:
    """Owns the loaded tensor and a single-slot job registry."""

    def __init__(self, tensor: DistanceTensor):
        self.tensor = tensor
        self._lock = threading.Lock()
        self._jobs: dict[str, dict] = {}
        self._counter = 0
        self._active: str | None = None

    def tensor_info(self) -> dict:
        grid = self.tensor.grid
        info = {
            "T": self.tensor.n_slices,
            "N": self.tensor.n_items,
            "labels": list(self.tensor.labels),
            "alpha": [float(a) for a in grid.alpha],
        }
        if grid.two_axis:
            info["T_beta"] = grid.n_beta
            info["beta"] = [float(b) for b in grid.beta]
        return info

    def submit(self, settings_doc: dict) -> str | None:
        """Queue a solve; returns the job id, or None when the slot is taken."""
        settings = settings_from_dict(settings_doc)  # raises CmdsError on junk
        with self._lock:
            if self._active is not None:
                return None
            self._counter += 1
            job_id = f"job-{self._counter}"
            self._jobs[job_id] = {"id": job_id, "status": "queued"}
            self._active = job_id
        worker = threading.Thread(target=self._run, args=(job_id, settings), daemon=True)
        worker.start()
        return job_id

    def _run(self, job_id: str, settings) -> None:
        with self._lock:
            self._jobs[job_id]["status"] = "running"
        try:
            result = cmds(self.tensor, settings)
            emb = embedding_document(result, self.tensor)
            weights = build_weights(self.tensor, settings.variant)
            met = metrics_document(result.curves, self.tensor, weights, settings.lam)
            with self._lock:
                job = self._jobs[job_id]
                job["status"] = "done"
                job["embedding"] = emb
                job["metrics"] = met
                self._active = None
        except Exception as exc:  # report through /status instead of crashing the worker
            with self._lock:
                job = self._jobs[job_id]
                job["status"] = "failed"
                job["error"] = str(exc)
                self._active = None

    def status(self, job_id: str) -> dict | None:
        with self._lock:
            job = self._jobs.get(job_id)
            if job is None:
                return None
            out = {"id": job["id"], "status": job["status"]}
            if "error" in job:
                out["error"] = job["error"]
            return out

    def payload(self, job_id: str, kind: str) -> tuple[int, dict]:
        with self._lock:
            job = self._jobs.get(job_id)
            if job is None:
                return 404, {"error": f"unknown job {job_id!r}"}
            if job["status"] == "failed":
                return 409, {"error": job.get("error", "job failed")}
            if job["status"] != "done":
                return 409, {"error": f"job {job_id} is {job['status']}"}
            return 200, job[kind]


class _Handler(BaseHTTPRequestHandler):
    service: SolveService  # set on the subclass built per server

    def log_message(self, fmt, *args):  # keep test output clean
        pass

    def _reply(self, code: int, payload: dict) -> None:
        body = json.dumps(payload).encode()
        self.send_response(code)
        self.send_header("Content-Type", "application/json")
        self.send_header("Content-Length", str(len(body)))
        self._cors()
        self.end_headers()
        self.wfile.write(body)

    def _cors(self) -> None:
        self.send_header("Access-Control-Allow-Origin", "*")
        self.send_header("Access-Control-Allow-Methods", "GET, POST, OPTIONS")
        self.send_header("Access-Control-Allow-Headers", "Content-Type")

    def do_OPTIONS(self):
        self.send_response(204)
        self._cors()
        self.end_headers()

    def do_GET(self):
        parts = [p for p in self.path.split("?")[0].split("/") if p]
        if parts == ["tensor"]:
            self._reply(200, self.service.tensor_info())
            return
        if len(parts) == 2 and parts[0] in ("status", "embedding", "metrics"):
            kind, job_id = parts
            if kind == "status":
                status = self.service.status(job_id)
                if status is None:
                    self._reply(404, {"error": f"unknown job {job_id!r}"})
                else:
                    self._reply(200, status)
                return
            code, payload = self.service.payload(job_id, kind)
            self._reply(code, payload)
            return
        self._reply(404, {"error": f"no such endpoint {self.path!r}"})

    def do_POST(self):
        if self.path.rstrip("/") != "/solve":
            self._reply(404, {"error": f"no such endpoint {self.path!r}"})
            return
        length = int(self.headers.get("Content-Length", 0))
        raw = self.rfile.read(length) if length else b""
        try:
            doc = json.loads(raw.decode() or "{}")
        except (json.JSONDecodeError, UnicodeDecodeError) as exc:
            self._reply(400, {"error": f"invalid JSON body: {exc}"})
            return
        try:
            job_id = self.service.submit(doc)
        except CmdsError as exc:
            self._reply(400, {"error": str(exc)})
            return
        if job_id is None:
            self._reply(409, {"error": "solver busy; one job at a time"})
            return
        self._reply(200, {"job_id": job_id, "status": "queued"})


class ExplorerServer:
    """ThreadingHTTPServer wrapper with a background serve thread."""

    def __init__(self, tensor: DistanceTensor, port: int = 0, host: str = "127.0.0.1"):
        self.service = SolveService(tensor)
        handler = type("BoundHandler", (_Handler,), {"service": self.service})
        self._httpd = ThreadingHTTPServer((host, port), handler)
        self._thread = threading.Thread(target=self._httpd.serve_forever, daemon=True)

    @property
    def port(self) -> int:
        return self._httpd.server_address[1]

    def start(self) -> "ExplorerServer":
        self._thread.start()
        return self

    def wait(self) -> None:
        self._thread.join()

    def shutdown(self) -> None:
        self._httpd.shutdown()
        self._httpd.server_close()


def run_server(tensor: DistanceTensor, port: int = 0, host: str = "127.0.0.1") -> ExplorerServer:
    """Start serving in a background thread; returns the running server."""
    return ExplorerServer(tensor, port=port, host=host).start()
