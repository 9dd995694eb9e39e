"""Line-delimited JSON request server over stdio.

This is the transport behind foreign-language bindings: each request is
one JSON object per line carrying an ``op`` plus arguments, each response
one JSON object with ``ok`` and either a result payload or an error
``(code, message)`` pair.  Handles are session-scoped integer ids.

Float values survive the JSON round trip bit for bit (shortest repr).
``eval_f`` can additionally return the IEEE bytes of the result as hex so
callers can verify bit equality end to end.
"""

from __future__ import annotations

import json
import struct
import sys

import numpy as np

from . import problems  # noqa: F401
from .core import build_preset, list_families
from .errors import IvpSuiteError
from .integrators import IntegratorOptions, integrate_adaptive


def _hex_f64(values: np.ndarray) -> str:
    return struct.pack(f"<{len(values)}d", *values).hex()


class _Session:
    def __init__(self):
        self._handles = {}
        self._next_id = 1

    def _get(self, handle):
        try:
            return self._handles[int(handle)]
        except KeyError:
            raise IvpSuiteError(f"invalid or closed handle {handle}") from None

    # -- ops

    def op_list(self, req):
        return {
            "families": [
                {
                    "family": fam.name,
                    "presets": sorted(fam.presets),
                    "num_vars_expr": fam.num_vars_expr,
                    "description": fam.description,
                }
                for fam in list_families()
            ]
        }

    def op_open_preset(self, req):
        problem = build_preset(
            req["family"], req.get("preset", "Canonical"), req.get("overrides")
        )
        handle = self._next_id
        self._next_id += 1
        self._handles[handle] = problem
        return {
            "handle": handle,
            "name": problem.name,
            "preset": problem.preset,
            "num_vars": problem.num_vars,
            "time_span": list(problem.time_span),
            "y0": problem.y0.tolist(),
        }

    def op_close(self, req):
        self._handles.pop(int(req["handle"]), None)
        return {"closed": True}

    def op_eval_f(self, req):
        problem = self._get(req["handle"])
        y = np.asarray(req["y"], dtype=float)
        result = np.asarray(problem.rhs.f(float(req["t"]), y), dtype=float)
        payload = {"f": result.tolist()}
        if req.get("encoding") == "hex":
            payload["hex"] = _hex_f64(result)
        return payload

    def op_run(self, req):
        problem = self._get(req["handle"])
        opts = req.get("options") or {}
        kwargs = {}
        for key in ("abs_tol", "rel_tol", "max_step", "initial_step"):
            if opts.get(key) is not None:
                kwargs[key] = float(opts[key])
        traj = integrate_adaptive(problem, IntegratorOptions(**kwargs))
        return {
            "times": traj.times.tolist(),
            "states": traj.states.tolist(),
            "status": traj.status,
        }

    def op_health(self, req):
        rss_kb = None
        try:
            with open("/proc/self/status") as fh:
                for line in fh:
                    if line.startswith("VmRSS:"):
                        rss_kb = int(line.split()[1])
                        break
        except OSError:
            pass
        return {"handles": len(self._handles), "rss_kb": rss_kb}

    def handle_request(self, req: dict) -> dict:
        rid = req.get("id")
        op = req.get("op")
        method = getattr(self, f"op_{op}", None)
        if op == "shutdown":
            return {"id": rid, "ok": True, "shutdown": True}
        if method is None:
            return {
                "id": rid,
                "ok": False,
                "code": "UnknownOp",
                "message": f"unknown op '{op}'",
            }
        try:
            payload = method(req)
        except IvpSuiteError as exc:
            return {
                "id": rid,
                "ok": False,
                "code": type(exc).__name__,
                "message": str(exc),
            }
        except (KeyError, TypeError, ValueError) as exc:
            return {
                "id": rid,
                "ok": False,
                "code": "BadRequest",
                "message": f"{type(exc).__name__}: {exc}",
            }
        payload["id"] = rid
        payload["ok"] = True
        return payload


def serve(once: bool = False, stdin=None, stdout=None) -> int:
    stdin = stdin or sys.stdin
    stdout = stdout or sys.stdout
    session = _Session()
    for line in stdin:
        line = line.strip()
        if not line:
            continue
        try:
            req = json.loads(line)
        except json.JSONDecodeError as exc:
            resp = {"id": None, "ok": False, "code": "BadJSON", "message": str(exc)}
        else:
            resp = session.handle_request(req)
        stdout.write(json.dumps(resp) + "\n")
        stdout.flush()
        if resp.get("shutdown") or once:
            break
    return 0
