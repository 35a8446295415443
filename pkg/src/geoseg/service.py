"""Session-based HTTP service exposing the segmentation pipeline to the
interactive browser client.

Endpoints (all responses JSON unless binary field data):

* ``POST   /sessions``                  multipart image upload -> {ok, id}
* ``PUT    /sessions/{id}/config``      flat config JSON
* ``POST   /sessions/{id}/scribbles``   {type: foreground|barrier, vertices}
* ``POST   /sessions/{id}/segment``     run the pipeline -> contour + fields
* ``GET    /sessions/{id}/fields/{name}``  binary intermediates
* ``DELETE /sessions/{id}``

Sessions serialize segmentation runs on a per-session lock (409 when one
is already running); cached edge features are invalidated when sigma or
the image changes.
"""

from __future__ import annotations

import os
import threading
import uuid
from dataclasses import dataclass, field

import numpy as np
from fastapi import FastAPI, Request, Response, UploadFile
from fastapi.middleware.cors import CORSMiddleware
from fastapi.responses import JSONResponse

from .config import config_from_dict, config_to_dict
from .dualcut import DualCutConfig, SegmentationResult, segment
from .errors import GeosegError, ParameterError
from .features import EdgeFeatures, compute_edge_features
from .imagecore import Image, field_f32_bytes, load_image, rasterize_polyline


@dataclass
class SessionState:
    image: Image
    config: DualCutConfig = field(default_factory=DualCutConfig)
    features: EdgeFeatures | None = None
    features_sigma: float | None = None
    foreground: list = field(default_factory=list)
    barriers: list = field(default_factory=list)
    result: SegmentationResult | None = None
    lock: threading.Lock = field(default_factory=threading.Lock)


_FIELD_NAMES = ("theta_z.pgm", "psi.f32", "gq.json", "a_b.json", "A.pgm",
                "region.pgm", "distance.f32")


def create_app() -> FastAPI:
    app = FastAPI(title="geoseg service")
    app.add_middleware(CORSMiddleware, allow_origins=["*"],
                       allow_methods=["*"], allow_headers=["*"])
    sessions: dict[str, SessionState] = {}

    def get_session(sid: str) -> SessionState | None:
        return sessions.get(sid)

    def error(status: int, msg: str) -> JSONResponse:
        return JSONResponse({"ok": False, "error": msg}, status_code=status)

    @app.post("/sessions")
    async def create_session(request: Request, image: UploadFile | None = None):
        if image is not None:
            raw = await image.read()
        else:
            raw = await request.body()
        if not raw:
            return error(422, "no image payload")
        try:
            import tempfile

            with tempfile.NamedTemporaryFile(suffix=".img", delete=False) as fh:
                fh.write(raw)
                tmp = fh.name
            try:
                img = load_image(tmp)
            finally:
                os.unlink(tmp)
        except GeosegError as exc:
            return error(422, str(exc))
        sid = uuid.uuid4().hex[:12]
        sessions[sid] = SessionState(image=img)
        return {"ok": True, "id": sid,
                "width": img.width, "height": img.height}

    @app.put("/sessions/{sid}/config")
    async def put_config(sid: str, request: Request):
        state = get_session(sid)
        if state is None:
            return error(404, "unknown session")
        try:
            doc = await request.json()
            state.config = config_from_dict(doc)
        except GeosegError as exc:
            return error(422, str(exc))
        except Exception as exc:
            return error(422, f"bad config payload: {exc}")
        return {"ok": True, "config": config_to_dict(state.config)}

    @app.post("/sessions/{sid}/scribbles")
    async def post_scribble(sid: str, request: Request):
        state = get_session(sid)
        if state is None:
            return error(404, "unknown session")
        try:
            doc = await request.json()
            kind = doc["type"]
            verts = np.asarray(doc["vertices"], dtype=np.float64)
            if kind not in ("foreground", "barrier"):
                raise ParameterError("scribble type must be foreground|barrier")
            if verts.ndim != 2 or verts.shape[1] != 2 or not len(verts):
                raise ParameterError("vertices must be a non-empty [[x,y],...]")
        except GeosegError as exc:
            return error(422, str(exc))
        except Exception as exc:
            return error(422, f"bad scribble payload: {exc}")
        verts[:, 0] = np.clip(verts[:, 0], 0, state.image.width - 1)
        verts[:, 1] = np.clip(verts[:, 1], 0, state.image.height - 1)
        (state.foreground if kind == "foreground" else state.barriers).append(verts)
        return {"ok": True, "foreground": len(state.foreground),
                "barriers": len(state.barriers)}

    @app.delete("/sessions/{sid}/scribbles")
    async def clear_scribbles(sid: str):
        state = get_session(sid)
        if state is None:
            return error(404, "unknown session")
        state.foreground.clear()
        state.barriers.clear()
        return {"ok": True}

    @app.post("/sessions/{sid}/segment")
    async def run_segment(sid: str, request: Request):
        state = get_session(sid)
        if state is None:
            return error(404, "unknown session")
        try:
            doc = await request.json()
        except Exception:
            doc = {}
        if not state.lock.acquire(blocking=False):
            return error(409, "a segmentation run is already in progress")
        try:
            seed = doc.get("seed")
            if seed is None and state.foreground:
                seed = np.vstack(state.foreground)
            if seed is None:
                return error(422, "no seed point and no foreground scribble")
            barriers = None
            if state.barriers:
                barriers = np.zeros((state.image.height, state.image.width),
                                    dtype=bool)
                for poly in state.barriers:
                    barriers |= rasterize_polyline(poly, state.image.height,
                                                   state.image.width)
            if (state.features is None
                    or state.features_sigma != state.config.sigma):
                state.features = compute_edge_features(state.image,
                                                       state.config.sigma)
                state.features_sigma = state.config.sigma
            res = segment(state.image, seed, state.config, barriers,
                          feats=state.features)
            state.result = res
            verts = [[float(c) for c in row] for row in res.contour.vertices]
            return {"ok": True,
                    "contour": {"closed": True, "lifted": False,
                                "vertices": verts},
                    "q": list(res.q), "a": list(res.a), "b": list(res.b),
                    "timings_ms": res.timings_ms,
                    "intermediates": [f"/sessions/{sid}/fields/{n}"
                                      for n in _FIELD_NAMES]}
        except GeosegError as exc:
            return JSONResponse({"ok": False, "error": str(exc),
                                 "hint": "enlarge T, move the seed, or relax "
                                         "barriers"}, status_code=200)
        finally:
            state.lock.release()

    @app.get("/sessions/{sid}/fields/{name}")
    async def get_field(sid: str, name: str):
        state = get_session(sid)
        if state is None:
            return error(404, "unknown session")
        res = state.result
        if res is None:
            return error(404, "no segmentation result yet")
        if name == "theta_z.pgm":
            return Response(_mask_pgm_bytes(res.theta_z),
                            media_type="image/x-portable-graymap")
        if name == "A.pgm":
            return Response(_mask_pgm_bytes(res.obstacle),
                            media_type="image/x-portable-graymap")
        if name == "region.pgm":
            return Response(_mask_pgm_bytes(res.region),
                            media_type="image/x-portable-graymap")
        if name == "psi.f32":
            psi = (res.hom.psi if res.hom is not None
                   else np.ones(res.region.shape))
            return Response(field_f32_bytes(np.minimum(psi, 1e6)),
                            media_type="application/octet-stream")
        if name == "distance.f32":
            d = (res.hom.d if res.hom is not None
                 else np.zeros(res.region.shape))
            return Response(field_f32_bytes(d),
                            media_type="application/octet-stream")
        if name == "gq.json":
            return JSONResponse({"closed": True, "lifted": res.gq.lifted,
                                 "vertices": [[float(c) for c in row]
                                              for row in res.gq.vertices]})
        if name == "a_b.json":
            return JSONResponse({"a": list(res.a), "b": list(res.b),
                                 "q": list(res.q)})
        return error(404, f"unknown field {name!r}")

    @app.delete("/sessions/{sid}")
    async def delete_session(sid: str):
        if sid not in sessions:
            return error(404, "unknown session")
        del sessions[sid]
        return {"ok": True}

    return app


def _mask_pgm_bytes(mask: np.ndarray) -> bytes:
    mask = np.asarray(mask, dtype=bool)
    h, w = mask.shape
    return (f"P5\n{w} {h}\n255\n".encode()
            + np.where(mask, 255, 0).astype(np.uint8).tobytes())


app = create_app()


def main() -> None:
    import uvicorn

    port = int(os.environ.get("GEOSEG_PORT", "8787"))
    uvicorn.run(app, host="127.0.0.1", port=port)


if __name__ == "__main__":
    main()
