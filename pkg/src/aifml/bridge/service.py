"""HTTP/WebSocket service hosting the fuzzy engine and device dispatch.

The current system lives behind an atomic swap: readers always see a
consistent snapshot, PUT /system replaces it wholesale.  Training runs as
a single-flight background thread; inference stays available against the
pre-training system while a job runs.  Progress and inference events are
broadcast on the WS /events stream.  Endpoint and payload schemas are
documented in ``docs/wire.md``.
"""

from __future__ import annotations

import asyncio
import json
import logging
import threading
import uuid
from contextlib import asynccontextmanager

from fastapi import FastAPI, Request, Response, WebSocket, WebSocketDisconnect
from fastapi.responses import JSONResponse

from ..fml import FuzzySystem, parse_fml, serialize_fml
from ..inference import infer
from ..pso import PsoConfig, pso_train
from ..dataio import Dataset, DatasetError, load_dataset, demo_dataset
from .devices import DeviceDescriptor, DeviceRegistry, Dispatcher, DispatchError

log = logging.getLogger("aifml.service")


class TrainingJob:
    def __init__(self, job_id: str, cfg: PsoConfig):
        self.id = job_id
        self.cfg = cfg
        self.status = "running"
        self.best_fitness: list[float] = []
        self.result_fml: str | None = None
        self.error: str | None = None


class ServiceState:
    def __init__(self, system: FuzzySystem,
                 broker_host: str | None = None, broker_port: int = 1883):
        self._system = system
        self._system_lock = threading.Lock()
        self.registry = DeviceRegistry()
        self.dispatcher = Dispatcher(self.registry, broker_host, broker_port)
        self.job: TrainingJob | None = None
        self.job_lock = threading.Lock()
        self.loop: asyncio.AbstractEventLoop | None = None
        self.subscribers: set[asyncio.Queue] = set()

    @property
    def system(self) -> FuzzySystem:
        with self._system_lock:
            return self._system

    @system.setter
    def system(self, value: FuzzySystem) -> None:
        with self._system_lock:
            self._system = value

    def broadcast(self, event: dict) -> None:
        loop = self.loop
        if loop is None or loop.is_closed():
            return
        payload = json.dumps(event)
        def push():
            for queue in list(self.subscribers):
                queue.put_nowait(payload)
        loop.call_soon_threadsafe(push)


def create_app(system: FuzzySystem, broker_host: str | None = None,
               broker_port: int = 1883) -> FastAPI:
    state = ServiceState(system, broker_host, broker_port)

    @asynccontextmanager
    async def lifespan(_: FastAPI):
        state.loop = asyncio.get_running_loop()
        yield

    app = FastAPI(title="aifml", lifespan=lifespan)
    app.state.service = state

    @app.get("/system")
    def get_system():
        return Response(serialize_fml(state.system), media_type="application/xml")

    @app.put("/system")
    async def put_system(request: Request):
        with state.job_lock:
            if state.job is not None and state.job.status == "running":
                return JSONResponse({"detail": "training job in progress"}, status_code=409)
        body = await request.body()
        try:
            new_system = parse_fml(body)
        except Exception as exc:
            violations = [{"path": v.path, "message": v.message}
                          for v in getattr(exc, "violations", [])]
            return JSONResponse({"detail": str(exc), "violations": violations},
                                status_code=422)
        state.system = new_system
        state.broadcast({"type": "system_replaced", "name": new_system.name})
        return {"ok": True, "name": new_system.name}

    @app.post("/infer")
    async def post_infer(request: Request):
        body = await request.json()
        sys = state.system
        try:
            inputs = {name: float(value) for name, value in body.items()}
            result = infer(sys, inputs)
        except (ValueError, TypeError, KeyError) as exc:
            return JSONResponse({"detail": str(exc)}, status_code=422)
        for device in state.registry.all():
            try:
                message = state.dispatcher.publish_inference(result, inputs, sys.name,
                                                             device.device_id)
                state.broadcast({"type": "inference_dispatched",
                                 "device_id": device.device_id,
                                 "message": json.loads(message.to_json())})
            except DispatchError as exc:
                log.warning("dispatch to %s failed: %s", device.device_id, exc)
                state.broadcast({"type": "dispatch_failed",
                                 "device_id": device.device_id, "error": str(exc)})
        payload = result.to_json_dict()
        state.broadcast({"type": "inference", "inputs": inputs, "result": payload})
        return payload

    @app.post("/train")
    async def post_train(request: Request):
        body = await request.json()
        data_csv = body.pop("data_csv", None)
        try:
            cfg = PsoConfig(**{k: body[k] for k in body
                               if k in PsoConfig.__dataclass_fields__})
        except (TypeError, ValueError) as exc:
            return JSONResponse({"detail": str(exc)}, status_code=422)
        template = state.system
        try:
            if data_csv is not None:
                data = load_dataset(data_csv, template)
            else:
                data = demo_dataset()
                if set(data.columns) != {v.name for v in template.variables}:
                    return JSONResponse(
                        {"detail": "no data_csv given and bundled dataset does not "
                                   "match the current system"}, status_code=422)
        except DatasetError as exc:
            return JSONResponse({"detail": str(exc)}, status_code=422)

        with state.job_lock:
            if state.job is not None and state.job.status == "running":
                return JSONResponse({"detail": "training job in progress"}, status_code=409)
            job = TrainingJob(uuid.uuid4().hex, cfg)
            state.job = job

        def progress(evaluation: int, best: float):
            job.best_fitness.append(best)
            if evaluation % 50 == 0 or evaluation == cfg.max_evaluations:
                state.broadcast({"type": "training_progress", "job_id": job.id,
                                 "evaluation": evaluation, "best_fitness": best})

        def run():
            try:
                trained, _ = pso_train(template, data, cfg, progress=progress)
                job.result_fml = serialize_fml(trained)
                job.status = "done"
            except Exception as exc:  # surfaced through GET /train/<id>
                job.error = str(exc)
                job.status = "error"
            state.broadcast({"type": "training_finished", "job_id": job.id,
                             "status": job.status})

        threading.Thread(target=run, daemon=True).start()
        return {"job_id": job.id}

    @app.get("/train/{job_id}")
    def get_train(job_id: str):
        job = state.job
        if job is None or job.id != job_id:
            return JSONResponse({"detail": "unknown job"}, status_code=404)
        body = {"job_id": job.id, "status": job.status,
                "evaluations": len(job.best_fitness),
                "best_fitness": list(job.best_fitness)}
        if job.result_fml is not None:
            body["system"] = job.result_fml
        if job.error is not None:
            body["error"] = job.error
        return body

    @app.get("/devices")
    def get_devices():
        return [d.to_json() for d in state.registry.all()]

    @app.put("/devices/{device_id}")
    async def put_device(device_id: str, request: Request):
        body = await request.json()
        body.setdefault("device_id", device_id)
        if body["device_id"] != device_id:
            return JSONResponse({"detail": "device_id mismatch"}, status_code=422)
        try:
            descriptor = DeviceDescriptor.from_json(body)
        except (KeyError, ValueError, TypeError) as exc:
            return JSONResponse({"detail": str(exc)}, status_code=422)
        try:
            domain = state.system.variable(descriptor.output_variable).domain
        except KeyError as exc:
            return JSONResponse({"detail": str(exc)}, status_code=422)
        problems = descriptor.expression_map.validate(domain)
        if problems:
            return JSONResponse({"detail": "invalid expression map",
                                 "violations": problems}, status_code=422)
        state.registry.register(descriptor)
        return descriptor.to_json()

    @app.websocket("/events")
    async def events(ws: WebSocket):
        await ws.accept()
        queue: asyncio.Queue = asyncio.Queue()
        state.subscribers.add(queue)
        try:
            while True:
                await ws.send_text(await queue.get())
        except (WebSocketDisconnect, RuntimeError):
            pass
        finally:
            state.subscribers.discard(queue)

    return app
