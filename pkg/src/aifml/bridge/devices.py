"""Device registry, expression mapping, dispatch, and device simulators.

Devices receive :class:`InferenceMessage` records as JSON, either on MQTT
topic ``aifml/<device_id>/infer`` (QoS 1) or by HTTP POST.  Messages carry
a per-device sequence number; simulators are idempotent and monotone under
the duplicates/reordering that at-least-once delivery allows.  The JSON
schema is documented in ``docs/wire.md``.
"""

from __future__ import annotations

import json
import threading
import time
from dataclasses import dataclass, field, asdict
from http.server import BaseHTTPRequestHandler, ThreadingHTTPServer

import httpx

from ..inference import InferenceResult
from .mqtt import MqttClient, MqttError

DEVICE_KINDS = ("kebbi", "lt", "mooncar", "custom")

# bounded exponential backoff for publish retries and simulator reconnects
RETRY_DELAYS = (0.1, 0.2, 0.4)


class DispatchError(RuntimeError):
    pass


@dataclass(frozen=True)
class ExpressionMap:
    """Ordered partition of an output domain into named expression bands.

    Intervals are left-closed right-open, except the last which is closed.
    """
    entries: tuple[tuple[float, float, str], ...]

    def validate(self, domain: tuple[float, float]) -> list[str]:
        problems = []
        if not self.entries:
            return ["expression map is empty"]
        lo, hi = domain
        if self.entries[0][0] != lo:
            problems.append(f"first interval starts at {self.entries[0][0]}, domain starts at {lo}")
        if self.entries[-1][1] != hi:
            problems.append(f"last interval ends at {self.entries[-1][1]}, domain ends at {hi}")
        for i, (a, b, _) in enumerate(self.entries):
            if not a < b:
                problems.append(f"interval {i} is empty ([{a}, {b}))")
            if i and a != self.entries[i - 1][1]:
                problems.append(f"gap or overlap between interval {i - 1} and {i}")
        return problems

    def map(self, value: float) -> str:
        lo = self.entries[0][0]
        hi = self.entries[-1][1]
        value = min(max(value, lo), hi)
        for a, b, name in self.entries[:-1]:
            if a <= value < b:
                return name
        return self.entries[-1][2]


def map_expression(value: float, m: ExpressionMap) -> str:
    return m.map(value)


@dataclass(frozen=True)
class DeviceDescriptor:
    device_id: str
    kind: str                 # kebbi | lt | mooncar | custom
    transport: str            # mqtt | http
    address: str              # mqtt topic or http URL
    expression_map: ExpressionMap
    output_variable: str      # which crisp output drives the expression

    def __post_init__(self):
        if self.kind not in DEVICE_KINDS:
            raise ValueError(f"unknown device kind {self.kind!r}")
        if self.transport not in ("mqtt", "http"):
            raise ValueError(f"unknown transport {self.transport!r}")
        if not self.address:
            raise ValueError("device address must be non-empty")

    def to_json(self) -> dict:
        d = asdict(self)
        d["expression_map"] = [list(e) for e in self.expression_map.entries]
        return d

    @staticmethod
    def from_json(d: dict) -> "DeviceDescriptor":
        emap = ExpressionMap(tuple((float(a), float(b), str(name))
                                   for a, b, name in d["expression_map"]))
        return DeviceDescriptor(d["device_id"], d["kind"], d["transport"],
                                d["address"], emap, d["output_variable"])


def mqtt_topic(device_id: str) -> str:
    return f"aifml/{device_id}/infer"


@dataclass(frozen=True)
class InferenceMessage:
    sequence: int
    system_name: str
    inputs: dict[str, float]
    outputs: dict[str, float]
    expression: str
    defaulted: dict[str, bool]
    timestamp: int  # milliseconds since epoch

    def to_json(self) -> str:
        return json.dumps({
            "sequence": self.sequence,
            "system_name": self.system_name,
            "inputs": self.inputs,
            "outputs": self.outputs,
            "expression": self.expression,
            "defaulted": self.defaulted,
            "timestamp": self.timestamp,
        })

    @staticmethod
    def from_json(raw: str | bytes) -> "InferenceMessage":
        d = json.loads(raw)
        return InferenceMessage(int(d["sequence"]), d["system_name"],
                                {k: float(v) for k, v in d["inputs"].items()},
                                {k: float(v) for k, v in d["outputs"].items()},
                                d["expression"],
                                {k: bool(v) for k, v in d["defaulted"].items()},
                                int(d["timestamp"]))


class DeviceRegistry:
    def __init__(self):
        self._devices: dict[str, DeviceDescriptor] = {}
        self._lock = threading.Lock()

    def register(self, descriptor: DeviceDescriptor) -> None:
        with self._lock:
            self._devices[descriptor.device_id] = descriptor

    def get(self, device_id: str) -> DeviceDescriptor:
        with self._lock:
            if device_id not in self._devices:
                raise KeyError(f"unknown device {device_id!r}")
            return self._devices[device_id]

    def all(self) -> list[DeviceDescriptor]:
        with self._lock:
            return list(self._devices.values())


class Dispatcher:
    """Builds InferenceMessages and delivers them per device transport."""

    def __init__(self, registry: DeviceRegistry,
                 broker_host: str | None = None, broker_port: int = 1883,
                 clock=lambda: int(time.time() * 1000)):
        self.registry = registry
        self.broker_host = broker_host
        self.broker_port = broker_port
        self._clock = clock
        self._sequences: dict[str, int] = {}
        self._client: MqttClient | None = None
        self._lock = threading.Lock()

    def _mqtt(self) -> MqttClient:
        with self._lock:
            if self._client is None or not self._client.connected:
                if self.broker_host is None:
                    raise DispatchError("no MQTT broker configured")
                client = MqttClient(self.broker_host, self.broker_port, "aifml-dispatcher")
                client.connect()
                self._client = client
            return self._client

    def build_message(self, result: InferenceResult, inputs: dict[str, float],
                      system_name: str, device: DeviceDescriptor) -> InferenceMessage:
        with self._lock:
            seq = self._sequences.get(device.device_id, 0) + 1
            self._sequences[device.device_id] = seq
        expression = map_expression(result.outputs[device.output_variable],
                                    device.expression_map)
        return InferenceMessage(seq, system_name, dict(inputs), dict(result.outputs),
                                expression, dict(result.defaulted), self._clock())

    def publish_inference(self, result: InferenceResult, inputs: dict[str, float],
                          system_name: str, device_id: str) -> InferenceMessage:
        """Deliver to one registered device, retrying with bounded backoff."""
        device = self.registry.get(device_id)
        message = self.build_message(result, inputs, system_name, device)
        payload = message.to_json().encode("utf-8")
        last_error: Exception | None = None
        for attempt, delay in enumerate((0.0,) + RETRY_DELAYS):
            if delay:
                time.sleep(delay)
            try:
                if device.transport == "mqtt":
                    self._mqtt().publish(mqtt_topic(device.device_id), payload, qos=1)
                else:
                    response = httpx.post(device.address, content=payload,
                                          headers={"content-type": "application/json"},
                                          timeout=5.0)
                    if response.status_code != 200:
                        raise DispatchError(f"HTTP {response.status_code} from {device.address}")
                return message
            except (MqttError, DispatchError, httpx.HTTPError, OSError) as exc:
                last_error = exc
                with self._lock:
                    self._client = None  # force reconnect on next attempt
        raise DispatchError(f"delivery to {device_id!r} failed: {last_error}")

    def close(self) -> None:
        with self._lock:
            if self._client is not None:
                self._client.close()
                self._client = None


def render_state(kind: str, message: InferenceMessage, output_variable: str):
    """Kind-specific rendering of a received message."""
    if kind == "mooncar":
        return f"motion:{message.expression}"
    if kind == "lt":
        return message.outputs.get(output_variable)
    return message.expression  # kebbi and custom show the expression itself


class DeviceSimulator:
    """Protocol-faithful stand-in for a physical AIoT device.

    Subscribes to its MQTT topic (or accepts HTTP POSTs), keeps monotone,
    idempotent state keyed by message sequence, and serves GET /state on a
    local port for tests and the studio UI.
    """

    def __init__(self, descriptor: DeviceDescriptor,
                 broker_host: str | None = None, broker_port: int = 1883,
                 state_port: int = 0):
        self.descriptor = descriptor
        self.broker_host = broker_host
        self.broker_port = broker_port
        self._state_lock = threading.Lock()
        self.state = {
            "device_id": descriptor.device_id,
            "kind": descriptor.kind,
            "expression": None,
            "rendered": None,
            "message_count": 0,
            "last_sequence": 0,
            "last_message": None,
            "connected": False,
        }
        self._client: MqttClient | None = None
        self._stop = threading.Event()
        handler = self._make_handler()
        self._http = ThreadingHTTPServer(("127.0.0.1", state_port), handler)
        self.state_port = self._http.server_address[1]
        self._threads: list[threading.Thread] = []

    def handle_payload(self, payload: bytes) -> None:
        try:
            message = InferenceMessage.from_json(payload)
        except (ValueError, KeyError):
            return
        with self._state_lock:
            if message.sequence <= self.state["last_sequence"]:
                return  # duplicate or stale delivery
            self.state["last_sequence"] = message.sequence
            self.state["message_count"] += 1
            self.state["expression"] = message.expression
            self.state["rendered"] = render_state(self.descriptor.kind, message,
                                                  self.descriptor.output_variable)
            self.state["last_message"] = json.loads(message.to_json())

    def snapshot(self) -> dict:
        with self._state_lock:
            return dict(self.state)

    def _make_handler(self):
        simulator = self

        class StateHandler(BaseHTTPRequestHandler):
            def do_GET(self):
                if self.path != "/state":
                    self.send_error(404)
                    return
                body = json.dumps(simulator.snapshot()).encode("utf-8")
                self.send_response(200)
                self.send_header("content-type", "application/json")
                self.send_header("content-length", str(len(body)))
                self.end_headers()
                self.wfile.write(body)

            def do_POST(self):
                # HTTP transport path (AIoT-FML-LT style)
                if self.path not in ("/infer", "/"):
                    self.send_error(404)
                    return
                length = int(self.headers.get("content-length", 0))
                simulator.handle_payload(self.rfile.read(length))
                self.send_response(200)
                self.send_header("content-length", "0")
                self.end_headers()

            def log_message(self, *args):
                pass

        return StateHandler

    def _mqtt_loop(self) -> None:
        delay_index = 0
        while not self._stop.is_set():
            try:
                client = MqttClient(self.broker_host, self.broker_port,
                                    f"sim-{self.descriptor.device_id}",
                                    on_message=lambda topic, payload: self.handle_payload(payload))
                client.connect()
                client.subscribe(mqtt_topic(self.descriptor.device_id), qos=1)
                self._client = client
                with self._state_lock:
                    self.state["connected"] = True
                delay_index = 0
                while client.connected and not self._stop.is_set():
                    self._stop.wait(0.05)
            except (MqttError, OSError):
                pass
            with self._state_lock:
                self.state["connected"] = False
            if not self._stop.is_set():
                self._stop.wait(RETRY_DELAYS[min(delay_index, len(RETRY_DELAYS) - 1)])
                delay_index += 1

    def start(self) -> "DeviceSimulator":
        http_thread = threading.Thread(target=self._http.serve_forever, daemon=True)
        http_thread.start()
        self._threads.append(http_thread)
        if self.descriptor.transport == "mqtt":
            if self.broker_host is None:
                raise ValueError("mqtt simulator needs a broker address")
            mqtt_thread = threading.Thread(target=self._mqtt_loop, daemon=True)
            mqtt_thread.start()
            self._threads.append(mqtt_thread)
        return self

    def stop(self) -> None:
        self._stop.set()
        if self._client is not None:
            self._client.close()
        self._http.shutdown()
        self._http.server_close()
