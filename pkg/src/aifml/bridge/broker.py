"""Loopback MQTT 3.1.1 broker for tests and classrooms without mosquitto.

Routes PUBLISH packets to matching subscriptions; acknowledges QoS-1
publishes with PUBACK.  Messages are forwarded to subscribers at QoS 0
(a legal downgrade of the granted maximum QoS) which keeps the broker
stateless; at-least-once delivery semantics between publisher and broker
are honored.
"""

from __future__ import annotations

import socket
import struct
import threading

from . import mqtt


class MqttBroker:
    def __init__(self, host: str = "127.0.0.1", port: int = 0):
        self._server = socket.create_server((host, port))
        self.host, self.port = self._server.getsockname()[:2]
        self._subs: list[tuple[socket.socket, str]] = []
        self._lock = threading.Lock()
        self._running = threading.Event()
        self._thread: threading.Thread | None = None
        self._clients: list[socket.socket] = []

    def start(self) -> "MqttBroker":
        self._running.set()
        self._thread = threading.Thread(target=self._accept_loop, daemon=True)
        self._thread.start()
        return self

    def _accept_loop(self) -> None:
        while self._running.is_set():
            try:
                conn, _ = self._server.accept()
            except OSError:
                return
            with self._lock:
                self._clients.append(conn)
            threading.Thread(target=self._serve_client, args=(conn,), daemon=True).start()

    def _serve_client(self, conn: socket.socket) -> None:
        try:
            ptype, _, _ = mqtt.read_packet(conn)
            if ptype != mqtt.CONNECT:
                return
            conn.sendall(mqtt.encode_packet(mqtt.CONNACK, 0, bytes([0, 0])))
            while self._running.is_set():
                ptype, flags, body = mqtt.read_packet(conn)
                if ptype == mqtt.SUBSCRIBE:
                    self._handle_subscribe(conn, body)
                elif ptype == mqtt.PUBLISH:
                    self._handle_publish(conn, flags, body)
                elif ptype == mqtt.PINGREQ:
                    conn.sendall(mqtt.encode_packet(mqtt.PINGRESP, 0, b""))
                elif ptype == mqtt.DISCONNECT:
                    return
        except (mqtt.MqttError, OSError):
            pass
        finally:
            self._drop(conn)

    def _handle_subscribe(self, conn: socket.socket, body: bytes) -> None:
        packet_id = struct.unpack(">H", body[:2])[0]
        rest = body[2:]
        granted = bytearray()
        while rest:
            tlen = struct.unpack(">H", rest[:2])[0]
            topic = rest[2:2 + tlen].decode("utf-8")
            rest = rest[2 + tlen + 1:]  # skip requested QoS byte
            with self._lock:
                self._subs.append((conn, topic))
            granted.append(0)
        conn.sendall(mqtt.encode_packet(mqtt.SUBACK, 0, struct.pack(">H", packet_id) + bytes(granted)))

    def _handle_publish(self, conn: socket.socket, flags: int, body: bytes) -> None:
        topic, payload, qos, packet_id = mqtt.parse_publish(flags, body)
        if qos > 0:
            conn.sendall(mqtt.encode_packet(mqtt.PUBACK, 0, struct.pack(">H", packet_id)))
        packet = mqtt.build_publish(topic, payload, 0)
        with self._lock:
            targets = [sub_conn for sub_conn, pattern in self._subs
                       if mqtt.topic_matches(pattern, topic)]
        for target in targets:
            try:
                target.sendall(packet)
            except OSError:
                self._drop(target)

    def _drop(self, conn: socket.socket) -> None:
        with self._lock:
            self._subs = [(c, p) for c, p in self._subs if c is not conn]
            if conn in self._clients:
                self._clients.remove(conn)
        try:
            conn.close()
        except OSError:
            pass

    def stop(self) -> None:
        self._running.clear()
        try:
            self._server.close()
        except OSError:
            pass
        with self._lock:
            clients = list(self._clients)
        for conn in clients:
            self._drop(conn)
