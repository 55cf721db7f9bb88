"""Minimal MQTT 3.1.1 client (and packet codec).

Implements the subset the dispatch fabric needs: CONNECT/CONNACK,
PUBLISH at QoS 0/1 (with PUBACK), SUBSCRIBE/SUBACK, PINGREQ/PINGRESP and
DISCONNECT, over plain TCP.  Wire-compatible with standard brokers; the
in-package :mod:`aifml.bridge.broker` exists because the target
environment ships neither a broker binary nor an MQTT client library.
"""

from __future__ import annotations

import socket
import struct
import threading
from typing import Callable

CONNECT = 1
CONNACK = 2
PUBLISH = 3
PUBACK = 4
SUBSCRIBE = 8
SUBACK = 9
PINGREQ = 12
PINGRESP = 13
DISCONNECT = 14


class MqttError(ConnectionError):
    pass


def encode_varint(n: int) -> bytes:
    out = bytearray()
    while True:
        byte = n % 128
        n //= 128
        if n:
            out.append(byte | 0x80)
        else:
            out.append(byte)
            return bytes(out)


def encode_string(s: str) -> bytes:
    data = s.encode("utf-8")
    return struct.pack(">H", len(data)) + data


def encode_packet(ptype: int, flags: int, body: bytes) -> bytes:
    return bytes([(ptype << 4) | flags]) + encode_varint(len(body)) + body


def read_exact(sock: socket.socket, n: int) -> bytes:
    buf = b""
    while len(buf) < n:
        chunk = sock.recv(n - len(buf))
        if not chunk:
            raise MqttError("connection closed")
        buf += chunk
    return buf


def read_packet(sock: socket.socket) -> tuple[int, int, bytes]:
    """Read one full MQTT control packet; returns (type, flags, body)."""
    head = read_exact(sock, 1)[0]
    length = 0
    shift = 0
    while True:
        byte = read_exact(sock, 1)[0]
        length |= (byte & 0x7F) << shift
        if not byte & 0x80:
            break
        shift += 7
        if shift > 21:
            raise MqttError("malformed remaining length")
    body = read_exact(sock, length) if length else b""
    return head >> 4, head & 0x0F, body


def parse_publish(flags: int, body: bytes) -> tuple[str, bytes, int, int | None]:
    """Returns (topic, payload, qos, packet_id)."""
    qos = (flags >> 1) & 0x03
    tlen = struct.unpack(">H", body[:2])[0]
    topic = body[2:2 + tlen].decode("utf-8")
    rest = body[2 + tlen:]
    packet_id = None
    if qos > 0:
        packet_id = struct.unpack(">H", rest[:2])[0]
        rest = rest[2:]
    return topic, rest, qos, packet_id


def build_publish(topic: str, payload: bytes, qos: int = 0,
                  packet_id: int | None = None, dup: bool = False) -> bytes:
    flags = (qos << 1) | (0x08 if dup else 0)
    body = encode_string(topic)
    if qos > 0:
        body += struct.pack(">H", packet_id)
    return encode_packet(PUBLISH, flags, body + payload)


def topic_matches(pattern: str, topic: str) -> bool:
    """MQTT topic-filter matching with + and # wildcards."""
    p_parts = pattern.split("/")
    t_parts = topic.split("/")
    for i, p in enumerate(p_parts):
        if p == "#":
            return True
        if i >= len(t_parts):
            return False
        if p != "+" and p != t_parts[i]:
            return False
    return len(p_parts) == len(t_parts)


class MqttClient:
    """Threaded MQTT 3.1.1 client; ``publish`` at QoS 1 blocks for the PUBACK."""

    def __init__(self, host: str, port: int, client_id: str,
                 on_message: Callable[[str, bytes], None] | None = None):
        self.host = host
        self.port = port
        self.client_id = client_id
        self.on_message = on_message
        self._sock: socket.socket | None = None
        self._lock = threading.Lock()
        self._next_id = 1
        self._acks: dict[int, threading.Event] = {}
        self._reader: threading.Thread | None = None
        self._closed = threading.Event()

    def connect(self, timeout: float = 5.0) -> None:
        sock = socket.create_connection((self.host, self.port), timeout=timeout)
        sock.settimeout(None)
        body = (encode_string("MQTT") + bytes([4])        # protocol level 3.1.1
                + bytes([0x02])                            # clean session
                + struct.pack(">H", 60)                    # keepalive (s)
                + encode_string(self.client_id))
        sock.sendall(encode_packet(CONNECT, 0, body))
        ptype, _, ack = read_packet(sock)
        if ptype != CONNACK or ack[1] != 0:
            sock.close()
            raise MqttError(f"connection refused (CONNACK {ack!r})")
        self._sock = sock
        self._closed.clear()
        self._reader = threading.Thread(target=self._read_loop, daemon=True)
        self._reader.start()

    @property
    def connected(self) -> bool:
        return self._sock is not None and not self._closed.is_set()

    def _read_loop(self) -> None:
        try:
            while not self._closed.is_set():
                ptype, flags, body = read_packet(self._sock)
                if ptype == PUBLISH:
                    topic, payload, qos, packet_id = parse_publish(flags, body)
                    if qos > 0:
                        self._send(encode_packet(PUBACK, 0, struct.pack(">H", packet_id)))
                    if self.on_message is not None:
                        self.on_message(topic, payload)
                elif ptype == PUBACK:
                    (packet_id,) = struct.unpack(">H", body[:2])
                    event = self._acks.pop(packet_id, None)
                    if event is not None:
                        event.set()
                elif ptype == PINGRESP:
                    pass
        except (MqttError, OSError):
            pass
        finally:
            self._closed.set()

    def _send(self, data: bytes) -> None:
        with self._lock:
            if self._sock is None:
                raise MqttError("not connected")
            self._sock.sendall(data)

    def _claim_id(self) -> int:
        with self._lock:
            pid = self._next_id
            self._next_id = pid % 65535 + 1
            return pid

    def subscribe(self, topic: str, qos: int = 1) -> None:
        pid = self._claim_id()
        body = struct.pack(">H", pid) + encode_string(topic) + bytes([qos])
        self._send(encode_packet(SUBSCRIBE, 0x02, body))

    def publish(self, topic: str, payload: bytes, qos: int = 1,
                timeout: float = 5.0, dup: bool = False) -> None:
        if qos == 0:
            self._send(build_publish(topic, payload, 0))
            return
        pid = self._claim_id()
        event = threading.Event()
        self._acks[pid] = event
        self._send(build_publish(topic, payload, 1, pid, dup))
        if not event.wait(timeout):
            self._acks.pop(pid, None)
            raise MqttError(f"PUBACK timeout on {topic!r}")

    def close(self) -> None:
        self._closed.set()
        with self._lock:
            if self._sock is not None:
                try:
                    self._sock.sendall(encode_packet(DISCONNECT, 0, b""))
                except OSError:
                    pass
                try:
                    self._sock.close()
                except OSError:
                    pass
                self._sock = None
