from .devices import (
    DeviceDescriptor,
    DeviceRegistry,
    DeviceSimulator,
    Dispatcher,
    DispatchError,
    ExpressionMap,
    InferenceMessage,
    map_expression,
    mqtt_topic,
)
from .broker import MqttBroker
from .mqtt import MqttClient, MqttError
from .service import create_app

__all__ = [
    "DeviceDescriptor", "DeviceRegistry", "DeviceSimulator", "Dispatcher",
    "DispatchError", "ExpressionMap", "InferenceMessage", "map_expression",
    "mqtt_topic", "MqttBroker", "MqttClient", "MqttError", "create_app",
]
