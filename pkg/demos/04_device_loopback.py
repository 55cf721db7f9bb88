"""End-to-end AIoT loopback: broker, simulated robot, dispatcher.

Starts the in-process MQTT broker and a simulated Kebbi robot, then runs
inferences and dispatches each result to the robot, which maps the crisp
air-conditioner level to a facial expression.
"""

import time

from aifml.bridge import (
    DeviceDescriptor,
    DeviceRegistry,
    DeviceSimulator,
    Dispatcher,
    ExpressionMap,
    MqttBroker,
    mqtt_topic,
)
from aifml.dataio import demo_system
from aifml.inference import infer

broker = MqttBroker().start()
print(f"broker listening on {broker.host}:{broker.port}")

expressions = ExpressionMap(((0.0, 3.0, "cool_face"),
                             (3.0, 7.0, "neutral_face"),
                             (7.0, 10.0, "hot_face")))
robot = DeviceDescriptor("kebbi-demo", "kebbi", "mqtt",
                         mqtt_topic("kebbi-demo"), expressions, "ac_level")
simulator = DeviceSimulator(robot, broker.host, broker.port).start()
while not simulator.snapshot()["connected"]:
    time.sleep(0.02)
print(f"robot state endpoint: http://127.0.0.1:{simulator.state_port}/state")

registry = DeviceRegistry()
registry.register(robot)
dispatcher = Dispatcher(registry, broker.host, broker.port)

system = demo_system()
for temp, humidity in ((12.0, 35.0), (24.0, 55.0), (35.0, 85.0)):
    inputs = {"temp": temp, "humidity": humidity}
    result = infer(system, inputs)
    message = dispatcher.publish_inference(result, inputs, system.name, "kebbi-demo")
    while simulator.snapshot()["last_sequence"] < message.sequence:
        time.sleep(0.02)
    state = simulator.snapshot()
    print(f"temp={temp:4.1f} humidity={humidity:4.1f} -> "
          f"ac_level={result.outputs['ac_level']:.2f} -> robot shows {state['expression']}")

dispatcher.close()
simulator.stop()
broker.stop()
