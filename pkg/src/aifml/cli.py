"""Command-line entry points.

Exit codes: 0 success, 1 validation/domain error, 2 usage error,
3 I/O or network error.
"""

from __future__ import annotations

import json
import sys as _sys
from pathlib import Path

import click

from .fml import FmlError, parse_fml, serialize_fml, validate
from .inference import infer
from .pso import PsoConfig, pso_train, sensitivity_sweep, sweep_csv
from .dataio import DatasetError, load_dataset, rmse

EXIT_DOMAIN = 1
EXIT_USAGE = 2
EXIT_IO = 3


def _read_file(path: str) -> str:
    try:
        return Path(path).read_text("utf-8")
    except OSError as exc:
        click.echo(f"error: cannot read {path}: {exc}", err=True)
        _sys.exit(EXIT_IO)


def _write_file(path: str, text: str) -> None:
    try:
        Path(path).write_text(text, "utf-8")
    except OSError as exc:
        click.echo(f"error: cannot write {path}: {exc}", err=True)
        _sys.exit(EXIT_IO)


def _load_system(path: str):
    try:
        return parse_fml(_read_file(path))
    except FmlError as exc:
        click.echo(f"error: {exc}", err=True)
        _sys.exit(EXIT_DOMAIN)


def _load_data(path: str, system):
    try:
        return load_dataset(_read_file(path), system)
    except DatasetError as exc:
        click.echo(f"error: {exc}", err=True)
        _sys.exit(EXIT_DOMAIN)


@click.group()
def main():
    """AI-FML engine: validate, infer, train, sweep, serve, simulate."""


@main.command("validate")
@click.option("--system", "system_path", required=True, help="FML document to check")
def cmd_validate(system_path):
    """Check an FML document and print every violation."""
    text = _read_file(system_path)
    try:
        system = parse_fml(text)
    except FmlError as exc:
        if exc.violations:
            for violation in exc.violations:
                click.echo(str(violation))
        else:
            click.echo(str(exc))
        _sys.exit(EXIT_DOMAIN)
    violations = validate(system)
    if violations:
        for violation in violations:
            click.echo(str(violation))
        _sys.exit(EXIT_DOMAIN)
    click.echo("OK")


def _parse_inputs(pairs, system):
    inputs = {}
    names = {v.name for v in system.inputs}
    for pair in pairs:
        if "=" not in pair:
            raise click.UsageError(f"--input must be name=value, got {pair!r}")
        name, _, raw = pair.partition("=")
        if name not in names:
            raise click.UsageError(f"unknown input variable {name!r}")
        try:
            inputs[name] = float(raw)
        except ValueError:
            raise click.UsageError(f"value for {name!r} is not a number: {raw!r}")
    missing = names - inputs.keys()
    if missing:
        raise click.UsageError(f"missing input variable(s): {', '.join(sorted(missing))}")
    return inputs


@main.command("infer")
@click.option("--system", "system_path", required=True)
@click.option("--input", "inputs", multiple=True, help="crisp input as name=value")
@click.option("--json", "as_json", is_flag=True, help="emit the API wire format")
def cmd_infer(system_path, inputs, as_json):
    """Run one inference and print the result."""
    system = _load_system(system_path)
    values = _parse_inputs(inputs, system)
    result = infer(system, values)
    if as_json:
        click.echo(json.dumps(result.to_json_dict()))
        return
    for name, value in result.outputs.items():
        suffix = "  (defaulted)" if result.defaulted[name] else ""
        click.echo(f"{name} = {value!r}{suffix}")
    for rule_id, strength in result.rule_activations.items():
        click.echo(f"  rule {rule_id}: {strength!r}")
    if any(result.defaulted.values()):
        click.echo("defaulted=true")


def _history_csv(history) -> str:
    lines = ["evaluation,best_fitness"]
    for i, best in enumerate(history.best_fitness, start=1):
        lines.append(f"{i},{best!r}")
    return "\n".join(lines) + "\n"


@main.command("train")
@click.option("--system", "system_path", required=True)
@click.option("--data", "data_path", required=True)
@click.option("--particles", default=20, show_default=True)
@click.option("--evals", default=2000, show_default=True)
@click.option("--seed", default=0, show_default=True)
@click.option("--out", "out_path", required=True, help="where to write the trained FML")
@click.option("--history", "history_path", default=None, help="optional history CSV")
def cmd_train(system_path, data_path, particles, evals, seed, out_path, history_path):
    """Tune membership functions with PSO and write the trained system."""
    system = _load_system(system_path)
    data = _load_data(data_path, system)
    try:
        cfg = PsoConfig(swarm_size=particles, max_evaluations=evals, seed=seed)
    except ValueError as exc:
        raise click.UsageError(str(exc))
    trained, history = pso_train(system, data, cfg)
    _write_file(out_path, serialize_fml(trained))
    if history_path:
        _write_file(history_path, _history_csv(history))
    click.echo(f"evaluations: {history.evaluations}")
    click.echo(f"final_mse: {history.best_fitness[-1]!r}")
    click.echo(f"final_rmse: {rmse(trained, data)!r}")


def _int_list(raw: str, option: str) -> list[int]:
    try:
        return [int(x) for x in raw.split(",") if x.strip()]
    except ValueError:
        raise click.UsageError(f"{option} must be a comma-separated integer list")


@main.command("sweep")
@click.option("--system", "system_path", required=True)
@click.option("--data", "data_path", required=True)
@click.option("--particles-list", default="10,20,40", show_default=True)
@click.option("--evals-list", default="2000", show_default=True)
@click.option("--seeds", default=11, show_default=True, help="number of seeds (0..K-1)")
@click.option("--out", "out_path", required=True, help="sweep table CSV")
def cmd_sweep(system_path, data_path, particles_list, evals_list, seeds, out_path):
    """Parameter-sensitivity sweep over swarm sizes and evaluation budgets."""
    system = _load_system(system_path)
    data = _load_data(data_path, system)
    particles = _int_list(particles_list, "--particles-list")
    budgets = _int_list(evals_list, "--evals-list")
    if not particles or not budgets or seeds < 1:
        raise click.UsageError("sweep needs non-empty particle/budget lists and seeds >= 1")
    rows = sensitivity_sweep(
        system, data, particles, budgets, list(range(seeds)),
        progress=lambda p, b, s, mse: click.echo(f"particles={p} budget={b} seed={s} mse={mse:.6f}", err=True))
    _write_file(out_path, sweep_csv(rows))
    click.echo(f"wrote {len(rows)} rows to {out_path}")


def _parse_broker(raw: str) -> tuple[str, int]:
    host, _, port = raw.partition(":")
    return host or "127.0.0.1", int(port) if port else 1883


@main.command("serve")
@click.option("--system", "system_path", required=True)
@click.option("--port", default=8000, show_default=True)
@click.option("--broker", default=None, help="MQTT broker as host[:port]; omit for HTTP-only mode")
def cmd_serve(system_path, port, broker):
    """Serve the HTTP/WebSocket API (inference keeps working without a broker)."""
    import uvicorn
    from .bridge.service import create_app

    system = _load_system(system_path)
    broker_host, broker_port = _parse_broker(broker) if broker else (None, 1883)
    if broker_host:
        from .bridge.mqtt import MqttClient, MqttError
        probe = MqttClient(broker_host, broker_port, "aifml-probe")
        try:
            probe.connect(timeout=2.0)
            probe.close()
        except (MqttError, OSError) as exc:
            click.echo(f"warning: broker {broker_host}:{broker_port} unreachable ({exc}); "
                       "running in degraded mode, HTTP inference stays available", err=True)
    app = create_app(system, broker_host, broker_port)
    uvicorn.run(app, host="127.0.0.1", port=port, log_level="warning")


@main.command("simulate")
@click.option("--device-kind", type=click.Choice(["kebbi", "lt", "mooncar", "custom"]),
              default="kebbi", show_default=True)
@click.option("--device-id", required=True)
@click.option("--broker", required=True, help="MQTT broker as host[:port]")
@click.option("--state-port", default=0, show_default=True, help="0 picks a free port")
@click.option("--output-variable", default="ac_level", show_default=True)
@click.option("--expressions", default="0:3:cool_face,3:7:neutral_face,7:10:hot_face",
              show_default=True, help="bands as lo:hi:name, comma-separated")
def cmd_simulate(device_kind, device_id, broker, state_port, output_variable, expressions):
    """Run a simulated AIoT device subscribed to its MQTT topic."""
    from .bridge.devices import DeviceDescriptor, DeviceSimulator, ExpressionMap, mqtt_topic

    try:
        entries = tuple((float(a), float(b), name)
                        for a, b, name in (band.split(":") for band in expressions.split(",")))
    except ValueError:
        raise click.UsageError("--expressions must be lo:hi:name,lo:hi:name,...")
    broker_host, broker_port = _parse_broker(broker)
    descriptor = DeviceDescriptor(device_id, device_kind, "mqtt", mqtt_topic(device_id),
                                  ExpressionMap(entries), output_variable)
    simulator = DeviceSimulator(descriptor, broker_host, broker_port, state_port)
    simulator.start()
    click.echo(f"simulator {device_id} ({device_kind}) on topic {mqtt_topic(device_id)}; "
               f"state at http://127.0.0.1:{simulator.state_port}/state")
    try:
        import time
        while True:
            time.sleep(1)
    except KeyboardInterrupt:
        simulator.stop()


if __name__ == "__main__":
    main()
