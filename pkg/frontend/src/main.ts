/*
 * main.ts: wires the state atom, API client, and panels together.
 *
 * Single-page app with four tabs (variables, inference, training,
 * devices), one WebSocket subscription with automatic reconnect, and a
 * render loop driven entirely by state transitions.
 */

import { ApiClient, ApiError } from "./api.js";
import { parseFml } from "./fml.js";
import { initialState, reduce, type Action, type StudioState } from "./state.js";
import { renderDevicesPanel } from "./panels/devices.js";
import { renderInferencePanel } from "./panels/inference.js";
import { renderTrainingPanel } from "./panels/training.js";
import { renderVariablesPanel } from "./panels/variables.js";

const api = new ApiClient(window.location.origin.replace(/\/$/, ""));

let state: StudioState = initialState;
let activeTab: "variables" | "inference" | "training" | "devices" = "variables";

function dispatch(action: Action): void {
  state = reduce(state, action);
  render();
}

async function runInference(): Promise<void> {
  try {
    const result = await api.infer(state.inputs);
    dispatch({ type: "inference_received", result });
  } catch (error) {
    console.warn("inference failed", error);
  }
}

async function saveSystem(): Promise<void> {
  if (state.systemXml === null) return;
  try {
    await api.putSystemXml(state.systemXml);
    dispatch({ type: "system_loaded", xml: state.systemXml });
    void runInference();
  } catch (error) {
    if (error instanceof ApiError) {
      dispatch({
        type: "system_rejected",
        violations: error.violations.length > 0 ? error.violations : [{ path: "", message: error.detail }],
      });
    }
  }
}

async function startTraining(config: {
  swarm_size: number;
  max_evaluations: number;
  seed: number;
}): Promise<void> {
  try {
    const jobId = await api.startTraining(config);
    dispatch({ type: "training_started", jobId });
  } catch (error) {
    if (error instanceof ApiError) dispatch({ type: "training_rejected", error: error.detail });
  }
}

async function adoptTrainedSystem(): Promise<void> {
  const xml = state.training.resultXml;
  if (!xml) return;
  try {
    await api.putSystemXml(xml);
    dispatch({ type: "system_loaded", xml });
  } catch (error) {
    console.warn("adopt failed", error);
  }
}

function render(): void {
  const root = document.getElementById("app");
  if (!root) return;
  root.replaceChildren();

  const nav = document.createElement("nav");
  for (const tab of ["variables", "inference", "training", "devices"] as const) {
    const button = document.createElement("button");
    button.textContent = tab;
    button.className = tab === activeTab ? "tab active" : "tab";
    button.onclick = () => {
      activeTab = tab;
      render();
    };
    nav.append(button);
  }
  const link = document.createElement("span");
  link.className = state.connected ? "badge" : "badge stale";
  link.textContent = state.connected ? "live" : "reconnecting…";
  nav.append(link);
  root.append(nav);

  const panel = document.createElement("main");
  root.append(panel);

  if (!state.system) {
    panel.textContent = "loading system…";
    return;
  }

  switch (activeTab) {
    case "variables":
      renderVariablesPanel(panel, state.system, state.serverViolations, state.undoStack.length > 0, {
        onEdit: (system) => dispatch({ type: "system_edited", system }),
        onSave: () => void saveSystem(),
        onUndo: () => dispatch({ type: "undo" }),
      });
      break;
    case "inference":
      renderInferencePanel(panel, state.system, state.inputs, state.inference, {
        onInputChange: (name, value) => {
          dispatch({ type: "input_changed", name, value });
          void runInference();
        },
      });
      break;
    case "training":
      renderTrainingPanel(panel, state.training, {
        onStart: (config) => void startTraining(config),
        onAdopt: () => void adoptTrainedSystem(),
      });
      break;
    case "devices": {
      const domains: Record<string, [number, number]> = {};
      for (const v of state.system.variables) {
        if (v.role === "output") domains[v.name] = v.domain;
      }
      renderDevicesPanel(panel, state.devices, domains, Date.now(), {
        onSaveDevice: (descriptor) => {
          void api
            .putDevice(descriptor)
            .then(() => api.getDevices())
            .then((devices) => dispatch({ type: "devices_loaded", devices }));
        },
      });
      break;
    }
  }
}

async function bootstrap(): Promise<void> {
  render();
  const xml = await api.getSystemXml();
  parseFml(xml); // fail fast on an unreadable document before touching state
  dispatch({ type: "system_loaded", xml });
  dispatch({ type: "devices_loaded", devices: await api.getDevices() });
  void runInference();

  api.subscribeEvents(
    (event) => {
      dispatch({ type: "service_event", event, nowMs: Date.now() });
      if (event.type === "training_finished" && event.status === "done") {
        void api.getTraining(event.job_id).then((status) => {
          if (status.system) {
            dispatch({ type: "training_result", jobId: event.job_id, xml: status.system });
          }
        });
      }
    },
    (connected) => dispatch({ type: "connection_changed", connected }),
  );
}

void bootstrap();
