/*
 * state.ts: the studio's single state atom and pure reducer.
 *
 * Every number displayed anywhere in the UI originates from a service
 * response recorded here — panels render state, they never compute.
 * System edits keep an undo stack of serialized snapshots so undo restores
 * the previous document byte-identically.
 */

import type { DeviceDescriptor, InferenceResult, ServiceEvent, Violation } from "./api.js";
import { parseFml, serializeFml, type FuzzySystem } from "./fml.js";

export interface DeviceView {
  descriptor: DeviceDescriptor;
  expression: string | null;
  lastSeenMs: number | null; // epoch ms of the last event; null = never seen
  lastError: string | null;
}

export interface TrainingView {
  jobId: string | null;
  status: "idle" | "running" | "done" | "error";
  curve: number[]; // best-so-far fitness, one point per progress event
  resultXml: string | null;
  error: string | null;
}

export interface StudioState {
  systemXml: string | null;
  system: FuzzySystem | null;
  undoStack: string[];
  serverViolations: Violation[];
  inputs: Record<string, number>;
  inference: InferenceResult | null;
  training: TrainingView;
  devices: Record<string, DeviceView>;
  connected: boolean;
}

export const initialState: StudioState = {
  systemXml: null,
  system: null,
  undoStack: [],
  serverViolations: [],
  inputs: {},
  inference: null,
  training: { jobId: null, status: "idle", curve: [], resultXml: null, error: null },
  devices: {},
  connected: false,
};

export type Action =
  | { type: "system_loaded"; xml: string }
  | { type: "system_edited"; system: FuzzySystem }
  | { type: "system_rejected"; violations: Violation[] }
  | { type: "undo" }
  | { type: "input_changed"; name: string; value: number }
  | { type: "inference_received"; result: InferenceResult }
  | { type: "training_started"; jobId: string }
  | { type: "training_rejected"; error: string }
  | { type: "training_result"; jobId: string; xml: string }
  | { type: "devices_loaded"; devices: DeviceDescriptor[] }
  | { type: "connection_changed"; connected: boolean }
  | { type: "service_event"; event: ServiceEvent; nowMs: number };

function defaultInputs(system: FuzzySystem, previous: Record<string, number>): Record<string, number> {
  const inputs: Record<string, number> = {};
  for (const v of system.variables) {
    if (v.role !== "input") continue;
    const [lo, hi] = v.domain;
    const prior = previous[v.name];
    inputs[v.name] = prior !== undefined ? Math.min(Math.max(prior, lo), hi) : (lo + hi) / 2;
  }
  return inputs;
}

function applyEvent(state: StudioState, event: ServiceEvent, nowMs: number): StudioState {
  switch (event.type) {
    case "inference":
      return { ...state, inference: event.result };
    case "inference_dispatched": {
      const device = state.devices[event.device_id];
      if (!device) return state;
      const expression =
        typeof event.message["expression"] === "string" ? event.message["expression"] : device.expression;
      return {
        ...state,
        devices: {
          ...state.devices,
          [event.device_id]: { ...device, expression, lastSeenMs: nowMs, lastError: null },
        },
      };
    }
    case "dispatch_failed": {
      const device = state.devices[event.device_id];
      if (!device) return state;
      return {
        ...state,
        devices: { ...state.devices, [event.device_id]: { ...device, lastError: event.error } },
      };
    }
    case "training_progress": {
      if (state.training.jobId !== null && state.training.jobId !== event.job_id) return state;
      // The server's series is best-so-far, hence non-increasing; clamp so a
      // reordered frame can never render an uptick.
      const last = state.training.curve[state.training.curve.length - 1];
      const point = last === undefined ? event.best_fitness : Math.min(last, event.best_fitness);
      return {
        ...state,
        training: {
          ...state.training,
          jobId: event.job_id,
          status: "running",
          curve: [...state.training.curve, point],
        },
      };
    }
    case "training_finished": {
      if (state.training.jobId !== event.job_id) return state;
      return { ...state, training: { ...state.training, status: event.status } };
    }
    case "system_replaced":
      return state;
  }
}

export function reduce(state: StudioState, action: Action): StudioState {
  switch (action.type) {
    case "system_loaded": {
      const system = parseFml(action.xml);
      return {
        ...state,
        systemXml: action.xml,
        system,
        serverViolations: [],
        inputs: defaultInputs(system, state.inputs),
        inference: null,
      };
    }
    case "system_edited": {
      const xml = serializeFml(action.system);
      const undoStack = state.systemXml !== null ? [...state.undoStack, state.systemXml] : state.undoStack;
      return { ...state, system: action.system, systemXml: xml, undoStack, serverViolations: [] };
    }
    case "system_rejected":
      return { ...state, serverViolations: action.violations };
    case "undo": {
      const previous = state.undoStack[state.undoStack.length - 1];
      if (previous === undefined) return state;
      const system = parseFml(previous);
      return {
        ...state,
        system,
        systemXml: previous,
        undoStack: state.undoStack.slice(0, -1),
        serverViolations: [],
        inputs: defaultInputs(system, state.inputs),
      };
    }
    case "input_changed":
      return { ...state, inputs: { ...state.inputs, [action.name]: action.value } };
    case "inference_received":
      return { ...state, inference: action.result };
    case "training_started":
      return {
        ...state,
        training: { jobId: action.jobId, status: "running", curve: [], resultXml: null, error: null },
      };
    case "training_rejected":
      return { ...state, training: { ...state.training, error: action.error } };
    case "training_result": {
      if (state.training.jobId !== action.jobId) return state;
      return { ...state, training: { ...state.training, resultXml: action.xml } };
    }
    case "devices_loaded": {
      const devices: Record<string, DeviceView> = {};
      for (const descriptor of action.devices) {
        const existing = state.devices[descriptor.device_id];
        devices[descriptor.device_id] = existing
          ? { ...existing, descriptor }
          : { descriptor, expression: null, lastSeenMs: null, lastError: null };
      }
      return { ...state, devices };
    }
    case "connection_changed":
      return { ...state, connected: action.connected };
    case "service_event":
      return applyEvent(state, action.event, action.nowMs);
  }
}
