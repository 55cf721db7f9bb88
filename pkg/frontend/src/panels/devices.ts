/*
 * panels/devices.ts: device cards with live expressions and map editing.
 *
 * Cards show each registered device's latest expression from WS events,
 * with a staleness timestamp when the device has gone quiet. The
 * expression-map editor mirrors the server's coverage rules client-side;
 * overlapping or gapped intervals block the save.
 */

import type { DeviceDescriptor } from "../api.js";
import type { DeviceView } from "../state.js";
import { validateExpressionMap, type ExpressionEntry } from "../validation.js";

export interface DevicesCallbacks {
  onSaveDevice(descriptor: DeviceDescriptor): void;
}

const STALE_AFTER_MS = 10_000;

function describeAge(lastSeenMs: number | null, nowMs: number): string {
  if (lastSeenMs === null) return "never seen";
  const seconds = Math.round((nowMs - lastSeenMs) / 1000);
  return seconds <= 1 ? "just now" : `${seconds}s ago`;
}

export function renderDevicesPanel(
  container: HTMLElement,
  devices: Record<string, DeviceView>,
  outputDomains: Record<string, [number, number]>,
  nowMs: number,
  callbacks: DevicesCallbacks,
): void {
  container.replaceChildren();
  const views = Object.values(devices);
  if (views.length === 0) {
    const empty = document.createElement("p");
    empty.textContent = "no devices registered";
    container.append(empty);
    return;
  }
  for (const view of views) {
    container.append(deviceCard(view, outputDomains, nowMs, callbacks));
  }
}

function deviceCard(
  view: DeviceView,
  outputDomains: Record<string, [number, number]>,
  nowMs: number,
  callbacks: DevicesCallbacks,
): HTMLElement {
  const { descriptor } = view;
  const card = document.createElement("div");
  card.className = "card";
  const title = document.createElement("h3");
  title.textContent = `${descriptor.device_id} (${descriptor.kind}, ${descriptor.transport})`;
  card.append(title);

  const expression = document.createElement("p");
  expression.className = "expression";
  expression.textContent = view.expression ?? "—";
  const stale = view.lastSeenMs === null || nowMs - view.lastSeenMs > STALE_AFTER_MS;
  const age = document.createElement("span");
  age.className = stale ? "badge stale" : "badge";
  age.textContent = describeAge(view.lastSeenMs, nowMs);
  expression.append(" ", age);
  card.append(expression);
  if (view.lastError) {
    const err = document.createElement("p");
    err.className = "error";
    err.textContent = `last dispatch failed: ${view.lastError}`;
    card.append(err);
  }

  // expression-map editor
  const editor = document.createElement("div");
  editor.className = "map-editor";
  const rows: [HTMLInputElement, HTMLInputElement, HTMLInputElement][] = [];
  for (const [lo, hi, name] of descriptor.expression_map) {
    const row = document.createElement("div");
    row.className = "form-row";
    const loField = numberField(lo);
    const hiField = numberField(hi);
    const nameField = document.createElement("input");
    nameField.value = name;
    row.append(loField, hiField, nameField);
    rows.push([loField, hiField, nameField]);
    editor.append(row);
  }
  const problems = document.createElement("p");
  problems.className = "error";
  const save = document.createElement("button");
  save.textContent = "Save map";
  const revalidate = () => {
    const entries: ExpressionEntry[] = rows.map(([lo, hi, name]) => [
      Number(lo.value),
      Number(hi.value),
      name.value,
    ]);
    const domain = outputDomains[descriptor.output_variable] ?? [entries[0]?.[0] ?? 0, entries[entries.length - 1]?.[1] ?? 1];
    const found = validateExpressionMap(entries, domain);
    problems.textContent = found.join("; ");
    save.disabled = found.length > 0;
    return entries;
  };
  for (const row of rows) for (const field of row) field.oninput = revalidate;
  revalidate();
  save.onclick = () => {
    const entries = revalidate();
    if (!save.disabled) callbacks.onSaveDevice({ ...descriptor, expression_map: entries });
  };
  editor.append(save, problems);
  card.append(editor);
  return card;
}

function numberField(value: number): HTMLInputElement {
  const field = document.createElement("input");
  field.type = "number";
  field.step = "any";
  field.value = String(value);
  return field;
}
