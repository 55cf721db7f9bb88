/*
 * panels/inference.ts: crisp-input sliders and live results.
 *
 * One slider per input variable, bounded to its domain. Every change posts
 * to /infer; the crisp outputs, per-rule activation bars, and default
 * badges shown all come straight from the response.
 */

import type { InferenceResult } from "../api.js";
import type { FuzzySystem } from "../fml.js";

export interface InferenceCallbacks {
  onInputChange(name: string, value: number): void;
}

export function renderInferencePanel(
  container: HTMLElement,
  system: FuzzySystem,
  inputs: Record<string, number>,
  result: InferenceResult | null,
  callbacks: InferenceCallbacks,
): void {
  container.replaceChildren();

  for (const variable of system.variables) {
    if (variable.role !== "input") continue;
    const [lo, hi] = variable.domain;
    const value = inputs[variable.name] ?? (lo + hi) / 2;
    const row = document.createElement("div");
    row.className = "slider-row";
    const label = document.createElement("label");
    label.textContent = `${variable.name}${variable.units ? ` (${variable.units})` : ""}`;
    const slider = document.createElement("input");
    slider.type = "range";
    slider.min = String(lo);
    slider.max = String(hi);
    slider.step = String((hi - lo) / 400);
    slider.value = String(value);
    const readout = document.createElement("span");
    readout.className = "readout";
    readout.textContent = value.toFixed(2);
    slider.oninput = () => {
      readout.textContent = Number(slider.value).toFixed(2);
      callbacks.onInputChange(variable.name, Number(slider.value));
    };
    row.append(label, slider, readout);
    container.append(row);
  }

  if (!result) return;

  const outputs = document.createElement("div");
  outputs.className = "card";
  for (const [name, value] of Object.entries(result.outputs)) {
    const line = document.createElement("p");
    line.className = "output-line";
    line.textContent = `${name} = ${value.toFixed(4)}`;
    if (result.defaulted[name]) {
      const badge = document.createElement("span");
      badge.className = "badge";
      badge.textContent = "default used";
      line.append(" ", badge);
    }
    outputs.append(line);
  }
  container.append(outputs);

  const bars = document.createElement("div");
  bars.className = "card";
  const heading = document.createElement("h3");
  heading.textContent = "Rule activations";
  bars.append(heading);
  for (const [rule, strength] of Object.entries(result.rule_activations)) {
    const row = document.createElement("div");
    row.className = "bar-row";
    const label = document.createElement("span");
    label.textContent = rule;
    const track = document.createElement("div");
    track.className = "bar-track";
    const fill = document.createElement("div");
    fill.className = "bar-fill";
    fill.style.width = `${Math.min(Math.max(strength, 0), 1) * 100}%`;
    const pct = document.createElement("span");
    pct.className = "readout";
    pct.textContent = strength.toFixed(3);
    track.append(fill);
    row.append(label, track, pct);
    bars.append(row);
  }
  container.append(bars);
}
