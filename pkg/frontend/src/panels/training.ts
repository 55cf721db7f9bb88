/*
 * panels/training.ts: PSO configuration form and live convergence curve.
 *
 * Launches POST /train, plots the best-fitness series from WS progress
 * events (non-increasing by construction), and on completion offers
 * "adopt trained system", which PUTs the returned FML.
 */

import type { TrainingView } from "../state.js";

export interface TrainingCallbacks {
  onStart(config: { swarm_size: number; max_evaluations: number; seed: number }): void;
  onAdopt(): void;
}

const PLOT_W = 420;
const PLOT_H = 140;

function drawCurve(canvas: HTMLCanvasElement, curve: number[]): void {
  const ctx = canvas.getContext("2d");
  if (!ctx) return;
  ctx.clearRect(0, 0, PLOT_W, PLOT_H);
  ctx.strokeStyle = "#ccc";
  ctx.strokeRect(0.5, 0.5, PLOT_W - 1, PLOT_H - 1);
  if (curve.length < 2) return;
  const max = curve[0]!;
  const min = curve[curve.length - 1]!;
  const span = max - min || 1;
  ctx.strokeStyle = "#2f6fde";
  ctx.lineWidth = 1.5;
  ctx.beginPath();
  curve.forEach((value, i) => {
    const px = (i / (curve.length - 1)) * (PLOT_W - 8) + 4;
    const py = 4 + ((value - min) / span) * (PLOT_H - 8);
    if (i === 0) ctx.moveTo(px, py);
    else ctx.lineTo(px, py);
  });
  ctx.stroke();
}

export function renderTrainingPanel(
  container: HTMLElement,
  training: TrainingView,
  callbacks: TrainingCallbacks,
): void {
  container.replaceChildren();

  const form = document.createElement("div");
  form.className = "card";
  const fields: Record<string, HTMLInputElement> = {};
  for (const [key, label, fallback] of [
    ["swarm_size", "particles", "20"],
    ["max_evaluations", "evaluations", "2000"],
    ["seed", "seed", "0"],
  ] as const) {
    const row = document.createElement("div");
    row.className = "form-row";
    const caption = document.createElement("label");
    caption.textContent = label;
    const field = document.createElement("input");
    field.type = "number";
    field.value = fallback;
    fields[key] = field;
    row.append(caption, field);
    form.append(row);
  }
  const start = document.createElement("button");
  start.textContent = training.status === "running" ? "job in progress" : "Start training";
  start.disabled = training.status === "running";
  start.onclick = () =>
    callbacks.onStart({
      swarm_size: Number(fields["swarm_size"]!.value),
      max_evaluations: Number(fields["max_evaluations"]!.value),
      seed: Number(fields["seed"]!.value),
    });
  form.append(start);
  if (training.error) {
    const msg = document.createElement("p");
    msg.className = "error";
    msg.textContent = training.error;
    form.append(msg);
  }
  container.append(form);

  const plot = document.createElement("div");
  plot.className = "card";
  const status = document.createElement("p");
  const latest = training.curve[training.curve.length - 1];
  status.textContent =
    training.status === "idle"
      ? "no training run yet"
      : `status: ${training.status}` + (latest !== undefined ? ` — best MSE ${latest.toFixed(4)}` : "");
  const canvas = document.createElement("canvas");
  canvas.width = PLOT_W;
  canvas.height = PLOT_H;
  drawCurve(canvas, training.curve);
  plot.append(status, canvas);

  if (training.status === "done" && training.resultXml) {
    const adopt = document.createElement("button");
    adopt.textContent = "Adopt trained system";
    adopt.onclick = () => callbacks.onAdopt();
    plot.append(adopt);
  }
  container.append(plot);
}
