/*
 * panels/variables.ts: knowledge-base editor.
 *
 * Renders each variable's membership curves on a canvas with draggable
 * control points, numeric parameter fields, and add/remove-term controls.
 * Edits are validated optimistically (validation.ts) and saved with
 * PUT /system; server 422 violations are rendered inline at the offending
 * variable using the violation path.
 */

import type { Violation } from "../api.js";
import { membershipDegree, type FuzzySystem, type FuzzyTerm, type LinguisticVariable } from "../fml.js";
import { validateSystem, type Hint } from "../validation.js";

export interface VariablesCallbacks {
  onEdit(system: FuzzySystem): void;
  onSave(): void;
  onUndo(): void;
}

const CURVE_COLORS = ["#2f6fde", "#d9822b", "#2da44e", "#c0392b", "#8e44ad", "#16a085"];
const CANVAS_W = 420;
const CANVAS_H = 120;

function cloneSystem(sys: FuzzySystem): FuzzySystem {
  return JSON.parse(JSON.stringify(sys)) as FuzzySystem;
}

function drawCurves(canvas: HTMLCanvasElement, variable: LinguisticVariable): void {
  const ctx = canvas.getContext("2d");
  if (!ctx) return;
  const [lo, hi] = variable.domain;
  ctx.clearRect(0, 0, CANVAS_W, CANVAS_H);
  ctx.strokeStyle = "#ccc";
  ctx.strokeRect(0.5, 0.5, CANVAS_W - 1, CANVAS_H - 1);
  variable.terms.forEach((term, ti) => {
    ctx.strokeStyle = CURVE_COLORS[ti % CURVE_COLORS.length]!;
    ctx.lineWidth = 1.5;
    ctx.beginPath();
    for (let px = 0; px < CANVAS_W; px++) {
      const x = lo + ((hi - lo) * px) / (CANVAS_W - 1);
      const y = membershipDegree(term.mf, term.complement, x);
      const py = CANVAS_H - 4 - y * (CANVAS_H - 8);
      if (px === 0) ctx.moveTo(px, py);
      else ctx.lineTo(px, py);
    }
    ctx.stroke();
    // control points at each parameter position
    ctx.fillStyle = ctx.strokeStyle;
    for (const p of term.mf.params) {
      const px = ((p - lo) / (hi - lo)) * (CANVAS_W - 1);
      const y = membershipDegree(term.mf, term.complement, p);
      const py = CANVAS_H - 4 - y * (CANVAS_H - 8);
      ctx.beginPath();
      ctx.arc(px, py, 3.5, 0, Math.PI * 2);
      ctx.fill();
    }
  });
}

/** Which (term, param) control point is nearest to canvas-x, within tolerance. */
function hitTest(
  variable: LinguisticVariable,
  canvasX: number,
): { term: number; param: number } | null {
  const [lo, hi] = variable.domain;
  let best: { term: number; param: number; dist: number } | null = null;
  variable.terms.forEach((term, ti) => {
    term.mf.params.forEach((p, pi) => {
      const px = ((p - lo) / (hi - lo)) * (CANVAS_W - 1);
      const dist = Math.abs(px - canvasX);
      if (dist < 8 && (best === null || dist < best.dist)) best = { term: ti, param: pi, dist };
    });
  });
  return best;
}

function newTerm(variable: LinguisticVariable): FuzzyTerm {
  const [lo, hi] = variable.domain;
  const mid = (lo + hi) / 2;
  const quarter = (hi - lo) / 4;
  let name = "term";
  for (let i = 1; variable.terms.some((t) => t.name === name); i++) name = `term${i}`;
  return {
    name,
    mf: { shape: "triangular", params: [mid - quarter, mid, mid + quarter] },
    complement: false,
  };
}

export function renderVariablesPanel(
  container: HTMLElement,
  system: FuzzySystem,
  serverViolations: Violation[],
  canUndo: boolean,
  callbacks: VariablesCallbacks,
): void {
  container.replaceChildren();
  const hints = validateSystem(system);

  const toolbar = document.createElement("div");
  toolbar.className = "toolbar";
  const save = document.createElement("button");
  save.textContent = "Save system";
  save.disabled = hints.length > 0;
  save.title = hints.length > 0 ? "fix the highlighted problems first" : "PUT /system";
  save.onclick = () => callbacks.onSave();
  const undo = document.createElement("button");
  undo.textContent = "Undo";
  undo.disabled = !canUndo;
  undo.onclick = () => callbacks.onUndo();
  toolbar.append(save, undo);
  container.append(toolbar);

  system.variables.forEach((variable, vi) => {
    const path = `variables[${vi}]`;
    const card = document.createElement("div");
    card.className = "card";
    const title = document.createElement("h3");
    title.textContent = `${variable.name} (${variable.role}, [${variable.domain[0]}, ${variable.domain[1]}]` +
      (variable.units ? ` ${variable.units}` : "") + ")";
    card.append(title);

    const canvas = document.createElement("canvas");
    canvas.width = CANVAS_W;
    canvas.height = CANVAS_H;
    drawCurves(canvas, variable);
    attachDrag(canvas, variable, vi, system, callbacks);
    card.append(canvas);

    variable.terms.forEach((term, ti) => {
      card.append(termRow(system, vi, ti, term, callbacks));
    });

    const addTerm = document.createElement("button");
    addTerm.textContent = "+ term";
    addTerm.onclick = () => {
      const next = cloneSystem(system);
      next.variables[vi]!.terms.push(newTerm(variable));
      callbacks.onEdit(next);
    };
    card.append(addTerm);

    for (const problem of [...hints, ...(serverViolations as Hint[])]) {
      if (problem.path.startsWith(path)) {
        const msg = document.createElement("p");
        msg.className = "error";
        msg.textContent = `${problem.path}: ${problem.message}`;
        card.append(msg);
      }
    }
    container.append(card);
  });

  for (const violation of serverViolations) {
    if (!violation.path.startsWith("variables")) {
      const msg = document.createElement("p");
      msg.className = "error";
      msg.textContent = `${violation.path}: ${violation.message}`;
      container.append(msg);
    }
  }
}

function termRow(
  system: FuzzySystem,
  vi: number,
  ti: number,
  term: FuzzyTerm,
  callbacks: VariablesCallbacks,
): HTMLElement {
  const row = document.createElement("div");
  row.className = "term-row";
  const swatch = document.createElement("span");
  swatch.className = "swatch";
  swatch.style.background = CURVE_COLORS[ti % CURVE_COLORS.length]!;
  const label = document.createElement("span");
  label.textContent = `${term.name} (${term.mf.shape}${term.complement ? ", complement" : ""})`;
  row.append(swatch, label);
  term.mf.params.forEach((p, pi) => {
    const field = document.createElement("input");
    field.type = "number";
    field.step = "any";
    field.value = String(p);
    field.onchange = () => {
      const next = cloneSystem(system);
      next.variables[vi]!.terms[ti]!.mf.params[pi] = Number(field.value);
      callbacks.onEdit(next);
    };
    row.append(field);
  });
  const remove = document.createElement("button");
  remove.textContent = "×";
  remove.title = "remove term";
  remove.onclick = () => {
    const next = cloneSystem(system);
    next.variables[vi]!.terms.splice(ti, 1);
    callbacks.onEdit(next);
  };
  row.append(remove);
  return row;
}

function attachDrag(
  canvas: HTMLCanvasElement,
  variable: LinguisticVariable,
  vi: number,
  system: FuzzySystem,
  callbacks: VariablesCallbacks,
): void {
  let dragging: { term: number; param: number } | null = null;
  const toDomain = (ev: MouseEvent): number => {
    const rect = canvas.getBoundingClientRect();
    const frac = Math.min(Math.max((ev.clientX - rect.left) / rect.width, 0), 1);
    return variable.domain[0] + frac * (variable.domain[1] - variable.domain[0]);
  };
  canvas.onmousedown = (ev) => {
    const rect = canvas.getBoundingClientRect();
    dragging = hitTest(variable, ((ev.clientX - rect.left) / rect.width) * (CANVAS_W - 1));
  };
  canvas.onmousemove = (ev) => {
    if (!dragging) return;
    variable.terms[dragging.term]!.mf.params[dragging.param] = toDomain(ev);
    drawCurves(canvas, variable);
  };
  const finish = (ev: MouseEvent) => {
    if (!dragging) return;
    const next = cloneSystem(system);
    next.variables[vi]!.terms[dragging.term]!.mf.params[dragging.param] = toDomain(ev);
    dragging = null;
    callbacks.onEdit(next);
  };
  canvas.onmouseup = finish;
  canvas.onmouseleave = finish;
}
