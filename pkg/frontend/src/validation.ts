/*
 * validation.ts: optimistic client-side hints mirroring the server's rules.
 *
 * These checks exist so the UI can warn at the offending field before a
 * round-trip; the server remains authoritative and its 422 violation list
 * is always rendered verbatim when it disagrees.
 */

import type { FuzzySystem, LinguisticVariable, MembershipFunction } from "./fml.js";

export interface Hint {
  path: string;
  message: string;
}

const PARAM_NAMES = "abcd";

function checkShape(mf: MembershipFunction, domain: [number, number], path: string): Hint[] {
  const hints: Hint[] = [];
  const ordered =
    mf.shape === "gaussian" || mf.shape === "singleton"
      ? true
      : mf.params.every((p, i) => i === 0 || mf.params[i - 1]! <= p);
  if (!ordered) {
    const seq = PARAM_NAMES.slice(0, mf.params.length).split("").join(" ≤ ");
    hints.push({ path, message: `${seq} violated` });
  }
  if (mf.shape === "gaussian" && mf.params[1]! <= 0) {
    hints.push({ path, message: "σ > 0 violated" });
  }
  for (const p of mf.params) {
    if (!Number.isFinite(p)) hints.push({ path, message: "parameter is not finite" });
    else if (p < domain[0] || p > domain[1]) {
      hints.push({ path, message: `parameter ${p} outside domain [${domain[0]}, ${domain[1]}]` });
    }
  }
  return hints;
}

function checkVariable(v: LinguisticVariable, path: string): Hint[] {
  const hints: Hint[] = [];
  if (!(v.domain[0] < v.domain[1])) {
    hints.push({ path, message: "domain left bound must be below right bound" });
  }
  if (v.terms.length === 0) hints.push({ path, message: "variable needs at least one term" });
  const seen = new Set<string>();
  v.terms.forEach((t, i) => {
    if (seen.has(t.name)) hints.push({ path: `${path}.terms[${i}]`, message: `duplicate term ${t.name}` });
    seen.add(t.name);
    hints.push(...checkShape(t.mf, v.domain, `${path}.terms[${i}]`));
  });
  if (v.defaultValue !== null) {
    if (v.role !== "output") hints.push({ path, message: "defaultValue is only valid on outputs" });
    else if (v.defaultValue < v.domain[0] || v.defaultValue > v.domain[1]) {
      hints.push({ path, message: "defaultValue outside domain" });
    }
  }
  return hints;
}

export function validateSystem(sys: FuzzySystem): Hint[] {
  const hints: Hint[] = [];
  const byName = new Map(sys.variables.map((v) => [v.name, v]));
  if (byName.size !== sys.variables.length) {
    hints.push({ path: "variables", message: "duplicate variable names" });
  }
  sys.variables.forEach((v, i) => hints.push(...checkVariable(v, `variables[${i}]`)));
  if (!sys.variables.some((v) => v.role === "input") || !sys.variables.some((v) => v.role === "output")) {
    hints.push({ path: "variables", message: "need at least one input and one output variable" });
  }
  sys.ruleBase.rules.forEach((rule, i) => {
    const path = `rule_base.rules[${i}]`;
    if (rule.weight < 0 || rule.weight > 1) {
      hints.push({ path, message: "weight must lie in [0, 1]" });
    }
    const seenVars = new Set<string>();
    for (const [part, clauses, role] of [
      ["antecedent", rule.antecedent, "input"],
      ["consequent", rule.consequent, "output"],
    ] as const) {
      if (clauses.length === 0) hints.push({ path, message: `${part} is empty` });
      for (const clause of clauses) {
        const variable = byName.get(clause.variable);
        if (!variable) {
          hints.push({ path, message: `unknown variable ${clause.variable}` });
          continue;
        }
        if (variable.role !== role) {
          hints.push({ path, message: `${part} may only reference ${role} variables` });
        }
        if (!variable.terms.some((t) => t.name === clause.term)) {
          hints.push({ path, message: `unknown term ${clause.term} on ${clause.variable}` });
        }
        if (part === "antecedent") {
          if (seenVars.has(clause.variable)) {
            hints.push({ path, message: `variable ${clause.variable} appears twice in antecedent` });
          }
          seenVars.add(clause.variable);
        }
      }
    }
  });
  return hints;
}

export type ExpressionEntry = [number, number, string];

/** Mirrors the server's expression-map coverage rules. */
export function validateExpressionMap(
  entries: ExpressionEntry[],
  domain: [number, number],
): string[] {
  if (entries.length === 0) return ["expression map is empty"];
  const problems: string[] = [];
  const [lo, hi] = domain;
  if (entries[0]![0] !== lo) {
    problems.push(`first interval starts at ${entries[0]![0]}, domain starts at ${lo}`);
  }
  if (entries[entries.length - 1]![1] !== hi) {
    problems.push(`last interval ends at ${entries[entries.length - 1]![1]}, domain ends at ${hi}`);
  }
  entries.forEach(([a, b], i) => {
    if (!(a < b)) problems.push(`interval ${i} is empty ([${a}, ${b}))`);
    if (i > 0 && a !== entries[i - 1]![1]) {
      problems.push(`gap or overlap between interval ${i - 1} and ${i}`);
    }
  });
  return problems;
}
