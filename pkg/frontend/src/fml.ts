/*
 * fml.ts: parse and serialize the FML dialect the service speaks.
 *
 * The studio edits systems client-side but the server stays authoritative:
 * every edit is re-serialized and PUT back, and the server's 422 violations
 * are what the user ultimately sees. This module only needs to read the
 * canonical documents the service emits and to write documents the service
 * accepts — it is not a general XML parser.
 */

export type Shape =
  | "triangular"
  | "trapezoidal"
  | "gaussian"
  | "singleton"
  | "left-linear"
  | "right-linear";

export interface MembershipFunction {
  shape: Shape;
  params: number[];
}

export interface FuzzyTerm {
  name: string;
  mf: MembershipFunction;
  complement: boolean;
}

export interface LinguisticVariable {
  name: string;
  role: "input" | "output";
  domain: [number, number];
  terms: FuzzyTerm[];
  units: string;
  defaultValue: number | null;
}

export interface Clause {
  variable: string;
  term: string;
}

export interface FuzzyRule {
  id: string;
  weight: number;
  connector: "and" | "or";
  antecedent: Clause[];
  consequent: Clause[];
}

export interface RuleBase {
  andMethod: string;
  orMethod: string;
  activationMethod: string;
  accumulationMethod: string;
  defuzzifier: string;
  rules: FuzzyRule[];
}

export interface FuzzySystem {
  name: string;
  variables: LinguisticVariable[];
  ruleBase: RuleBase;
}

const SHAPE_TAGS: Record<string, { shape: Shape; nparams: number }> = {
  triangularShape: { shape: "triangular", nparams: 3 },
  trapezoidShape: { shape: "trapezoidal", nparams: 4 },
  gaussianShape: { shape: "gaussian", nparams: 2 },
  singletonShape: { shape: "singleton", nparams: 1 },
  leftLinearShape: { shape: "left-linear", nparams: 2 },
  rightLinearShape: { shape: "right-linear", nparams: 2 },
};

const TAG_BY_SHAPE: Record<Shape, string> = {
  triangular: "triangularShape",
  trapezoidal: "trapezoidShape",
  gaussian: "gaussianShape",
  singleton: "singletonShape",
  "left-linear": "leftLinearShape",
  "right-linear": "rightLinearShape",
};

// --- minimal XML reading -------------------------------------------------
//
// The documents we consume carry no meaningful text content, namespaces, or
// CDATA, so a small element/attribute tokenizer is enough and keeps the
// studio runnable in any environment (tests run under node without DOM).

interface XmlNode {
  tag: string;
  attrs: Record<string, string>;
  children: XmlNode[];
}

const ENTITIES: Record<string, string> = {
  "&lt;": "<",
  "&gt;": ">",
  "&amp;": "&",
  "&quot;": '"',
  "&apos;": "'",
};

function unescapeXml(text: string): string {
  return text.replace(/&(lt|gt|amp|quot|apos);/g, (m) => ENTITIES[m] ?? m);
}

function escapeAttr(text: string): string {
  return text
    .replace(/&/g, "&amp;")
    .replace(/</g, "&lt;")
    .replace(/>/g, "&gt;")
    .replace(/"/g, "&quot;");
}

export class FmlParseError extends Error {}

function tokenizeXml(text: string): XmlNode {
  const root: XmlNode[] = [];
  const stack: XmlNode[] = [];
  const tagRe = /<\?[^?]*\?>|<!--[\s\S]*?-->|<\/?[^<>]+>/g;
  let match: RegExpExecArray | null;
  while ((match = tagRe.exec(text)) !== null) {
    const token = match[0];
    if (token.startsWith("<?") || token.startsWith("<!--")) continue;
    if (token.startsWith("</")) {
      const tag = token.slice(2, -1).trim();
      const open = stack.pop();
      if (!open || open.tag !== tag) {
        throw new FmlParseError(`mismatched closing tag </${tag}>`);
      }
      continue;
    }
    const selfClosing = token.endsWith("/>");
    const body = token.slice(1, selfClosing ? -2 : -1).trim();
    const nameMatch = /^[^\s/>]+/.exec(body);
    if (!nameMatch) throw new FmlParseError(`malformed tag ${token}`);
    const node: XmlNode = { tag: nameMatch[0], attrs: {}, children: [] };
    const attrRe = /([^\s=]+)\s*=\s*"([^"]*)"/g;
    let attr: RegExpExecArray | null;
    const rest = body.slice(nameMatch[0].length);
    while ((attr = attrRe.exec(rest)) !== null) {
      node.attrs[attr[1]!] = unescapeXml(attr[2]!);
    }
    if (stack.length === 0) root.push(node);
    else stack[stack.length - 1]!.children.push(node);
    if (!selfClosing) stack.push(node);
  }
  if (stack.length > 0) {
    throw new FmlParseError(`unclosed tag <${stack[stack.length - 1]!.tag}>`);
  }
  if (root.length !== 1) throw new FmlParseError("expected a single root element");
  return root[0]!;
}

function num(node: XmlNode, attr: string): number {
  const raw = node.attrs[attr];
  if (raw === undefined) {
    throw new FmlParseError(`<${node.tag}> missing attribute ${attr}`);
  }
  const value = Number(raw);
  if (!Number.isFinite(value)) {
    throw new FmlParseError(`<${node.tag}> ${attr}="${raw}" is not a finite number`);
  }
  return value;
}

function str(node: XmlNode, attr: string): string {
  const raw = node.attrs[attr];
  if (raw === undefined) {
    throw new FmlParseError(`<${node.tag}> missing attribute ${attr}`);
  }
  return raw;
}

function parseTerm(node: XmlNode): FuzzyTerm {
  const shapeNode = node.children[0];
  if (node.children.length !== 1 || !shapeNode || !(shapeNode.tag in SHAPE_TAGS)) {
    throw new FmlParseError(`term ${node.attrs["name"]} needs exactly one shape element`);
  }
  const { shape, nparams } = SHAPE_TAGS[shapeNode.tag]!;
  const params: number[] = [];
  for (let i = 1; i <= nparams; i++) params.push(num(shapeNode, `param${i}`));
  return {
    name: str(node, "name"),
    mf: { shape, params },
    complement: node.attrs["complement"] === "true",
  };
}

function parseVariable(node: XmlNode): LinguisticVariable {
  const role = str(node, "type");
  if (role !== "input" && role !== "output") {
    throw new FmlParseError(`variable type must be input/output, got ${role}`);
  }
  return {
    name: str(node, "name"),
    role,
    domain: [num(node, "domainLeft"), num(node, "domainRight")],
    terms: node.children.map(parseTerm),
    units: node.attrs["units"] ?? "",
    defaultValue: node.attrs["defaultValue"] !== undefined ? num(node, "defaultValue") : null,
  };
}

function parseRule(node: XmlNode): FuzzyRule {
  const parts = new Map(node.children.map((c) => [c.tag, c]));
  const antecedent = parts.get("antecedent");
  const consequent = parts.get("consequent");
  if (!antecedent || !consequent) {
    throw new FmlParseError(`rule ${node.attrs["name"]} needs antecedent and consequent`);
  }
  const clause = (c: XmlNode): Clause => ({ variable: str(c, "variable"), term: str(c, "term") });
  const connector = node.attrs["connector"] ?? "and";
  if (connector !== "and" && connector !== "or") {
    throw new FmlParseError(`connector must be and/or, got ${connector}`);
  }
  return {
    id: str(node, "name"),
    weight: node.attrs["weight"] !== undefined ? num(node, "weight") : 1.0,
    connector,
    antecedent: antecedent.children.map(clause),
    consequent: consequent.children.map(clause),
  };
}

export function parseFml(text: string): FuzzySystem {
  const root = tokenizeXml(text);
  if (root.tag !== "fuzzySystem") {
    throw new FmlParseError(`root must be <fuzzySystem>, got <${root.tag}>`);
  }
  const kb = root.children.find((c) => c.tag === "knowledgeBase");
  const rb = root.children.find((c) => c.tag === "mamdaniRuleBase");
  if (!kb || !rb) {
    throw new FmlParseError("document needs <knowledgeBase> and <mamdaniRuleBase>");
  }
  return {
    name: str(root, "name"),
    variables: kb.children.map(parseVariable),
    ruleBase: {
      andMethod: rb.attrs["andMethod"] ?? "MIN",
      orMethod: rb.attrs["orMethod"] ?? "MAX",
      activationMethod: rb.attrs["activationMethod"] ?? "MIN",
      accumulationMethod: rb.attrs["accumulationMethod"] ?? "MAX",
      defuzzifier: rb.attrs["defuzzifier"] ?? "COG",
      rules: rb.children.map(parseRule),
    },
  };
}

// --- serialization -------------------------------------------------------

function fmt(x: number): string {
  // Matches the service's numeric style closely enough for PUT round-trips;
  // the server re-canonicalizes on read anyway.
  return Number.isInteger(x) ? `${x}.0` : String(x);
}

export function serializeFml(sys: FuzzySystem): string {
  const lines: string[] = ['<?xml version="1.0" encoding="UTF-8"?>'];
  lines.push(`<fuzzySystem name="${escapeAttr(sys.name)}">`);
  lines.push("  <knowledgeBase>");
  for (const v of sys.variables) {
    const units = v.units ? ` units="${escapeAttr(v.units)}"` : "";
    const dflt = v.defaultValue !== null ? ` defaultValue="${fmt(v.defaultValue)}"` : "";
    lines.push(
      `    <fuzzyVariable name="${escapeAttr(v.name)}" type="${v.role}" ` +
        `domainLeft="${fmt(v.domain[0])}" domainRight="${fmt(v.domain[1])}"${units}${dflt}>`,
    );
    for (const t of v.terms) {
      const complement = t.complement ? ' complement="true"' : "";
      const tag = TAG_BY_SHAPE[t.mf.shape];
      const params = t.mf.params.map((p, i) => `param${i + 1}="${fmt(p)}"`).join(" ");
      lines.push(`      <fuzzyTerm name="${escapeAttr(t.name)}"${complement}>`);
      lines.push(`        <${tag} ${params}/>`);
      lines.push("      </fuzzyTerm>");
    }
    lines.push("    </fuzzyVariable>");
  }
  lines.push("  </knowledgeBase>");
  const rb = sys.ruleBase;
  lines.push(
    `  <mamdaniRuleBase name="${escapeAttr(sys.name)}-rules" andMethod="${rb.andMethod}" ` +
      `orMethod="${rb.orMethod}" activationMethod="${rb.activationMethod}" ` +
      `accumulationMethod="${rb.accumulationMethod}" defuzzifier="${rb.defuzzifier}">`,
  );
  for (const rule of rb.rules) {
    lines.push(
      `    <rule name="${escapeAttr(rule.id)}" weight="${fmt(rule.weight)}" connector="${rule.connector}">`,
    );
    for (const [part, clauses] of [
      ["antecedent", rule.antecedent],
      ["consequent", rule.consequent],
    ] as const) {
      lines.push(`      <${part}>`);
      for (const c of clauses) {
        lines.push(
          `        <clause variable="${escapeAttr(c.variable)}" term="${escapeAttr(c.term)}"/>`,
        );
      }
      lines.push(`      </${part}>`);
    }
    lines.push("    </rule>");
  }
  lines.push("  </mamdaniRuleBase>");
  lines.push("</fuzzySystem>");
  return lines.join("\n") + "\n";
}

/** Membership degree of x in a term's shape — used only to draw curves, never to infer. */
export function membershipDegree(mf: MembershipFunction, complement: boolean, x: number): number {
  const p = mf.params;
  let y = 0;
  switch (mf.shape) {
    case "triangular": {
      const [a, b, c] = p as [number, number, number];
      if (x === b) y = 1;
      else if (x > a && x < b) y = (x - a) / (b - a);
      else if (x > b && x < c) y = (c - x) / (c - b);
      break;
    }
    case "trapezoidal": {
      const [a, b, c, d] = p as [number, number, number, number];
      if (x >= b && x <= c) y = 1;
      else if (x > a && x < b) y = (x - a) / (b - a);
      else if (x > c && x < d) y = (d - x) / (d - c);
      break;
    }
    case "gaussian": {
      const [c, sigma] = p as [number, number];
      y = Math.exp(-0.5 * ((x - c) / sigma) ** 2);
      break;
    }
    case "singleton":
      y = x === p[0] ? 1 : 0;
      break;
    case "left-linear": {
      const [a, b] = p as [number, number];
      if (x <= a) y = 1;
      else if (x < b) y = (b - x) / (b - a);
      break;
    }
    case "right-linear": {
      const [a, b] = p as [number, number];
      if (x >= b) y = 1;
      else if (x > a) y = (x - a) / (b - a);
      break;
    }
  }
  return complement ? 1 - y : y;
}
