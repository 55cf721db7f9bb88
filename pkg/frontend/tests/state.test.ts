import { describe, expect, it } from "vitest";
import { parseFml, serializeFml } from "../src/fml.js";
import { initialState, reduce, type StudioState } from "../src/state.js";

const XML = `<?xml version="1.0" encoding="UTF-8"?>
<fuzzySystem name="s">
  <knowledgeBase>
    <fuzzyVariable name="x" type="input" domainLeft="0.0" domainRight="10.0">
      <fuzzyTerm name="low">
        <triangularShape param1="0.0" param2="2.0" param3="5.0"/>
      </fuzzyTerm>
    </fuzzyVariable>
    <fuzzyVariable name="y" type="output" domainLeft="0.0" domainRight="1.0">
      <fuzzyTerm name="t">
        <triangularShape param1="0.0" param2="0.5" param3="1.0"/>
      </fuzzyTerm>
    </fuzzyVariable>
  </knowledgeBase>
  <mamdaniRuleBase name="s-rules" andMethod="MIN" orMethod="MAX" activationMethod="MIN" accumulationMethod="MAX" defuzzifier="COG">
    <rule name="r1" weight="1.0" connector="and">
      <antecedent>
        <clause variable="x" term="low"/>
      </antecedent>
      <consequent>
        <clause variable="y" term="t"/>
      </consequent>
    </rule>
  </mamdaniRuleBase>
</fuzzySystem>
`;

function loaded(): StudioState {
  return reduce(initialState, { type: "system_loaded", xml: XML });
}

describe("system lifecycle", () => {
  it("loading a system seeds each input at its domain midpoint", () => {
    const state = loaded();
    expect(state.inputs).toEqual({ x: 5 });
    expect(state.system?.name).toBe("s");
  });

  it("loading preserves prior slider positions, clamped to the new domain", () => {
    let state = loaded();
    state = reduce(state, { type: "input_changed", name: "x", value: 9 });
    state = reduce(state, { type: "system_loaded", xml: XML.replace('domainRight="10.0"', 'domainRight="8.0"') });
    expect(state.inputs["x"]).toBe(8);
  });

  it("undo restores the previous document byte-identically", () => {
    let state = loaded();
    const original = state.systemXml!;
    const edited = parseFml(XML);
    edited.variables[0]!.terms[0]!.mf.params = [0, 3, 5];
    state = reduce(state, { type: "system_edited", system: edited });
    expect(state.systemXml).not.toBe(original);
    expect(state.undoStack).toEqual([original]);
    state = reduce(state, { type: "undo" });
    expect(state.systemXml).toBe(original);
    expect(state.undoStack).toEqual([]);
    // undo with an empty stack is a no-op
    expect(reduce(state, { type: "undo" })).toEqual(state);
  });

  it("edits serialize deterministically", () => {
    const edited = parseFml(XML);
    const a = reduce(loaded(), { type: "system_edited", system: edited }).systemXml;
    const b = reduce(loaded(), { type: "system_edited", system: parseFml(XML) }).systemXml;
    expect(a).toBe(b);
    expect(a).toBe(serializeFml(edited));
  });

  it("server rejection stores violations without touching the draft", () => {
    let state = loaded();
    state = reduce(state, {
      type: "system_rejected",
      violations: [{ path: "variables[0].terms[0]", message: "a ≤ b ≤ c violated" }],
    });
    expect(state.serverViolations).toHaveLength(1);
    expect(state.systemXml).toBe(XML);
  });
});

describe("training events", () => {
  it("tracks a job's progress curve and clamps rendered upticks", () => {
    let state = reduce(loaded(), { type: "training_started", jobId: "j1" });
    for (const [best, expected] of [
      [5.0, 5.0],
      [3.2, 3.2],
      [3.4, 3.2], // reordered frame may not render an uptick
      [1.1, 1.1],
    ] as const) {
      state = reduce(state, {
        type: "service_event",
        event: { type: "training_progress", job_id: "j1", evaluation: 0, best_fitness: best },
        nowMs: 0,
      });
      expect(state.training.curve[state.training.curve.length - 1]).toBe(expected);
    }
    const curve = state.training.curve;
    expect(curve.every((v, i) => i === 0 || v <= curve[i - 1]!)).toBe(true);
  });

  it("ignores progress and results from other jobs", () => {
    let state = reduce(loaded(), { type: "training_started", jobId: "j1" });
    state = reduce(state, {
      type: "service_event",
      event: { type: "training_progress", job_id: "other", evaluation: 0, best_fitness: 9 },
      nowMs: 0,
    });
    expect(state.training.curve).toEqual([]);
    state = reduce(state, { type: "training_result", jobId: "other", xml: "<x/>" });
    expect(state.training.resultXml).toBeNull();
  });

  it("records completion status and the trained system", () => {
    let state = reduce(loaded(), { type: "training_started", jobId: "j1" });
    state = reduce(state, {
      type: "service_event",
      event: { type: "training_finished", job_id: "j1", status: "done" },
      nowMs: 0,
    });
    state = reduce(state, { type: "training_result", jobId: "j1", xml: XML });
    expect(state.training.status).toBe("done");
    expect(state.training.resultXml).toBe(XML);
  });
});

describe("device events", () => {
  const descriptor = {
    device_id: "kebbi-1",
    kind: "kebbi",
    transport: "mqtt",
    address: "aifml/kebbi-1/infer",
    output_variable: "y",
    expression_map: [[0, 1, "face"]] as [number, number, string][],
  };

  it("updates a device card's expression and freshness from dispatch events", () => {
    let state = reduce(loaded(), { type: "devices_loaded", devices: [descriptor] });
    state = reduce(state, {
      type: "service_event",
      event: {
        type: "inference_dispatched",
        device_id: "kebbi-1",
        message: { expression: "hot_face" },
      },
      nowMs: 1234,
    });
    expect(state.devices["kebbi-1"]!.expression).toBe("hot_face");
    expect(state.devices["kebbi-1"]!.lastSeenMs).toBe(1234);
    expect(state.devices["kebbi-1"]!.lastError).toBeNull();
  });

  it("records dispatch failures without clearing the last expression", () => {
    let state = reduce(loaded(), { type: "devices_loaded", devices: [descriptor] });
    state = reduce(state, {
      type: "service_event",
      event: { type: "inference_dispatched", device_id: "kebbi-1", message: { expression: "hot_face" } },
      nowMs: 1,
    });
    state = reduce(state, {
      type: "service_event",
      event: { type: "dispatch_failed", device_id: "kebbi-1", error: "broker unreachable" },
      nowMs: 2,
    });
    expect(state.devices["kebbi-1"]!.expression).toBe("hot_face");
    expect(state.devices["kebbi-1"]!.lastError).toBe("broker unreachable");
  });

  it("reloading devices keeps live view state for known ids", () => {
    let state = reduce(loaded(), { type: "devices_loaded", devices: [descriptor] });
    state = reduce(state, {
      type: "service_event",
      event: { type: "inference_dispatched", device_id: "kebbi-1", message: { expression: "hot_face" } },
      nowMs: 5,
    });
    state = reduce(state, { type: "devices_loaded", devices: [descriptor] });
    expect(state.devices["kebbi-1"]!.expression).toBe("hot_face");
  });
});
