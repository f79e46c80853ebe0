import { describe, expect, it } from "vitest";

import { ApiClient } from "../src/api.js";
import { MergeWizardController } from "../src/merge.js";
import type { EntityDetail } from "../src/types.js";
import { NS, stubFetch } from "./helpers.js";

const LEFT = "https://w3id.org/example/person/dup-a";
const RIGHT = "https://w3id.org/example/person/dup-b";
const NAME = NS.foaf + "name";
const GIVEN = NS.foaf + "givenName";

function detail(iri: string, label: string, extraGiven?: string): EntityDetail {
  const state = [
    {
      subject: iri,
      predicate: "http://www.w3.org/1999/02/22-rdf-syntax-ns#type",
      object: { type: "uri" as const, value: NS.foaf + "Person" },
    },
    { subject: iri, predicate: NAME, object: { type: "literal" as const, value: label } },
  ];
  if (extraGiven) {
    state.push({
      subject: iri,
      predicate: GIVEN,
      object: { type: "literal" as const, value: extraGiven },
    });
  }
  return { entity: iri, label, shape: null, schema: null, state, lockedBy: null };
}

function wizardWith(routes: Record<string, (body?: unknown) => { status?: number; body?: unknown }>) {
  const { fetch, calls } = stubFetch({
    [`GET /api/entity/${encodeURIComponent(LEFT)}`]: () => ({ body: detail(LEFT, "Ada Lovelace") }),
    [`GET /api/entity/${encodeURIComponent(RIGHT)}`]: () => ({
      body: detail(RIGHT, "Ada Lovelace", "Ada"),
    }),
    ...routes,
  });
  return { wizard: new MergeWizardController(new ApiClient({ fetchImpl: fetch })), calls };
}

describe("merge wizard", () => {
  it("builds a side-by-side comparison", async () => {
    const { wizard } = wizardWith({});
    await wizard.load(LEFT, RIGHT);
    const rows = wizard.comparison();
    const nameRow = rows.find((r) => r.predicate === NAME);
    expect(nameRow?.left).toEqual(["Ada Lovelace"]);
    expect(nameRow?.right).toEqual(["Ada Lovelace"]);
    const givenRow = rows.find((r) => r.predicate === GIVEN);
    expect(givenRow?.left).toEqual([]);
    expect(givenRow?.right).toEqual(["Ada"]);
  });

  it("previews only what the survivor would gain", async () => {
    const { wizard } = wizardWith({});
    await wizard.load(LEFT, RIGHT);
    wizard.chooseSurvivor("left");
    const preview = wizard.preview();
    expect(preview).toHaveLength(1);
    expect(preview[0].predicate).toBe(GIVEN);
    // flipping the survivor flips the direction: left has nothing extra
    wizard.chooseSurvivor("right");
    expect(wizard.preview()).toHaveLength(0);
  });

  it("confirm posts survivor and absorbed with the lock tokens", async () => {
    const { wizard, calls } = wizardWith({
      "POST /api/merge": () => ({
        body: {
          survivor: LEFT,
          absorbed: RIGHT,
          rewrittenSubjects: [],
          incorporated: [],
          snapshots: [],
        },
      }),
    });
    await wizard.load(LEFT, RIGHT);
    const result = await wizard.confirm("tok1,tok2");
    expect(result?.survivor).toBe(LEFT);
    const merge = calls.find((c) => c.path === "/api/merge");
    expect(merge?.body).toEqual({ survivor: LEFT, absorbed: RIGHT });
  });

  it("self-merge cannot be confirmed", async () => {
    const { wizard } = wizardWith({});
    await wizard.load(LEFT, LEFT);
    expect(wizard.canConfirm).toBe(false);
    const result = await wizard.confirm("tok");
    expect(result).toBeNull();
    expect(wizard.error).toContain("itself");
  });

  it("server rejection surfaces the reason", async () => {
    const { wizard } = wizardWith({
      "POST /api/merge": () => ({
        status: 409,
        body: { error: { code: "merge-rejected", message: "absorbed is deleted" } },
      }),
    });
    await wizard.load(LEFT, RIGHT);
    const result = await wizard.confirm("tok1,tok2");
    expect(result).toBeNull();
    expect(wizard.error).toContain("merge-rejected");
  });
});
