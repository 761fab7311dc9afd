import { type ChildProcess, spawn, spawnSync } from "node:child_process";
import { join } from "node:path";
import { afterAll, beforeAll, describe, expect, it } from "vitest";

import { ApiClient, ServiceRequestError } from "../src/client.js";
import { render } from "../src/render.js";
import { stableStringify } from "./util.js";

const REPO = join(__dirname, "..", "..");
const PORT = 8713;
const BASE = `http://127.0.0.1:${PORT}`;
const GRAMMAR = join(REPO, "fixtures", "contraction", "grammar.json");
const LEXICON = join(REPO, "fixtures", "contraction", "lexicon.json");

let server: ChildProcess;

async function waitForServer(): Promise<void> {
  for (let i = 0; i < 100; i++) {
    try {
      const response = await fetch(`${BASE}/state`, {
        method: "POST",
        headers: { "content-type": "application/json" },
        body: JSON.stringify({ session: "probe" }),
      });
      if (response.status === 404) return; // up: UNKNOWN_SESSION
    } catch {
      // not listening yet
    }
    await new Promise((resolve) => setTimeout(resolve, 100));
  }
  throw new Error("debug service did not come up");
}

beforeAll(async () => {
  server = spawn(
    "python3",
    [
      "-m",
      "polartree.cli",
      "serve",
      "--grammar",
      GRAMMAR,
      "--lexicon",
      LEXICON,
      "--id",
      "contraction",
      "--port",
      String(PORT),
    ],
    { cwd: REPO, stdio: "ignore" },
  );
  await waitForServer();
}, 30000);

afterAll(() => {
  server.kill();
});

function batchParse(sentence: string): { bracketed: string }[] {
  const result = spawnSync(
    "python3",
    [
      "-m",
      "polartree.cli",
      "parse",
      "--grammar",
      GRAMMAR,
      "--lexicon",
      LEXICON,
      "--format",
      "structured",
      sentence,
    ],
    { cwd: REPO, encoding: "utf-8" },
  );
  expect(result.status).toBe(0);
  return JSON.parse(result.stdout).models;
}

describe("end-to-end interactive session", () => {
  it("steps to saturation, matches the batch parse, and undoes exactly", async () => {
    const client = new ApiClient(BASE);
    let state = await client.createSession("qu'aime marie", "contraction");
    expect(state.status).toBe("SELECTING");
    const listing = await client.listSelections(state.session);
    expect(listing.total).toBeGreaterThan(0);

    state = await client.chooseSelection(state.session, 0);
    expect(state.status).toBe("MERGING");

    // step to saturation, snapshotting the export before each merge
    const snapshots: string[] = [];
    while (state.status === "MERGING") {
      const candidate = state.candidates.find((c) => c.outcome === "OK");
      expect(candidate).toBeDefined();
      snapshots.push(stableStringify(state));
      state = await client.merge(state.session, candidate!.a, candidate!.b);
    }
    expect(state.status).toBe("SATURATED");
    expect(state.models.length).toBe(1);

    // the model shown in the view equals the batch pipeline's output
    const view = render(state);
    expect(view.modelTabEnabled).toBe(true);
    const batch = batchParse("qu'aime marie");
    expect(batch.length).toBe(1);
    expect(view.models[0].bracketed).toBe(batch[0].bracketed);

    // undo restores each previous export byte-for-byte
    for (let i = snapshots.length - 1; i >= 0; i--) {
      state = await client.undo(state.session);
      expect(stableStringify(state)).toBe(snapshots[i]);
    }
    await expect(client.undo(state.session)).rejects.toMatchObject({
      code: "WRONG_STATE",
      httpStatus: 409,
    });

    // the client only spoke documented endpoints
    const documented = new Set([
      "/create-session",
      "/list-selections",
      "/choose-selection",
      "/candidates",
      "/merge",
      "/undo",
      "/state",
      "/delete-session",
    ]);
    for (const entry of client.log) expect(documented.has(entry.endpoint)).toBe(true);

    await client.deleteSession(state.session);
    await expect(client.state(state.session)).rejects.toBeInstanceOf(ServiceRequestError);
  }, 60000);
});
