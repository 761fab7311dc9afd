import { readFileSync } from "node:fs";
import { join } from "node:path";
import { describe, expect, it } from "vitest";

import { clusters, layout } from "../src/layout.js";
import type { SessionState } from "../src/types.js";

function fixture(name: string): SessionState {
  return JSON.parse(readFileSync(join(__dirname, "fixtures", name), "utf-8"));
}

describe("layout", () => {
  const merging = fixture("state-merging.json");
  const ptd = merging.ptd!;

  it("finds one cluster per lexical fragment before any merge", () => {
    // the four-word fixture juxtaposes four disconnected descriptions
    expect(layout(ptd).clusterCount).toBe(4);
    const byCluster = new Map<number, string[]>();
    for (const [id, cluster] of clusters(ptd)) {
      byCluster.set(cluster, [...(byCluster.get(cluster) ?? []), id]);
    }
    expect(byCluster.size).toBe(4);
  });

  it("layers mothers strictly above daughters", () => {
    const placed = new Map(layout(ptd).nodes.map((n) => [n.id, n]));
    for (const edge of ptd.edges) {
      if (edge.kind === "dom" || edge.kind === "ldom") {
        expect(placed.get(edge.mother)!.layer).toBeLessThan(placed.get(edge.daughter)!.layer);
      }
    }
  });

  it("orders nodes within a layer by cluster then id", () => {
    const placed = layout(ptd).nodes;
    const layers = new Map<number, typeof placed>();
    for (const node of placed) {
      layers.set(node.layer, [...(layers.get(node.layer) ?? []), node]);
    }
    for (const members of layers.values()) {
      const sorted = [...members].sort((a, b) =>
        a.cluster !== b.cluster ? a.cluster - b.cluster : a.id < b.id ? -1 : 1,
      );
      expect(members.map((n) => n.id)).toEqual(sorted.map((n) => n.id));
      expect(members.map((n) => n.order)).toEqual(
        [...members.map((n) => n.order)].sort((a, b) => a - b),
      );
    }
  });

  it("is deterministic", () => {
    expect(JSON.stringify(layout(ptd))).toBe(JSON.stringify(layout(ptd)));
  });

  it("collapses to one cluster once saturated", () => {
    const saturated = fixture("state-saturated.json");
    expect(layout(saturated.ptd!).clusterCount).toBe(1);
  });
});
