/** Deterministic graph layout for description exports.
 *
 * Layered top-down: a node's layer is its depth under dominance edges
 * (large dominance counts as at least one step).  Within a layer nodes
 * are ordered by cluster, then by node id, so a fixed export always
 * yields the same picture.  A cluster is a connected component of the
 * description — one per lexical fragment until merges join them.
 */

import type { EdgeExport, PtdExport } from "./types.js";

export interface PlacedNode {
  id: string;
  layer: number;
  /** position within the layer, after cluster/id ordering */
  order: number;
  cluster: number;
}

export interface Layout {
  nodes: PlacedNode[];
  clusterCount: number;
  layerCount: number;
}

function endpoints(edge: EdgeExport): string[] {
  switch (edge.kind) {
    case "dom":
    case "ldom":
      return [edge.mother, edge.daughter];
    case "prec":
    case "lprec":
      return [edge.left, edge.right];
    case "arity":
      return [edge.mother, ...edge.daughters];
  }
}

function dominancePairs(edges: EdgeExport[]): [string, string][] {
  const pairs: [string, string][] = [];
  for (const edge of edges) {
    if (edge.kind === "dom" || edge.kind === "ldom") {
      pairs.push([edge.mother, edge.daughter]);
    }
  }
  return pairs;
}

/** Connected components over every edge kind, numbered in the order of
 *  their smallest node id. */
export function clusters(ptd: PtdExport): Map<string, number> {
  const parent = new Map<string, string>();
  const find = (x: string): string => {
    let root = x;
    while (parent.get(root) !== root) root = parent.get(root)!;
    while (parent.get(x) !== root) {
      const next = parent.get(x)!;
      parent.set(x, root);
      x = next;
    }
    return root;
  };
  for (const node of ptd.nodes) parent.set(node.id, node.id);
  for (const edge of ptd.edges) {
    const ends = endpoints(edge).filter((id) => parent.has(id));
    for (let i = 1; i < ends.length; i++) {
      parent.set(find(ends[i]), find(ends[0]));
    }
  }
  const roots = new Map<string, number>();
  const out = new Map<string, number>();
  const ids = ptd.nodes.map((n) => n.id).sort();
  for (const id of ids) {
    const root = find(id);
    if (!roots.has(root)) roots.set(root, roots.size);
    out.set(id, roots.get(root)!);
  }
  return out;
}

/** Longest dominance path from any root; cycles (never produced by the
 *  service) would fall back to depth 0 for the offending nodes. */
function depths(ptd: PtdExport): Map<string, number> {
  const pairs = dominancePairs(ptd.edges);
  const depth = new Map<string, number>(ptd.nodes.map((n) => [n.id, 0]));
  // relax |nodes| times: paths are short and the export is small
  for (let round = 0; round < ptd.nodes.length; round++) {
    let changed = false;
    for (const [mother, daughter] of pairs) {
      const proposal = (depth.get(mother) ?? 0) + 1;
      if (depth.has(daughter) && proposal > depth.get(daughter)! && proposal <= ptd.nodes.length) {
        depth.set(daughter, proposal);
        changed = true;
      }
    }
    if (!changed) break;
  }
  return depth;
}

export function layout(ptd: PtdExport): Layout {
  const cluster = clusters(ptd);
  const depth = depths(ptd);
  const sorted = [...ptd.nodes].sort((a, b) => {
    const byCluster = cluster.get(a.id)! - cluster.get(b.id)!;
    if (byCluster !== 0) return byCluster;
    return a.id < b.id ? -1 : a.id > b.id ? 1 : 0;
  });
  const perLayer = new Map<number, number>();
  const placed: PlacedNode[] = sorted.map((node) => {
    const layer = depth.get(node.id) ?? 0;
    const order = perLayer.get(layer) ?? 0;
    perLayer.set(layer, order + 1);
    return { id: node.id, layer, order, cluster: cluster.get(node.id)! };
  });
  const clusterCount = new Set(cluster.values()).size;
  const layerCount = placed.length ? Math.max(...placed.map((p) => p.layer)) + 1 : 0;
  return { nodes: placed, clusterCount, layerCount };
}
