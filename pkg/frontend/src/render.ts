/** Pure view construction.
 *
 * The view model is a pure function of the last state response: every
 * badge, edge style, and enabled control is computed here from the wire
 * data and nothing else.  No semantic computation happens client-side —
 * candidate outcomes, saturation, and models all come from the service.
 */

import { layout } from "./layout.js";
import type {
  Candidate,
  ModelExport,
  PolarityMark,
  SessionState,
  TreeExport,
} from "./types.js";

export type Badge = "+" | "−" | "~" | "=";

const BADGES: Record<PolarityMark, Badge> = {
  "->": "+",
  "<-": "−",
  "~": "~",
  "=": "=",
};

const NODE_GLYPHS = {
  default: "○", // open circle: may still gain daughters
  full: "●", // filled circle: daughter list complete
  empty: "□", // open square: empty word
  anchor: "◆", // diamond: carries phonology
} as const;

export interface ViewNode {
  id: string;
  glyph: string;
  kind: string;
  phon: string | null;
  layer: number;
  order: number;
  cluster: number;
  /** one line per feature: name, badges, values */
  features: { name: string; badges: Badge[]; values: string[]; label: string }[];
}

export interface ViewEdge {
  from: string;
  to: string;
  style: "solid" | "dashed" | "arrow" | "arrow-dashed";
  kind: string;
  tooltip: string | null;
}

export interface ViewCandidate extends Candidate {
  enabled: boolean;
  label: string;
}

export interface ViewModel {
  session: string | null;
  sentence: string;
  status: SessionState["status"] | null;
  banner: string | null;
  graph: { nodes: ViewNode[]; edges: ViewEdge[]; clusterCount: number };
  candidates: ViewCandidate[];
  timeline: string[];
  saturation: string[];
  modelTabEnabled: boolean;
  models: { bracketed: string; lines: string[] }[];
  toasts: string[];
}

export function emptyView(): ViewModel {
  return {
    session: null,
    sentence: "",
    status: null,
    banner: null,
    graph: { nodes: [], edges: [], clusterCount: 0 },
    candidates: [],
    timeline: [],
    saturation: [],
    modelTabEnabled: false,
    models: [],
    toasts: [],
  };
}

const REQUIRED_KEYS: (keyof SessionState)[] = [
  "session",
  "sentence",
  "status",
  "depth",
  "merges",
  "ptd",
  "saturation",
  "candidates",
  "models",
];

function schemaMismatch(state: unknown): string | null {
  if (typeof state !== "object" || state === null) {
    return "unrecognized response shape";
  }
  const missing = REQUIRED_KEYS.filter((key) => !(key in (state as Record<string, unknown>)));
  if (missing.length > 0) {
    return `response is missing fields: ${missing.join(", ")} — server and UI protocol versions differ`;
  }
  return null;
}

function modelLines(tree: TreeExport, indent = 0): string[] {
  const fs = Object.entries(tree.fs)
    .map(([name, value]) => `${name}=${value}`)
    .join(",");
  const phon = tree.phon !== undefined ? ` ⟨${tree.phon || "eps"}⟩` : "";
  const lines = [`${"  ".repeat(indent)}${fs || "·"}${phon}`];
  for (const child of tree.children ?? []) {
    lines.push(...modelLines(child, indent + 1));
  }
  return lines;
}

function viewModels(models: ModelExport[]): ViewModel["models"] {
  return models.map((model) => ({ bracketed: model.bracketed, lines: modelLines(model.tree) }));
}

/** Build the complete view for one state response.  `toasts` carries
 *  transient error messages surfaced by the controller. */
export function render(state: SessionState, toasts: string[] = []): ViewModel {
  const banner = schemaMismatch(state);
  if (banner !== null) {
    return { ...emptyView(), banner, toasts };
  }

  const view = emptyView();
  view.session = state.session;
  view.sentence = state.sentence;
  view.status = state.status;
  view.toasts = toasts;

  if (state.ptd !== null) {
    const placed = new Map(layout(state.ptd).nodes.map((p) => [p.id, p]));
    view.graph.clusterCount = layout(state.ptd).clusterCount;
    view.graph.nodes = state.ptd.nodes.map((node) => {
      const pos = placed.get(node.id)!;
      return {
        id: node.id,
        glyph: NODE_GLYPHS[node.type],
        kind: node.type,
        phon: node.phon,
        layer: pos.layer,
        order: pos.order,
        cluster: pos.cluster,
        features: node.features.map((feature) => {
          const badges = feature.polarities.map((p) => BADGES[p]);
          return {
            name: feature.name,
            badges,
            values: feature.values,
            label: `${feature.name} ${badges.join("")} ${feature.values.join("|")}`,
          };
        }),
      };
    });
    view.graph.edges = state.ptd.edges.flatMap((edge): ViewEdge[] => {
      switch (edge.kind) {
        case "dom":
          return [{ from: edge.mother, to: edge.daughter, style: "solid", kind: "dom", tooltip: null }];
        case "ldom":
          return [
            {
              from: edge.mother,
              to: edge.daughter,
              style: "dashed",
              kind: "ldom",
              tooltip: edge.filter === null ? "path filter: none" : `path filter: ${edge.filter}`,
            },
          ];
        case "prec":
          return [{ from: edge.left, to: edge.right, style: "arrow", kind: "prec", tooltip: null }];
        case "lprec":
          return [{ from: edge.left, to: edge.right, style: "arrow-dashed", kind: "lprec", tooltip: null }];
        case "arity":
          return []; // implied by the dom edges it closes over
      }
    });
  }

  view.candidates = state.candidates.map((candidate) => ({
    ...candidate,
    enabled: candidate.outcome === "OK",
    label:
      candidate.outcome === "OK"
        ? `${candidate.a} + ${candidate.b} on ${candidate.feature} (${candidate.kind})`
        : `${candidate.a} + ${candidate.b} on ${candidate.feature}: ${candidate.outcome}`,
  }));

  view.timeline = state.merges.map(([a, b], i) => `${i + 1}. ${a} + ${b}`);
  view.saturation = state.saturation.map(
    (entry) => `${entry.node} ${entry.feature} [${entry.polarities.map((p) => BADGES[p]).join(" ")}]`,
  );
  view.modelTabEnabled = state.status === "SATURATED";
  view.models = viewModels(state.models);
  return view;
}
