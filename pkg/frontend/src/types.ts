/** Wire-protocol types for the debug service (docs/service-protocol.md). */

export type SessionStatus = "SELECTING" | "MERGING" | "SATURATED" | "DEAD_END";

export type PolarityMark = "->" | "<-" | "~" | "=";

export type NodeKind = "default" | "full" | "empty" | "anchor";

export interface FeatureExport {
  name: string;
  polarities: PolarityMark[];
  values: string[];
  corefs: string[];
}

export interface NodeExport {
  id: string;
  type: NodeKind;
  phon: string | null;
  features: FeatureExport[];
  origins: string[];
}

export interface DomEdge {
  kind: "dom";
  mother: string;
  daughter: string;
  pos: string;
}

export interface LDomEdge {
  kind: "ldom";
  mother: string;
  daughter: string;
  filter: string | null;
}

export interface PrecEdge {
  kind: "prec" | "lprec";
  left: string;
  right: string;
}

export interface ArityEdge {
  kind: "arity";
  mother: string;
  daughters: string[];
}

export type EdgeExport = DomEdge | LDomEdge | PrecEdge | ArityEdge;

export interface PtdExport {
  nodes: NodeExport[];
  edges: EdgeExport[];
}

export interface SaturationEntry {
  node: string;
  feature: string;
  polarities: PolarityMark[];
}

export interface Candidate {
  a: string;
  b: string;
  feature: string;
  kind: "dual" | "virtual";
  outcome: string; // "OK" or a merge-clash kind
}

export interface TreeExport {
  id: string;
  fs: Record<string, string>;
  children?: TreeExport[];
  phon?: string;
}

export interface ModelExport {
  bracketed: string;
  tree: TreeExport;
  words: string[];
  interpretation: Record<string, string>;
  interpretation_groups: Record<string, string[]>;
  underspecified: Record<string, Record<string, string[]>>;
}

export interface SessionState {
  session: string;
  sentence: string;
  grammar: string;
  status: SessionStatus;
  selections_total: number;
  selections_kept: number;
  chosen: number | null;
  depth: number;
  merges: [string, string][];
  ptd: PtdExport | null;
  saturation: SaturationEntry[];
  candidates: Candidate[];
  models: ModelExport[];
}

export interface SelectionItem {
  word: string;
  template: string;
  usage: Record<string, string>;
  instance: string;
}

export interface SelectionListing {
  session: string;
  selections: { index: number; items: SelectionItem[] }[];
  total: number;
  continuation: number | null;
}

export interface WireError {
  error: { code: string; message: string };
}
