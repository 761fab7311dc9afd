/** Browser entry point: renders the view model into plain DOM.
 *
 * Rendering is a full redraw from the view model; with small fixture
 * grammars this is instantaneous and keeps the DOM a pure function of
 * the view, which itself is a pure function of the last state response.
 */

import { ApiClient } from "./client.js";
import { SessionController } from "./controller.js";
import type { ViewModel } from "./render.js";

const LAYER_H = 90;
const SLOT_W = 150;

function el<K extends keyof HTMLElementTagNameMap>(
  tag: K,
  attrs: Record<string, string> = {},
  text?: string,
): HTMLElementTagNameMap[K] {
  const node = document.createElement(tag);
  for (const [key, value] of Object.entries(attrs)) node.setAttribute(key, value);
  if (text !== undefined) node.textContent = text;
  return node;
}

function drawGraph(view: ViewModel, host: HTMLElement): void {
  host.replaceChildren();
  const svgNS = "http://www.w3.org/2000/svg";
  const svg = document.createElementNS(svgNS, "svg");
  const maxOrder = Math.max(0, ...view.graph.nodes.map((n) => n.order));
  const maxLayer = Math.max(0, ...view.graph.nodes.map((n) => n.layer));
  svg.setAttribute("width", String((maxOrder + 1) * SLOT_W + 40));
  svg.setAttribute("height", String((maxLayer + 1) * LAYER_H + 40));
  const place = new Map(view.graph.nodes.map((n) => [n.id, n]));
  const xy = (id: string): [number, number] => {
    const n = place.get(id)!;
    return [n.order * SLOT_W + 80, n.layer * LAYER_H + 30];
  };
  for (const edge of view.graph.edges) {
    if (!place.has(edge.from) || !place.has(edge.to)) continue;
    const [x1, y1] = xy(edge.from);
    const [x2, y2] = xy(edge.to);
    const line = document.createElementNS(svgNS, "line");
    line.setAttribute("x1", String(x1));
    line.setAttribute("y1", String(y1));
    line.setAttribute("x2", String(x2));
    line.setAttribute("y2", String(y2));
    line.setAttribute("stroke", edge.kind.startsWith("prec") || edge.kind.startsWith("lprec") ? "#888" : "#333");
    if (edge.style.includes("dashed")) line.setAttribute("stroke-dasharray", "6 4");
    if (edge.tooltip !== null) {
      const title = document.createElementNS(svgNS, "title");
      title.textContent = edge.tooltip;
      line.appendChild(title);
    }
    svg.appendChild(line);
  }
  for (const node of view.graph.nodes) {
    const [x, y] = xy(node.id);
    const group = document.createElementNS(svgNS, "g");
    const label = document.createElementNS(svgNS, "text");
    label.setAttribute("x", String(x));
    label.setAttribute("y", String(y));
    label.setAttribute("text-anchor", "middle");
    label.textContent = `${node.glyph} ${node.id}${node.phon !== null ? ` ⟨${node.phon || "eps"}⟩` : ""}`;
    group.appendChild(label);
    node.features.forEach((feature, i) => {
      const line = document.createElementNS(svgNS, "text");
      line.setAttribute("x", String(x));
      line.setAttribute("y", String(y + 16 * (i + 1)));
      line.setAttribute("text-anchor", "middle");
      line.setAttribute("font-size", "11");
      line.textContent = feature.label;
      group.appendChild(line);
    });
    svg.appendChild(group);
  }
  host.appendChild(svg);
}

export function mount(root: HTMLElement, baseUrl: string): SessionController {
  const form = el("form");
  const sentence = el("input", { placeholder: "sentence", size: "40" });
  const grammar = el("input", { placeholder: "grammar id", size: "12" });
  const start = el("button", { type: "submit" }, "start session");
  form.append(sentence, grammar, start);

  const banner = el("div", { class: "banner" });
  const toasts = el("div", { class: "toasts" });
  const status = el("div", { class: "status" });
  const selectionsBox = el("div", { class: "selections" });
  const graphBox = el("div", { class: "graph" });
  const candidatesBox = el("div", { class: "candidates" });
  const timelineBox = el("ol", { class: "timeline" });
  const saturationBox = el("ul", { class: "saturation" });
  const modelsBox = el("div", { class: "models" });
  const undoButton = el("button", { type: "button" }, "undo");
  root.append(form, banner, toasts, status, selectionsBox, graphBox, undoButton, candidatesBox, timelineBox, saturationBox, modelsBox);

  const controller = new SessionController(new ApiClient(baseUrl), (view) => {
    banner.textContent = view.banner ?? "";
    toasts.replaceChildren(...view.toasts.map((t) => el("div", { class: "toast" }, t)));
    status.textContent = view.status === null ? "" : `${view.sentence} — ${view.status}`;
    drawGraph(view, graphBox);
    candidatesBox.replaceChildren(
      ...view.candidates.map((candidate) => {
        const button = el("button", { type: "button" }, candidate.label);
        button.disabled = !candidate.enabled;
        button.addEventListener("click", () => void controller.merge(candidate.a, candidate.b));
        return button;
      }),
    );
    timelineBox.replaceChildren(...view.timeline.map((entry) => el("li", {}, entry)));
    saturationBox.replaceChildren(...view.saturation.map((entry) => el("li", {}, entry)));
    modelsBox.replaceChildren(
      ...(view.modelTabEnabled
        ? view.models.map((model) => el("pre", {}, [model.bracketed, ...model.lines].join("\n")))
        : []),
    );
  });

  form.addEventListener("submit", (event) => {
    event.preventDefault();
    void controller.start(sentence.value, grammar.value).then(async () => {
      const listing = await controller.selections();
      selectionsBox.replaceChildren(
        ...(listing?.selections ?? []).map((sel) => {
          const words = sel.items.map((item) => `${item.word}:${item.template}`).join("  ");
          const button = el("button", { type: "button" }, `selection ${sel.index}: ${words}`);
          button.addEventListener("click", () => {
            selectionsBox.replaceChildren();
            void controller.choose(sel.index);
          });
          return button;
        }),
      );
    });
  });
  undoButton.addEventListener("click", () => void controller.undo());
  return controller;
}
