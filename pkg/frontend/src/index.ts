export { ApiClient, ServiceRequestError } from "./client.js";
export { SessionController } from "./controller.js";
export { clusters, layout } from "./layout.js";
export { emptyView, render } from "./render.js";
export type { ViewModel, ViewNode, ViewEdge, ViewCandidate } from "./render.js";
export type * from "./types.js";
