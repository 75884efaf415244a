export * from "./api.js";
export * from "./state.js";
export * from "./select.js";
export * from "./prescription.js";
export * from "./histogram.js";
export * from "./map.js";
export { ViewerApp } from "./app.js";
