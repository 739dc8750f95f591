import { ApiClient } from "./api";
import { App } from "./app";
import "./style.css";

const base = import.meta.env.VITE_API_BASE ?? "";
const root = document.getElementById("app");
if (!root) throw new Error("missing #app mount point");

const app = new App(root, new ApiClient(base));
void app.boot().catch((err) => {
  app.setStatus(`cannot reach the engine: ${err instanceof Error ? err.message : err}`, true);
});
