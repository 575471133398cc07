import { AnnotateApi } from "./api.js";
import { LabelingApp } from "./app.js";

function required(params: URLSearchParams, name: string): string {
  const value = params.get(name);
  if (!value) {
    throw new Error(`missing ?${name}= query parameter`);
  }
  return value;
}

const params = new URLSearchParams(window.location.search);
const base = params.get("base") ?? "";
const root = document.getElementById("app");
if (!root) {
  throw new Error("missing #app mount point");
}

try {
  const app = new LabelingApp(
    root,
    new AnnotateApi(base),
    required(params, "session"),
    required(params, "coder"),
  );
  window.addEventListener("keydown", (event) => app.onKey(event));
  void app.start();
} catch (error) {
  root.textContent = String(error);
}
