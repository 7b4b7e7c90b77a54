import { createApp } from "./app.js";

const root = document.getElementById("app");
if (root) {
  const base = root.dataset.api ?? window.location.origin;
  const app = createApp(root, base);
  void app.boot();
}
