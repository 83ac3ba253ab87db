import { ApiClient } from "./api.js";
import { ChatApp } from "./app.js";

const params = new URLSearchParams(window.location.search);
const baseUrl = params.get("api") ?? "http://localhost:8710";
const operatorMode = params.get("operator") === "1";

document.addEventListener("DOMContentLoaded", () => {
  const root = document.getElementById("app");
  if (!root) throw new Error("missing #app element");
  const app = new ChatApp(root, new ApiClient(baseUrl), operatorMode);
  const existing = sessionStorage.getItem("session_id");
  app.start(existing ?? undefined).then(() => {
    if (app.sessionId) sessionStorage.setItem("session_id", app.sessionId);
  }).catch((error) => {
    root.prepend(Object.assign(document.createElement("div"), {
      className: "error-banner",
      textContent: `Could not start a session: ${String(error)}`,
    }));
  });
});
