import { SessionApi } from "./api.js";
import { Store } from "./store.js";
import { mount } from "./app.js";

// same-origin by default; ?api=http://host:port points the page at a
// server running elsewhere (the API allows cross-origin requests)
const params = new URLSearchParams(window.location.search);
const base = params.get("api") ?? "";

const root = document.getElementById("app");
if (root) {
  const store = new Store(new SessionApi(base));
  mount(root, store);
  void store.loadExamples();
}
