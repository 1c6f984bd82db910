import { buildSkeleton, render } from "./render.js";
import type { Store } from "./store.js";

/** Wires delegated DOM events to store actions and keeps the page rendered.
 *  Listeners attach once to the root; re-renders never re-bind anything. */
export function mount(root: HTMLElement, store: Store): void {
  buildSkeleton(root);
  store.subscribe(() => render(root, store));

  root.addEventListener("submit", (ev) => {
    const form = ev.target as HTMLElement;
    if (form.id !== "ask-form") return;
    ev.preventDefault();
    const input = root.querySelector<HTMLInputElement>("#question");
    const question = input?.value.trim() ?? "";
    if (question !== "") void store.ask(question);
  });

  root.addEventListener("click", (ev) => {
    const target = ev.target as HTMLElement;
    const exampleBtn = target.closest<HTMLElement>("[data-example]");
    if (exampleBtn) {
      const index = Number(exampleBtn.getAttribute("data-example"));
      const example = store.examples[index];
      if (example) {
        const input = root.querySelector<HTMLInputElement>("#question");
        if (input) input.value = example.text;
        void store.ask(example.text);
      }
      return;
    }
    if (target.closest("[data-dismiss]")) {
      store.dismissToast();
      return;
    }
    if (target.closest("#run-btn")) {
      const editor = root.querySelector<HTMLTextAreaElement>("#query-editor");
      if (editor) void store.run(editor.value);
      return;
    }
    if (target.closest("#regen-btn")) {
      void store.regenerate();
    }
  });

  root.addEventListener("change", (ev) => {
    const target = ev.target as HTMLElement;
    if (!(target instanceof HTMLInputElement) || target.type !== "radio") return;
    const mention = target.getAttribute("data-mention");
    const candidate = target.getAttribute("data-candidate");
    if (mention !== null && candidate !== null) {
      void store.tickEntity(Number(mention), Number(candidate));
      return;
    }
    const template = target.getAttribute("data-template");
    if (template !== null) {
      void store.tickTemplate(Number(template));
      return;
    }
    const url = target.getAttribute("data-url");
    if (url !== null) store.previewAnswer(url);
  });

  root.addEventListener("input", (ev) => {
    const target = ev.target as HTMLElement;
    if (target instanceof HTMLTextAreaElement && target.id === "query-editor") {
      store.setDraft(target.value);
    }
  });

  render(root, store);
}
