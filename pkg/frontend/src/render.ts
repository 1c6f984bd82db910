import type { Store } from "./store.js";
import type { AnswerCell, MentionDoc, SessionDoc, StageError, TemplateDoc } from "./types.js";

/* pipeline stage -> the section that reports its failure */
const STAGE_SECTION: Record<string, string> = {
  translator: "sec-form",
  linker: "sec-linking",
  templates: "sec-templates",
  query: "sec-query",
  execution: "sec-results",
};

const SECTIONS: [string, string][] = [
  ["sec-form", "① Logical Form"],
  ["sec-linking", "② Entity Linking & Literal Matching"],
  ["sec-templates", "③ Candidate Templates"],
  ["sec-query", "④ Predicted SPARQL Query"],
  ["sec-results", "Results"],
  ["sec-preview", "Answer Preview"],
];

type Attrs = Record<string, string | boolean>;

function el(tag: string, attrs: Attrs = {}, ...children: (Node | string)[]): HTMLElement {
  const node = document.createElement(tag);
  for (const [key, value] of Object.entries(attrs)) {
    if (typeof value === "boolean") {
      if (value) node.setAttribute(key, "");
    } else {
      node.setAttribute(key, value);
    }
  }
  for (const child of children) {
    node.append(typeof child === "string" ? document.createTextNode(child) : child);
  }
  return node;
}

function stageErrorNote(err: StageError): HTMLElement {
  return el(
    "div",
    { class: "stage-error", role: "alert" },
    el("span", { class: "code" }, err.error),
    " ",
    err.message,
  );
}

function skippedNote(): HTMLElement {
  return el("div", { class: "skipped-note" }, "skipped: an earlier stage failed");
}

function shortUrl(url: string): string {
  const trimmed = url.replace(/^https?:\/\/(www\.)?dblp\.org/, "");
  return trimmed === "" ? url : trimmed;
}

export function buildSkeleton(root: HTMLElement): void {
  root.replaceChildren();
  const header = el("header", { class: "topbar" });
  header.append(el("h1", {}, "DBLP Question Answering"));
  const form = el("form", { id: "ask-form" });
  form.append(
    el("input", {
      id: "question",
      type: "text",
      placeholder: "ask about papers, authors, venues…",
      autocomplete: "off",
    }),
    el("button", { id: "ask-btn", type: "submit" }, "Ask"),
    el("span", { id: "busy-note", class: "busy-note", hidden: true }, "working…"),
  );
  header.append(form);
  header.append(el("div", { id: "examples", class: "examples" }));
  root.append(header);
  root.append(el("div", { id: "toast", class: "toast", role: "alert", hidden: true }));
  const main = el("main");
  for (const [id, label] of SECTIONS) {
    const section = el("section", { id });
    section.append(el("h2", {}, label));
    section.append(el("div", { class: "body" }));
    main.append(section);
  }
  root.append(main);
  root.setAttribute("data-ready", "1");
}

function renderExamples(root: HTMLElement, store: Store): void {
  const box = root.querySelector("#examples");
  if (!box) return;
  box.replaceChildren();
  store.examples.forEach((example, index) => {
    box.append(
      el(
        "button",
        { type: "button", class: "example", "data-example": String(index), title: example.note },
        example.text,
      ),
    );
  });
}

function renderToast(root: HTMLElement, store: Store): void {
  const toast = root.querySelector<HTMLElement>("#toast");
  if (!toast) return;
  toast.replaceChildren();
  if (store.toast === null) {
    toast.hidden = true;
    return;
  }
  toast.hidden = false;
  toast.append(
    el("span", {}, store.toast),
    el("button", { type: "button", "data-dismiss": "1" }, "dismiss"),
  );
}

function sectionBody(root: HTMLElement, id: string): HTMLElement | null {
  return root.querySelector<HTMLElement>(`#${id} > .body`);
}

function renderLogicalForm(body: HTMLElement, doc: SessionDoc): void {
  const lf = doc.logical_form;
  if (lf.parse_error !== null) {
    body.append(
      el("div", { class: "warning" }, `model output could not be parsed: ${lf.parse_error}`),
    );
  }
  if (lf.text !== null) {
    body.append(el("div", { class: "scroll-x" }, el("pre", { class: "form-text" }, lf.text)));
  } else if (lf.raw_tokens !== null) {
    body.append(
      el("div", { class: "scroll-x" }, el("pre", { class: "form-text raw" }, lf.raw_tokens)),
    );
  }
}

function renderMention(mention: MentionDoc, index: number): HTMLElement {
  const box = el("div", { class: "mention" });
  const head = el("div", { class: "mention-head" });
  head.append(
    el("span", { class: "mention-text" }, mention.display),
    el("span", { class: "badge" }, mention.kind),
    el("span", { class: "badge dim" }, mention.source),
  );
  box.append(head);
  if (mention.error !== null) {
    box.append(el("div", { class: "stage-error" }, el("span", { class: "code" }, mention.error)));
  }
  if (mention.candidates.length === 0 && mention.error === null) {
    box.append(el("div", { class: "empty-note" }, "no match found"));
  }
  mention.candidates.forEach((cand, candIndex) => {
    const row = el("label", { class: "row" });
    const radio = el("input", {
      type: "radio",
      name: `entity-${index}`,
      "data-mention": String(index),
      "data-candidate": String(candIndex),
    }) as HTMLInputElement;
    radio.checked = mention.selected_index === candIndex;
    row.append(
      radio,
      el("span", { class: "label" }, cand.label),
      el("span", { class: "uri", title: cand.uri }, shortUrl(cand.uri)),
      el("span", { class: "badge dim" }, `score ${cand.score}`),
    );
    box.append(row);
  });
  return box;
}

function renderLinking(body: HTMLElement, doc: SessionDoc): void {
  if (doc.mentions.length === 0) {
    body.append(el("div", { class: "empty-note" }, "no entity or literal mentions in this form"));
    return;
  }
  doc.mentions.forEach((mention, index) => body.append(renderMention(mention, index)));
}

function renderTemplateRow(tpl: TemplateDoc, index: number, selected: number | null): HTMLElement {
  const row = el("label", { class: "row template-row" });
  const radio = el("input", {
    type: "radio",
    name: "template",
    "data-template": String(index),
  }) as HTMLInputElement;
  radio.checked = selected === index;
  row.append(
    radio,
    el("span", { class: "badge" }, `#${tpl.rank}`),
    el("span", { class: "badge dim" }, `d=${tpl.distance.toFixed(3)}`),
    el("span", { class: "badge dim" }, `seen ${tpl.frequency}×`),
    el("span", { class: "scroll-x tpl-text" }, tpl.text),
  );
  return row;
}

function renderTemplates(body: HTMLElement, doc: SessionDoc): void {
  if (doc.templates.length === 0) {
    body.append(el("div", { class: "empty-note" }, "no template candidates"));
    return;
  }
  doc.templates.forEach((tpl, index) =>
    body.append(renderTemplateRow(tpl, index, doc.selected_template)),
  );
}

function renderQuery(body: HTMLElement, doc: SessionDoc, store: Store): void {
  body.append(el("span", { class: "badge origin" }, doc.query.origin));
  for (const warning of doc.query.warnings) {
    body.append(el("div", { class: "warning" }, warning));
  }
  const editor = el("textarea", {
    id: "query-editor",
    rows: "6",
    spellcheck: "false",
  }) as HTMLTextAreaElement;
  editor.value = store.draft ?? doc.query.sparql ?? "";
  body.append(editor);
  const controls = el("div", { class: "controls" });
  const runBtn = el("button", { id: "run-btn", type: "button" }, "Run") as HTMLButtonElement;
  const regenBtn = el(
    "button",
    { id: "regen-btn", type: "button", class: "secondary" },
    "Regenerate",
  ) as HTMLButtonElement;
  runBtn.disabled = store.anyBusy();
  regenBtn.disabled = store.anyBusy();
  controls.append(runBtn, regenBtn);
  body.append(controls);
}

function renderCell(cell: AnswerCell | null, previewed: string | null): HTMLElement {
  const td = el("td");
  if (cell === null) {
    td.append(el("span", { class: "empty-note" }, "n/a"));
    return td;
  }
  if (cell.type === "uri") {
    const row = el("label", { class: "answer-pick" });
    const radio = el("input", {
      type: "radio",
      name: "answer",
      "data-url": cell.value,
    }) as HTMLInputElement;
    radio.checked = previewed === cell.value;
    row.append(radio, el("span", { class: "uri", title: cell.value }, shortUrl(cell.value)));
    td.append(row);
    return td;
  }
  const hint = cell.datatype ?? cell.lang ?? "";
  td.append(el("span", { title: hint }, cell.value));
  return td;
}

function renderResults(body: HTMLElement, doc: SessionDoc, store: Store): void {
  const answers = doc.answers;
  if (answers === null) {
    if (!(("execution" in doc.stage_errors) || doc.skipped.includes("execution"))) {
      body.append(el("div", { class: "empty-note" }, "no results yet"));
    }
    return;
  }
  if (answers.boolean !== null) {
    body.append(el("div", { class: "boolean-result" }, answers.boolean ? "true" : "false"));
    return;
  }
  if (answers.rows.length === 0) {
    body.append(el("div", { class: "empty-note" }, "empty result"));
    return;
  }
  const table = el("table");
  const headRow = el("tr");
  for (const col of answers.columns) headRow.append(el("th", {}, col));
  table.append(el("thead", {}, headRow));
  const tbody = el("tbody");
  for (const row of answers.rows) {
    const tr = el("tr");
    for (const cell of row) tr.append(renderCell(cell, store.previewedUrl));
    tbody.append(tr);
  }
  table.append(tbody);
  body.append(el("div", { class: "scroll-x" }, table));
  body.append(el("div", { class: "count-note" }, `${answers.rows.length} rows`));
  if (answers.truncated) {
    body.append(el("div", { class: "warning" }, "result list was truncated by the server"));
  }
}

function renderPreview(body: HTMLElement, store: Store): void {
  if (store.previewedUrl === null) {
    body.append(el("div", { class: "empty-note" }, "tick an answer URL to preview it"));
    return;
  }
  // fully sandboxed: the frame may refuse remote pages, the card below is the fallback
  body.append(
    el("iframe", {
      id: "preview-frame",
      class: "preview",
      sandbox: "",
      title: "answer preview",
      src: store.previewedUrl,
    }),
  );
  const card = el("div", { class: "preview-card" });
  card.append(
    el("span", {}, "If the page refuses to render inside the frame, "),
    el(
      "a",
      { href: store.previewedUrl, target: "_blank", rel: "noopener noreferrer" },
      "open it in a new tab",
    ),
  );
  body.append(card);
}

const RENDERERS: Record<string, (body: HTMLElement, doc: SessionDoc, store: Store) => void> = {
  "sec-form": (body, doc) => renderLogicalForm(body, doc),
  "sec-linking": (body, doc) => renderLinking(body, doc),
  "sec-templates": (body, doc) => renderTemplates(body, doc),
  "sec-query": renderQuery,
  "sec-results": renderResults,
};

export function render(root: HTMLElement, store: Store): void {
  if (root.getAttribute("data-ready") !== "1") buildSkeleton(root);
  renderExamples(root, store);
  renderToast(root, store);
  const busyNote = root.querySelector<HTMLElement>("#busy-note");
  if (busyNote) busyNote.hidden = !store.anyBusy();
  const askBtn = root.querySelector<HTMLButtonElement>("#ask-btn");
  if (askBtn) askBtn.disabled = store.busy("ask");

  const doc = store.session;
  for (const [id] of SECTIONS) {
    const body = sectionBody(root, id);
    if (!body) continue;
    body.replaceChildren();
    if (id === "sec-preview") {
      try {
        renderPreview(body, store);
      } catch (exc) {
        body.append(el("div", { class: "stage-error" }, `render failed: ${String(exc)}`));
      }
      continue;
    }
    if (doc === null) {
      body.append(el("div", { class: "empty-note" }, "ask a question to begin"));
      continue;
    }
    // a failed or skipped stage reports inside its own section; the rest render as usual
    const stage = Object.entries(STAGE_SECTION).find(([, sec]) => sec === id)?.[0];
    if (stage && stage in doc.stage_errors) {
      const err = doc.stage_errors[stage];
      if (err) body.append(stageErrorNote(err));
    }
    if (stage && doc.skipped.includes(stage)) {
      body.append(skippedNote());
      continue;
    }
    try {
      const renderer = RENDERERS[id];
      if (renderer) renderer(body, doc, store);
    } catch (exc) {
      body.append(el("div", { class: "stage-error" }, `render failed: ${String(exc)}`));
    }
  }
}
