/**
 * Labeling workbench: load a page, select the region of interest over its
 * rendered text, label the attributes, preview the induced template live,
 * save it, and run change checks against stored templates.
 */

import { ServiceClient, ApiError } from "./api.js";
import {
  addAttribute,
  buildRoiSpec,
  canSave,
  describeSignature,
  markPreviewed,
  newSession,
  removeAttribute,
  renderChangeReport,
  validateSession,
  withRoiSelection,
  type CharRange,
  type LabelingSession,
} from "./session.js";
import type { PreviewResponse, TemplateSummary } from "./types.js";

const client = new ServiceClient("");

let session: LabelingSession | null = null;

const $ = <T extends HTMLElement>(id: string): T => {
  const el = document.getElementById(id);
  if (!el) throw new Error(`missing element #${id}`);
  return el as T;
};

function setStatus(text: string, isError = false): void {
  const el = $("status");
  el.textContent = text;
  el.className = isError ? "status error" : "status";
}

function selectionOffsets(pane: HTMLElement): CharRange | null {
  const sel = window.getSelection();
  if (!sel || sel.rangeCount === 0 || sel.isCollapsed) return null;
  const range = sel.getRangeAt(0);
  if (!pane.contains(range.startContainer) || !pane.contains(range.endContainer)) return null;
  const lead = document.createRange();
  lead.selectNodeContents(pane);
  lead.setEnd(range.startContainer, range.startOffset);
  const start = lead.toString().length;
  const end = start + range.toString().length;
  return end > start ? { start, end } : null;
}

function renderPane(): void {
  const pane = $("text-pane");
  pane.textContent = "";
  if (!session) return;

  const text = session.renderedText;
  const cuts = new Set<number>([0, text.length]);
  if (session.roiSelection) {
    cuts.add(session.roiSelection.start);
    cuts.add(session.roiSelection.end);
  }
  for (const a of session.attributeSelections) {
    cuts.add(a.range.start);
    cuts.add(a.range.end);
  }
  const points = [...cuts].sort((x, y) => x - y);

  for (let i = 0; i + 1 < points.length; i++) {
    const s = points[i] as number;
    const e = points[i + 1] as number;
    const span = document.createElement("span");
    span.textContent = text.slice(s, e);
    const roi = session.roiSelection;
    if (roi && s >= roi.start && e <= roi.end) span.classList.add("in-roi");
    const attr = session.attributeSelections.find((a) => s >= a.range.start && e <= a.range.end);
    if (attr) {
      span.classList.add("in-attr");
      span.title = attr.label;
    }
    pane.appendChild(span);
  }
}

function renderSessionState(): void {
  const list = $("attr-list");
  list.textContent = "";
  if (session) {
    for (const a of session.attributeSelections) {
      const item = document.createElement("li");
      const text = session.renderedText.slice(a.range.start, a.range.end);
      item.textContent = `${a.label}: "${text.length > 60 ? text.slice(0, 57) + "..." : text}" `;
      const drop = document.createElement("button");
      drop.textContent = "remove";
      drop.addEventListener("click", () => {
        if (!session) return;
        session = removeAttribute(session, a.label);
        refresh();
      });
      item.appendChild(drop);
      list.appendChild(item);
    }
  }

  const problems = session ? validateSession(session) : ["load a page first"];
  $("validation").textContent = problems.join("; ");
  ($("preview-btn") as HTMLButtonElement).disabled = !session || problems.length > 0;
  ($("save-btn") as HTMLButtonElement).disabled = !session || !canSave(session);
  $("dirty-note").textContent =
    session && session.dirty ? "selections changed; preview again before saving" : "";
}

function renderPreview(preview: PreviewResponse | null): void {
  const box = $("preview-box");
  box.textContent = "";
  if (!preview) return;

  const sig = document.createElement("p");
  sig.textContent = `signature: ${describeSignature(preview.signature)}`;
  box.appendChild(sig);

  const table = document.createElement("table");
  table.innerHTML = "<tr><th>start</th><th>attribute</th><th>end</th></tr>";
  for (const d of preview.delimiters) {
    const tr = document.createElement("tr");
    for (const cell of [d.start_tag ?? "", d.label, d.end_tag ?? ""]) {
      const td = document.createElement("td");
      td.textContent = cell;
      tr.appendChild(td);
    }
    table.appendChild(tr);
  }
  box.appendChild(table);

  const values = document.createElement("ul");
  for (const v of preview.extraction.values) {
    const li = document.createElement("li");
    li.textContent = `${v.label} = ${v.text}`;
    values.appendChild(li);
  }
  box.appendChild(values);

  for (const note of preview.diagnostics) {
    const p = document.createElement("p");
    p.className = "diagnostic";
    p.textContent = note;
    box.appendChild(p);
  }
}

function refresh(): void {
  renderPane();
  renderSessionState();
  renderPreview(session?.preview ?? null);
}

async function loadTemplates(): Promise<void> {
  const rows = $("template-rows");
  rows.textContent = "";
  let templates: TemplateSummary[] = [];
  try {
    templates = await client.list();
  } catch (err) {
    setStatus(String(err), true);
    return;
  }
  for (const t of templates) {
    const tr = document.createElement("tr");

    const idCell = document.createElement("td");
    idCell.textContent = t.id;
    const refCell = document.createElement("td");
    refCell.textContent = t.source_ref;
    const labelCell = document.createElement("td");
    labelCell.textContent = t.labels.join(", ");
    const stampCell = document.createElement("td");
    stampCell.textContent = t.updated_at;

    const actionCell = document.createElement("td");
    const checkBtn = document.createElement("button");
    checkBtn.textContent = "check";
    checkBtn.addEventListener("click", async () => {
      const pageRef = ($("check-page") as HTMLInputElement).value.trim() || undefined;
      const auto = ($("check-auto") as HTMLInputElement).checked;
      try {
        const report = await client.check(t.id, pageRef, auto);
        showReport(t.id, report);
        await loadTemplates();
      } catch (err) {
        setStatus(String(err), true);
      }
    });
    actionCell.appendChild(checkBtn);

    tr.append(idCell, refCell, labelCell, stampCell, actionCell);
    rows.appendChild(tr);
  }
}

function showReport(templateId: string, report: Parameters<typeof renderChangeReport>[0]): void {
  const view = renderChangeReport(report);
  const box = $("report-box");
  box.textContent = "";

  const badge = document.createElement("span");
  badge.className = `badge case-${view.caseId}`;
  badge.textContent = view.headline;
  const head = document.createElement("p");
  head.append(`template ${templateId}: `, badge);
  if (view.replaced) head.append(" (stored template replaced)");
  box.appendChild(head);

  const table = document.createElement("table");
  table.innerHTML = "<tr><th></th><th>old</th><th>new</th></tr>";
  for (const row of view.rows) {
    const tr = document.createElement("tr");
    if (row.changed) tr.className = "changed";
    const name = document.createElement("td");
    name.textContent = row.name;
    const oldTd = document.createElement("td");
    oldTd.textContent = String(row.oldValue);
    const newTd = document.createElement("td");
    newTd.textContent = String(row.newValue);
    tr.append(name, oldTd, newTd);
    table.appendChild(tr);
  }
  box.appendChild(table);
}

function wire(): void {
  $("load-btn").addEventListener("click", async () => {
    const url = ($("page-url") as HTMLInputElement).value.trim();
    if (!url) {
      setStatus("enter a page URL or file path", true);
      return;
    }
    setStatus("loading...");
    try {
      const page = await client.fetchPage(url);
      session = newSession(page.source_ref, page.rendered_text);
      setStatus(`loaded ${url} (${page.rendered_text.length} rendered characters)`);
      refresh();
    } catch (err) {
      setStatus(String(err), true);
    }
  });

  $("mark-roi-btn").addEventListener("click", () => {
    if (!session) return;
    const range = selectionOffsets($("text-pane"));
    if (!range) {
      setStatus("select the region text in the pane first", true);
      return;
    }
    session = withRoiSelection(session, range);
    setStatus("region marked");
    refresh();
  });

  $("add-attr-btn").addEventListener("click", () => {
    if (!session) return;
    const label = ($("attr-label") as HTMLInputElement).value.trim();
    const range = selectionOffsets($("text-pane"));
    if (!label) {
      setStatus("enter a label for the selection", true);
      return;
    }
    if (!range) {
      setStatus("select the attribute text in the pane first", true);
      return;
    }
    session = addAttribute(session, label, range);
    ($("attr-label") as HTMLInputElement).value = "";
    refresh();
  });

  $("preview-btn").addEventListener("click", async () => {
    if (!session) return;
    try {
      const spec = buildRoiSpec(session);
      const preview = await client.preview(session.sourceRef, spec);
      session = markPreviewed(session, preview);
      setStatus("preview ready; save when it looks right");
      refresh();
    } catch (err) {
      setStatus(err instanceof ApiError ? `${err.code}: ${err.message}` : String(err), true);
    }
  });

  $("save-btn").addEventListener("click", async () => {
    if (!session || !canSave(session)) return;
    try {
      const spec = buildRoiSpec(session);
      const saved = await client.save(session.sourceRef, spec);
      setStatus(`saved template ${saved.template_id}`);
      await loadTemplates();
    } catch (err) {
      setStatus(err instanceof ApiError ? `${err.code}: ${err.message}` : String(err), true);
    }
  });

  $("refresh-btn").addEventListener("click", () => void loadTemplates());

  void loadTemplates();
}

document.addEventListener("DOMContentLoaded", wire);
