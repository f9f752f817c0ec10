/**
 * Labeling session state and the pure logic behind the UI.
 *
 * A session tracks character ranges over the *rendered* text of one page:
 * the region selection plus the ordered labeled attribute selections inside
 * it. Everything here is DOM-free so it can be unit tested; the region spec
 * the backend receives is just slices of the rendered text.
 */

import type { ChangeReportDoc, PreviewResponse, RoiSpecDoc, SignatureDoc } from "./types.js";

export interface CharRange {
  start: number; // inclusive
  end: number; // exclusive
}

export interface AttributeSelection {
  label: string;
  range: CharRange;
}

export interface LabelingSession {
  sourceRef: string;
  renderedText: string;
  roiSelection: CharRange | null;
  attributeSelections: AttributeSelection[];
  preview: PreviewResponse | null;
  dirty: boolean;
}

export function newSession(sourceRef: string, renderedText: string): LabelingSession {
  return {
    sourceRef,
    renderedText,
    roiSelection: null,
    attributeSelections: [],
    preview: null,
    dirty: false,
  };
}

function touched(session: LabelingSession): LabelingSession {
  return { ...session, preview: session.preview, dirty: true };
}

export function withRoiSelection(session: LabelingSession, range: CharRange): LabelingSession {
  return { ...touched(session), roiSelection: range };
}

export function addAttribute(session: LabelingSession, label: string, range: CharRange): LabelingSession {
  const attributeSelections = [...session.attributeSelections, { label, range }].sort(
    (a, b) => a.range.start - b.range.start,
  );
  return { ...touched(session), attributeSelections };
}

export function removeAttribute(session: LabelingSession, label: string): LabelingSession {
  return {
    ...touched(session),
    attributeSelections: session.attributeSelections.filter((a) => a.label !== label),
  };
}

export function markPreviewed(session: LabelingSession, preview: PreviewResponse): LabelingSession {
  return { ...session, preview, dirty: false };
}

/** Save stays disabled while the session is dirty or never previewed. */
export function canSave(session: LabelingSession): boolean {
  return !session.dirty && session.preview !== null && validateSession(session).length === 0;
}

/** Human-readable problems; an empty list means the session can build a region spec. */
export function validateSession(session: LabelingSession): string[] {
  const problems: string[] = [];
  const roi = session.roiSelection;
  if (!roi || roi.end <= roi.start) {
    problems.push("select the region of interest first");
    return problems;
  }
  if (session.renderedText.slice(roi.start, roi.end).trim() === "") {
    problems.push("the region selection contains no text");
  }
  const seen = new Set<string>();
  let cursor = roi.start;
  for (const sel of session.attributeSelections) {
    const name = sel.label.trim();
    if (name === "") {
      problems.push("every attribute needs a label");
    } else if (seen.has(name)) {
      problems.push(`duplicate attribute label: ${name}`);
    }
    seen.add(name);
    if (sel.range.start < roi.start || sel.range.end > roi.end) {
      problems.push(`attribute ${name || "?"} reaches outside the region`);
    }
    if (sel.range.start < cursor) {
      problems.push(`attribute ${name || "?"} overlaps the previous selection`);
    }
    if (sel.range.end <= sel.range.start) {
      problems.push(`attribute ${name || "?"} is empty`);
    }
    cursor = Math.max(cursor, sel.range.end);
  }
  return problems;
}

/** Slice the rendered text into the JSON document the backend expects. */
export function buildRoiSpec(session: LabelingSession): RoiSpecDoc {
  const problems = validateSession(session);
  if (problems.length > 0) {
    throw new Error(problems.join("; "));
  }
  const roi = session.roiSelection as CharRange;
  return {
    roi_text: session.renderedText.slice(roi.start, roi.end),
    attributes: session.attributeSelections.map((sel) => ({
      label: sel.label.trim(),
      text: session.renderedText.slice(sel.range.start, sel.range.end),
    })),
  };
}

/** Canonical serialization, byte-identical to the CLI's region spec files. */
export function roiSpecJson(doc: RoiSpecDoc): string {
  return JSON.stringify(doc, null, 2) + "\n";
}

// --- change report rendering ----------------------------------------------

export interface SignatureRow {
  name: "sigma_upper" | "sigma_lower" | "delta";
  oldValue: number;
  newValue: number;
  changed: boolean;
}

export interface ChangeReportView {
  caseId: number;
  headline: string;
  upperChanged: boolean;
  lowerChanged: boolean;
  replaced: boolean;
  rows: SignatureRow[];
}

const HEADLINES: Record<number, string> = {
  1: "unchanged",
  2: "both sides shifted equally",
  3: "one side changed",
  4: "both sides changed differently",
};

export function renderChangeReport(report: ChangeReportDoc): ChangeReportView {
  let headline = HEADLINES[report.case] ?? `case ${report.case}`;
  if (report.case === 3) {
    headline = report.changed_side === "upper" ? "upper side changed" : "lower side changed";
  }
  const row = (name: SignatureRow["name"]): SignatureRow => ({
    name,
    oldValue: report.old_signature[name],
    newValue: report.new_signature[name],
    changed: report.old_signature[name] !== report.new_signature[name],
  });
  return {
    caseId: report.case,
    headline,
    upperChanged: report.changed_side === "upper" || report.changed_side === "both",
    lowerChanged: report.changed_side === "lower" || report.changed_side === "both",
    replaced: report.replaced,
    rows: [row("sigma_upper"), row("sigma_lower"), row("delta")],
  };
}

export function describeSignature(sig: SignatureDoc): string {
  return `upper ${sig.sigma_upper} / lower ${sig.sigma_lower} / gap ${sig.delta} (${sig.symmetry})`;
}
