/** Wire types for the template service endpoints. */

export interface RoiAttributeDoc {
  label: string;
  text: string;
}

export interface RoiSpecDoc {
  roi_text: string;
  attributes: RoiAttributeDoc[];
}

export interface SignatureDoc {
  sigma_upper: number;
  sigma_lower: number;
  delta: number;
  symmetry: "fully-symmetric" | "lower-asymmetric" | "upper-asymmetric";
}

export interface DelimiterDoc {
  label: string;
  start_tag: string | null;
  end_tag: string | null;
  ordinal: number;
}

export interface FetchResponse {
  source_ref: string;
  decoded: string;
  rendered_text: string;
}

export interface PreviewResponse {
  signature: SignatureDoc;
  delimiters: DelimiterDoc[];
  extraction: { values: { label: string; text: string }[] };
  diagnostics: string[];
}

export interface SaveResponse {
  template_id: string;
}

export interface TemplateSummary {
  id: string;
  source_ref: string;
  created_at: string;
  updated_at: string;
  symmetry: string;
  labels: string[];
}

export interface ChangeReportDoc {
  case: 1 | 2 | 3 | 4;
  changed_side: "none" | "upper" | "lower" | "both";
  old_signature: SignatureDoc;
  new_signature: SignatureDoc;
  replaced: boolean;
}

export interface ApiErrorDoc {
  code: string;
  message: string;
}
