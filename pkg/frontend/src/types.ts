/** Wire types mirrored from the session API.  Field names match the JSON
 *  bodies exactly; snake_case is the server's convention, kept as-is so a
 *  response can be used without a mapping layer. */

export interface StageError {
  error: string;
  message: string;
}

export interface LogicalFormDoc {
  text: string | null;
  raw_tokens: string | null;
  parse_error: string | null;
}

export interface CandidateDoc {
  uri: string;
  label: string;
  kind: string;
  score: number;
  rank: number;
}

export interface MentionDoc {
  text: string;
  kind: string;
  display: string;
  source: string;
  candidates: CandidateDoc[];
  selected_index: number | null;
  /* error code when lookup for this one mention failed */
  error: string | null;
}

export interface TemplateDoc {
  rank: number; // 1-based display rank
  distance: number;
  text: string;
  placeholder_count: number;
  frequency: number;
}

export interface QueryDoc {
  sparql: string | null;
  origin: "generated" | "user-edited";
  warnings: string[];
}

export interface AnswerCell {
  value: string;
  type: string;
  lang?: string;
  datatype?: string;
}

export interface AnswerTable {
  columns: string[];
  rows: (AnswerCell | null)[][];
  boolean: boolean | null;
  truncated: boolean;
}

export interface SessionDoc {
  id: string;
  question: string;
  revision: number;
  logical_form: LogicalFormDoc;
  mentions: MentionDoc[];
  templates: TemplateDoc[];
  selected_template: number | null; // 0-based
  query: QueryDoc;
  answers: AnswerTable | null;
  stage_errors: Record<string, StageError>;
  skipped: string[];
}

export interface ExampleDoc {
  text: string;
  note: string;
}

export interface ExampleListDoc {
  examples: ExampleDoc[];
}

/** All answer URLs in row-major order; these drive the preview pane. */
export function answerUrls(doc: SessionDoc): string[] {
  const urls: string[] = [];
  if (!doc.answers) return urls;
  for (const row of doc.answers.rows) {
    for (const cell of row) {
      if (cell && cell.type === "uri") urls.push(cell.value);
    }
  }
  return urls;
}
