/** JSON contract types mirroring the server's openapi.yaml. */

export interface Term {
  type: "uri" | "literal" | "bnode";
  value: string;
  datatype?: string;
  "xml:lang"?: string;
}

export interface TripleOut {
  subject: string;
  predicate: string;
  object: Term;
}

export interface DeltaJson {
  text: string;
  deletions: TripleOut[];
  insertions: TripleOut[];
}

export interface Snapshot {
  id: string;
  entity: string;
  index: number;
  generatedAtTime: string;
  invalidatedAtTime: string | null;
  attributedTo: string;
  primarySource: string;
  derivedFrom: string[];
  description: string;
  delta: DeltaJson;
}

export interface FieldCondition {
  path: string;
  hasValue: Term;
}

export interface FieldRule {
  kind: "datatype" | "in" | "pattern" | "has-value";
  condition: FieldCondition | null;
  pattern?: string;
  datatypes?: string[];
  values?: Term[];
  value?: Term;
}

export type WidgetKind =
  | "text"
  | "textarea"
  | "number"
  | "date"
  | "datetime"
  | "year"
  | "dropdown"
  | "tag"
  | "nested-entity"
  | "reference";

export interface FormField {
  path: string;
  displayName: string;
  widget: WidgetKind;
  required: boolean;
  repeatable: boolean;
  minCount: number | null;
  maxCount: number | null;
  options: Term[] | null;
  nestedShape: string | null;
  visible: boolean;
  order: number;
  autocomplete: { minChars: number; target: "same-type" | "parent" } | null;
  rules: FieldRule[];
}

export interface VirtualProperty {
  label: string;
  targetShape: string;
  intermediateClass: string;
  linkFrom: string;
  linkTo: string;
}

export interface FormSchema {
  shape: string;
  targetClass: string;
  fields: FormField[];
  virtualProperties: VirtualProperty[];
  ordering: { orderedPath: string; chainPredicate: string } | null;
}

export interface EntityDetail {
  entity: string;
  label: string;
  shape: string | null;
  schema: FormSchema | null;
  state: TripleOut[];
  lockedBy: string | null;
}

export interface EntityListItem {
  iri: string;
  label: string;
  shape: string | null;
}

export interface EntityPage {
  entities: EntityListItem[];
  page: number;
  pageSize: number;
  total: number;
}

export interface ClassInfo {
  iri: string;
  count: number;
}

export interface HistoryResponse {
  entity: string;
  deleted: boolean;
  snapshots: Snapshot[];
}

export interface VersionResponse {
  entity: string;
  index: number;
  state: TripleOut[];
}

export interface LockGrant {
  entity: string;
  owner: string;
  token: string;
  expiresAt: string;
}

export interface AutocompleteHit {
  iri: string;
  value: string;
  label: string;
}

export interface DuplicateHit {
  iri: string;
  label: string;
}

export interface DeletedEntry {
  entity: string;
  deletedAt: string;
  description: string;
  snapshotCount: number;
}

export interface MergeResult {
  survivor: string;
  absorbed: string;
  rewrittenSubjects: string[];
  incorporated: TripleOut[];
  snapshots: Snapshot[];
}

export interface Violation {
  path: string;
  kind: string;
  message: string;
  value: Term | null;
}

export interface OrphanCandidate {
  entity: string;
  reason: "unreferenced" | "proxy-detached";
}

export interface ErrorBody {
  error: { code: string; message: string };
  violations?: Violation[];
  orphans?: OrphanCandidate[];
  holder?: string;
  expiresAt?: string;
}

/** Submission value variants; exactly one key is set. */
export type SubmissionValue =
  | { literal: string; datatype?: string; language?: string }
  | { reference: string }
  | { nested: Submission }
  | { target: string };

export interface Submission {
  shape: string | null;
  values: Record<string, SubmissionValue[]>;
  orphanDecisions?: Record<string, "keep" | "delete">;
}
