/** Schema-driven form state: values, dirty flags, nested sections with
 * persistent summaries, client-side validation, submission building.
 *
 * Free of DOM concerns so the logic is testable headlessly; render.ts
 * projects this model into elements.
 */

import type {
  FieldCondition,
  FormField,
  FormSchema,
  Submission,
  SubmissionValue,
  Term,
  TripleOut,
  VirtualProperty,
} from "./types.js";

export type SchemaResolver = (shape: string) => FormSchema;

export type FieldValue =
  | { kind: "literal"; text: string; datatype?: string; language?: string }
  | { kind: "reference"; iri: string; label?: string }
  | { kind: "nested"; form: FormController; open: boolean }
  | { kind: "target"; iri: string; label?: string };

export interface ClientViolation {
  key: string;
  kind: "missing-required" | "too-many" | "pattern" | "condition-pattern" | "not-in-options";
  message: string;
}

export function localName(iri: string): string {
  const trimmed = iri.replace(/[/#]+$/, "");
  const cut = Math.max(trimmed.lastIndexOf("/"), trimmed.lastIndexOf("#"));
  return cut >= 0 ? trimmed.slice(cut + 1) : trimmed;
}

export class FormController {
  readonly schema: FormSchema;
  readonly depth: number;
  private resolver: SchemaResolver;
  private values = new Map<string, FieldValue[]>();
  private dirtyKeys = new Set<string>();

  constructor(
    schema: FormSchema,
    resolver: SchemaResolver,
    initialState?: TripleOut[],
    depth = 0,
  ) {
    this.schema = schema;
    this.resolver = resolver;
    this.depth = depth;
    if (initialState) {
      this.loadState(initialState);
    }
  }

  private loadState(state: TripleOut[]): void {
    for (const field of this.schema.fields) {
      const entries: FieldValue[] = [];
      for (const triple of state) {
        if (triple.predicate !== field.path) continue;
        const term = triple.object;
        if (term.type === "literal") {
          entries.push({
            kind: "literal",
            text: term.value,
            datatype: term.datatype,
            language: term["xml:lang"],
          });
        } else if (term.type === "uri") {
          entries.push({ kind: "reference", iri: term.value });
        }
      }
      if (entries.length) this.values.set(field.path, entries);
    }
  }

  // -- field access -----------------------------------------------------------

  visibleFields(): FormField[] {
    return this.schema.fields.filter((f) => f.visible);
  }

  virtualProperties(): VirtualProperty[] {
    return this.schema.virtualProperties;
  }

  valuesFor(key: string): FieldValue[] {
    return this.values.get(key) ?? [];
  }

  isDirty(key?: string): boolean {
    if (key !== undefined) return this.dirtyKeys.has(key);
    if (this.dirtyKeys.size > 0) return true;
    return this.nestedForms().some(({ value }) => value.form.isDirty());
  }

  private nestedForms(): { key: string; index: number; value: Extract<FieldValue, { kind: "nested" }> }[] {
    const out: { key: string; index: number; value: Extract<FieldValue, { kind: "nested" }> }[] = [];
    for (const [key, entries] of this.values) {
      entries.forEach((entry, index) => {
        if (entry.kind === "nested") out.push({ key, index, value: entry });
      });
    }
    return out;
  }

  // -- mutations ----------------------------------------------------------------

  private entriesOf(key: string): FieldValue[] {
    let entries = this.values.get(key);
    if (!entries) {
      entries = [];
      this.values.set(key, entries);
    }
    return entries;
  }

  setLiteral(key: string, index: number, text: string): void {
    const entries = this.entriesOf(key);
    while (entries.length <= index) entries.push({ kind: "literal", text: "" });
    const current = entries[index];
    entries[index] = {
      kind: "literal",
      text,
      datatype: current.kind === "literal" ? current.datatype : undefined,
      language: current.kind === "literal" ? current.language : undefined,
    };
    this.dirtyKeys.add(key);
  }

  setReference(key: string, index: number, iri: string, label?: string): void {
    const entries = this.entriesOf(key);
    while (entries.length <= index) entries.push({ kind: "reference", iri: "" });
    entries[index] = { kind: "reference", iri, label };
    this.dirtyKeys.add(key);
  }

  addValue(key: string, value: FieldValue): number {
    const entries = this.entriesOf(key);
    entries.push(value);
    this.dirtyKeys.add(key);
    return entries.length - 1;
  }

  removeValue(key: string, index: number): void {
    const entries = this.entriesOf(key);
    entries.splice(index, 1);
    this.dirtyKeys.add(key);
  }

  /** Start a new nested entity under a nested-entity/reference field. */
  addNested(fieldPath: string, shape?: string): FormController {
    const field = this.schema.fields.find((f) => f.path === fieldPath);
    const targetShape = shape ?? field?.nestedShape;
    if (!targetShape) {
      throw new Error(`field ${fieldPath} does not accept nested entities`);
    }
    const child = new FormController(this.resolver(targetShape), this.resolver, undefined, this.depth + 1);
    this.addValue(fieldPath, { kind: "nested", form: child, open: true });
    return child;
  }

  addVirtualTarget(label: string, iri: string, display?: string): void {
    if (!this.schema.virtualProperties.some((v) => v.label === label)) {
      throw new Error(`no virtual property labelled ${label}`);
    }
    this.addValue(label, { kind: "target", iri, label: display });
  }

  // -- nested sections ---------------------------------------------------------

  toggleSection(key: string, index: number): void {
    const entry = this.valuesFor(key)[index];
    if (entry?.kind === "nested") entry.open = !entry.open;
  }

  isOpen(key: string, index: number): boolean {
    const entry = this.valuesFor(key)[index];
    return entry?.kind === "nested" ? entry.open : false;
  }

  /** One-line summary of a nested section's entered values; stays visible
   * while the section is collapsed so prior input is never hidden. */
  summary(key: string, index: number): string {
    const entry = this.valuesFor(key)[index];
    if (entry?.kind !== "nested") return "";
    return entry.form.summarize();
  }

  summarize(): string {
    const parts: string[] = [];
    for (const field of this.schema.fields) {
      for (const value of this.valuesFor(field.path)) {
        if (value.kind === "literal" && value.text) {
          parts.push(`${field.displayName}: ${value.text}`);
        } else if (value.kind === "reference" && value.iri) {
          parts.push(`${field.displayName}: ${value.label ?? localName(value.iri)}`);
        } else if (value.kind === "nested") {
          const inner = value.form.summarize();
          if (inner) parts.push(`${field.displayName} (${inner})`);
        }
      }
    }
    return parts.join(" · ");
  }

  /** Labels from this form down through each first open nested section;
   * gives the user a trail through deep nesting. */
  breadcrumb(): string[] {
    const trail = [localName(this.schema.targetClass)];
    for (const { value } of this.nestedForms()) {
      if (value.open) {
        trail.push(...value.form.breadcrumb());
        break;
      }
    }
    return trail;
  }

  // -- validation ----------------------------------------------------------------

  private conditionHolds(condition: FieldCondition): boolean {
    const values = this.valuesFor(condition.path);
    const wanted = condition.hasValue;
    return values.some((v) => {
      if (v.kind === "reference" || v.kind === "target") {
        return wanted.type === "uri" && v.iri === wanted.value;
      }
      if (v.kind === "literal") {
        return wanted.type === "literal" && v.text === wanted.value;
      }
      return false;
    });
  }

  private presentCount(key: string): number {
    return this.valuesFor(key).filter((v) => {
      if (v.kind === "literal") return v.text.length > 0;
      if (v.kind === "reference" || v.kind === "target") return v.iri.length > 0;
      return true; // nested forms count once started
    }).length;
  }

  validate(): ClientViolation[] {
    const violations: ClientViolation[] = [];
    for (const field of this.schema.fields) {
      const count = this.presentCount(field.path);
      if (field.required && count === 0) {
        violations.push({
          key: field.path,
          kind: "missing-required",
          message: `${field.displayName} is required`,
        });
      }
      if (field.maxCount !== null && count > field.maxCount) {
        violations.push({
          key: field.path,
          kind: "too-many",
          message: `${field.displayName} allows at most ${field.maxCount} value(s)`,
        });
      }
      for (const rule of field.rules) {
        if (rule.condition && !this.conditionHolds(rule.condition)) continue;
        if (rule.kind === "pattern" && rule.pattern) {
          const regex = new RegExp(rule.pattern);
          for (const value of this.valuesFor(field.path)) {
            const text =
              value.kind === "literal" ? value.text : value.kind === "reference" ? value.iri : "";
            if (text && !regex.test(text)) {
              violations.push({
                key: field.path,
                kind: rule.condition ? "condition-pattern" : "pattern",
                message: `${field.displayName} does not match the expected pattern`,
              });
            }
          }
        } else if (rule.kind === "in" && rule.values) {
          const allowed = new Set(rule.values.map((t: Term) => t.value));
          for (const value of this.valuesFor(field.path)) {
            const actual =
              value.kind === "reference" || value.kind === "target"
                ? value.iri
                : value.kind === "literal"
                  ? value.text
                  : "";
            if (actual && !allowed.has(actual)) {
              violations.push({
                key: field.path,
                kind: "not-in-options",
                message: `${field.displayName} must be one of the listed options`,
              });
            }
          }
        }
      }
      // nested forms validate recursively; keys are prefixed for display
      this.valuesFor(field.path).forEach((value, index) => {
        if (value.kind === "nested") {
          for (const inner of value.form.validate()) {
            violations.push({
              ...inner,
              key: `${field.path}[${index}].${inner.key}`,
            });
          }
        }
      });
    }
    return violations;
  }

  isSubmittable(): boolean {
    return this.validate().length === 0;
  }

  // -- submission -------------------------------------------------------------------

  buildSubmission(): Submission {
    const values: Record<string, SubmissionValue[]> = {};
    for (const [key, entries] of this.values) {
      const encoded: SubmissionValue[] = [];
      for (const value of entries) {
        if (value.kind === "literal") {
          if (!value.text) continue; // blank inputs are omitted, not sent empty
          const out: SubmissionValue = { literal: value.text };
          if (value.datatype) (out as { datatype?: string }).datatype = value.datatype;
          if (value.language) (out as { language?: string }).language = value.language;
          encoded.push(out);
        } else if (value.kind === "reference") {
          if (value.iri) encoded.push({ reference: value.iri });
        } else if (value.kind === "target") {
          if (value.iri) encoded.push({ target: value.iri });
        } else {
          encoded.push({ nested: value.form.buildSubmission() });
        }
      }
      if (encoded.length) values[key] = encoded;
    }
    return { shape: this.schema.shape, values };
  }
}
