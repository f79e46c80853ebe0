/** Merge wizard: side-by-side comparison, survivor choice, a preview of
 * what the survivor will gain, and the confirming merge call. */

import type { ApiClient } from "./api.js";
import { ApiError } from "./api.js";
import { localName } from "./form.js";
import type { EntityDetail, MergeResult, Term } from "./types.js";

export interface ComparisonRow {
  predicate: string;
  label: string;
  left: string[];
  right: string[];
}

function renderTerm(term: Term): string {
  return term.type === "uri" ? localName(term.value) : term.value;
}

export class MergeWizardController {
  left: EntityDetail | null = null;
  right: EntityDetail | null = null;
  survivorSide: "left" | "right" = "left";
  error: string | null = null;
  result: MergeResult | null = null;

  constructor(private api: ApiClient) {}

  async load(leftIri: string, rightIri: string): Promise<void> {
    [this.left, this.right] = await Promise.all([
      this.api.getEntity(leftIri),
      this.api.getEntity(rightIri),
    ]);
  }

  comparison(): ComparisonRow[] {
    if (!this.left || !this.right) return [];
    const predicates = new Set<string>();
    for (const t of this.left.state) predicates.add(t.predicate);
    for (const t of this.right.state) predicates.add(t.predicate);
    const rows: ComparisonRow[] = [];
    for (const predicate of [...predicates].sort()) {
      rows.push({
        predicate,
        label: localName(predicate),
        left: this.left.state.filter((t) => t.predicate === predicate).map((t) => renderTerm(t.object)),
        right: this.right.state
          .filter((t) => t.predicate === predicate)
          .map((t) => renderTerm(t.object)),
      });
    }
    return rows;
  }

  get survivor(): EntityDetail | null {
    return this.survivorSide === "left" ? this.left : this.right;
  }

  get absorbed(): EntityDetail | null {
    return this.survivorSide === "left" ? this.right : this.left;
  }

  chooseSurvivor(side: "left" | "right"): void {
    this.survivorSide = side;
  }

  /** Values the survivor would gain: absorbed-side values it lacks. */
  preview(): ComparisonRow[] {
    const survivor = this.survivor;
    const absorbed = this.absorbed;
    if (!survivor || !absorbed) return [];
    const rows: ComparisonRow[] = [];
    const byPredicate = new Map<string, string[]>();
    const rdfType = "http://www.w3.org/1999/02/22-rdf-syntax-ns#type";
    for (const t of absorbed.state) {
      if (t.predicate === rdfType) continue; // survivor keeps its own type
      const existing = survivor.state.some(
        (s) =>
          s.predicate === t.predicate &&
          s.object.type === t.object.type &&
          s.object.value === t.object.value,
      );
      if (!existing) {
        const list = byPredicate.get(t.predicate) ?? [];
        list.push(renderTerm(t.object));
        byPredicate.set(t.predicate, list);
      }
    }
    for (const [predicate, gained] of [...byPredicate.entries()].sort()) {
      rows.push({ predicate, label: localName(predicate), left: [], right: gained });
    }
    return rows;
  }

  /** Self-merge stays impossible: the confirm control must be disabled. */
  get canConfirm(): boolean {
    return Boolean(this.left && this.right && this.left.entity !== this.right.entity);
  }

  async confirm(editTokens: string): Promise<MergeResult | null> {
    this.error = null;
    const survivor = this.survivor;
    const absorbed = this.absorbed;
    if (!survivor || !absorbed || !this.canConfirm) {
      this.error = "cannot merge an entity with itself";
      return null;
    }
    try {
      this.result = await this.api.merge(survivor.entity, absorbed.entity, editTokens);
      return this.result;
    } catch (err) {
      if (err instanceof ApiError) {
        this.error = `${err.code}: ${err.message}`;
        return null;
      }
      throw err;
    }
  }
}
