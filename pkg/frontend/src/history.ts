/** Time Machine: the snapshot chain of one entity, selection, diff view,
 * and restoration through the API. */

import type { ApiClient } from "./api.js";
import { ApiError } from "./api.js";
import type { Snapshot, TripleOut } from "./types.js";

export interface HistoryRow {
  index: number;
  time: string;
  agent: string;
  source: string;
  description: string;
  deleted: boolean;
}

export interface DiffView {
  insertions: TripleOut[];
  deletions: TripleOut[];
}

export class TimeMachineController {
  snapshots: Snapshot[] = [];
  entityDeleted = false;
  selected: number | null = null;
  selectedState: TripleOut[] = [];
  error: string | null = null;

  constructor(
    private api: ApiClient,
    readonly entity: string,
  ) {}

  async load(): Promise<void> {
    const response = await this.api.history(this.entity);
    this.snapshots = response.snapshots;
    this.entityDeleted = response.deleted;
  }

  rows(): HistoryRow[] {
    return this.snapshots.map((s) => ({
      index: s.index,
      time: s.generatedAtTime,
      agent: s.attributedTo,
      source: s.primarySource,
      description: s.description,
      deleted: s.invalidatedAtTime !== null && s.index === this.snapshots.length,
    }));
  }

  /** Selecting a snapshot materializes its state through the API. */
  async select(index: number): Promise<TripleOut[]> {
    const response = await this.api.version(this.entity, index);
    this.selected = index;
    this.selectedState = response.state;
    return response.state;
  }

  diffView(index: number): DiffView {
    const snapshot = this.snapshots.find((s) => s.index === index);
    if (!snapshot) return { insertions: [], deletions: [] };
    return { insertions: snapshot.delta.insertions, deletions: snapshot.delta.deletions };
  }

  get headIndex(): number {
    return this.snapshots.length;
  }

  /** Restore keeps the list untouched when the server rejects the call. */
  async restore(index: number, editToken: string): Promise<Snapshot | null> {
    this.error = null;
    try {
      const response = await this.api.restore(this.entity, index, editToken);
      await this.load();
      return response.snapshot;
    } catch (err) {
      if (err instanceof ApiError) {
        this.error = `${err.code}: ${err.message}`;
        return null;
      }
      throw err;
    }
  }
}

/** Time Vault: the registry of deleted entities, restorable from their
 * last pre-deletion snapshot. */
export class TimeVaultController {
  entries: { entity: string; deletedAt: string; description: string; snapshotCount: number }[] = [];
  error: string | null = null;

  constructor(private api: ApiClient) {}

  async load(): Promise<void> {
    this.entries = (await this.api.deleted()).deleted;
  }

  async restore(entity: string, editToken: string): Promise<boolean> {
    this.error = null;
    const entry = this.entries.find((e) => e.entity === entity);
    if (!entry || entry.snapshotCount < 2) {
      this.error = "nothing to restore";
      return false;
    }
    try {
      await this.api.restore(entity, entry.snapshotCount - 1, editToken);
      await this.load();
      return true;
    } catch (err) {
      if (err instanceof ApiError) {
        this.error = `${err.code}: ${err.message}`;
        return false;
      }
      throw err;
    }
  }
}
