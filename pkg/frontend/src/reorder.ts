/** Drag-and-drop reordering over a proxy chain: optimistic preview while
 * dragging, a single reorder request on drop carrying the full
 * permutation, revert on rejection, and no request at all when the item
 * lands back in its original slot. */

import type { ApiClient } from "./api.js";
import { ApiError } from "./api.js";
import type { Snapshot } from "./types.js";

export class ReorderController {
  order: string[];
  private original: string[];
  private dragIndex: number | null = null;
  error: string | null = null;

  constructor(items: string[]) {
    this.order = [...items];
    this.original = [...items];
  }

  begin(index: number): void {
    this.dragIndex = index;
    this.error = null;
  }

  /** Move the dragged item so it previews at `index`. */
  hoverAt(index: number): void {
    if (this.dragIndex === null || index === this.dragIndex) return;
    const [moved] = this.order.splice(this.dragIndex, 1);
    this.order.splice(index, 0, moved);
    this.dragIndex = index;
  }

  get changed(): boolean {
    return (
      this.order.length !== this.original.length ||
      this.order.some((item, i) => item !== this.original[i])
    );
  }

  /** Commit the drop. Returns null without any request when the order is
   * unchanged; reverts the optimistic order when the server rejects. */
  async drop(
    api: ApiClient,
    entity: string,
    path: string,
    editToken: string,
  ): Promise<Snapshot[] | null> {
    this.dragIndex = null;
    if (!this.changed) return null;
    try {
      const response = await api.reorder(entity, path, [...this.order], editToken);
      this.original = [...this.order];
      return response.snapshots;
    } catch (err) {
      this.order = [...this.original];
      if (err instanceof ApiError) {
        this.error = `${err.code}: ${err.message}`;
        return null;
      }
      throw err;
    }
  }

  cancel(): void {
    this.order = [...this.original];
    this.dragIndex = null;
  }
}
