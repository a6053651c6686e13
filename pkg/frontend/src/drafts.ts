import type { DraftState } from './session.js';

type StorageLike = Pick<Storage, 'getItem' | 'setItem' | 'removeItem'>;

/**
 * Per-video draft persistence so switching videos (or reloading the page)
 * does not lose unsaved edits. Backed by localStorage in the app; tests
 * inject a map. A null store disables caching without branching callers.
 */
export class DraftCache {
  constructor(private readonly store: StorageLike | null) {}

  private key(videoId: string): string {
    return `strokeloc.draft.${videoId}`;
  }

  load(videoId: string): DraftState | null {
    if (!this.store) return null;
    try {
      const raw = this.store.getItem(this.key(videoId));
      if (!raw) return null;
      const parsed = JSON.parse(raw) as DraftState;
      if (!Array.isArray(parsed.segments)) return null;
      return parsed;
    } catch {
      return null; // corrupted entry, treat as absent
    }
  }

  save(videoId: string, state: DraftState): void {
    if (!this.store) return;
    try {
      this.store.setItem(this.key(videoId), JSON.stringify(state));
    } catch {
      // quota or privacy mode, drafts just stop persisting
    }
  }

  clear(videoId: string): void {
    this.store?.removeItem(this.key(videoId));
  }
}
