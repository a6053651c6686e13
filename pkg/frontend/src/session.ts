/**
 * Editing state for one video under review.
 *
 * The session owns the cursor, the draft segment list, and the revision the
 * draft is based on. All edits are validated locally with the same rules
 * the server applies, so the only PUT failure a correct UI can see is a
 * revision conflict, and that one is modeled explicitly rather than thrown.
 */

import type { AnnotSvcClient } from './api.js';
import { ApiError } from './api.js';
import { disjointAdd, mergeDraftOntoServer } from './segments.js';
import type { AnnotationRecord, SaveResult, SegmentPair, VideoInfo } from './types.js';

/** What the draft cache persists between visits to a video. */
export interface DraftState {
  segments: SegmentPair[];
  pendingStart: number | null;
  baseRevision: number;
  dirty: boolean;
}

export class ReviewSession {
  readonly videoId: string;
  cursor = 0;
  predictions: SegmentPair[];
  draft: SegmentPair[];
  baseRevision: number;
  dirty: boolean;
  /** Start frame marked but not yet closed with an end mark. */
  pendingStart: number | null = null;
  /** Inline validation message for the UI; cleared by the next edit. */
  lastError: string | null = null;
  /** Server record attached to the last 409; null when in sync. */
  conflict: AnnotationRecord | null = null;

  constructor(
    readonly info: VideoInfo,
    record: AnnotationRecord,
    predictions: SegmentPair[],
    private readonly client: Pick<AnnotSvcClient, 'putAnnotations'>,
    restored?: DraftState,
  ) {
    this.videoId = info.video_id;
    this.predictions = predictions;
    if (restored && restored.baseRevision === record.revision) {
      this.draft = restored.segments.map(s => [...s] as SegmentPair);
      this.pendingStart = restored.pendingStart;
      this.dirty = restored.dirty;
    } else {
      // Stale or absent cache entry: start from what the server has.
      this.draft = record.segments.map(s => [...s] as SegmentPair);
      this.dirty = false;
    }
    this.baseRevision = record.revision;
  }

  /** Move the cursor by delta frames, clamped to the video. */
  step(delta: number): number {
    const last = Math.max(0, this.info.n_frames - 1);
    this.cursor = Math.min(last, Math.max(0, this.cursor + delta));
    return this.cursor;
  }

  /** One second worth of frames, the shift-arrow stride. */
  get secondStride(): number {
    return Math.max(1, Math.round(this.info.fps));
  }

  markStart(): void {
    this.pendingStart = this.cursor;
    this.lastError = null;
  }

  markEnd(): void {
    if (this.pendingStart === null) {
      this.lastError = 'mark a start frame first (s)';
      return;
    }
    if (this.cursor < this.pendingStart) {
      this.lastError = `end ${this.cursor} is before start ${this.pendingStart}`;
      return;
    }
    if (this.addSegment([this.pendingStart, this.cursor])) {
      this.pendingStart = null;
    }
  }

  acceptPrediction(index: number): void {
    const seg = this.predictions[index];
    if (!seg) {
      this.lastError = `no prediction ${index}`;
      return;
    }
    this.addSegment([seg[0], seg[1]]);
  }

  deleteSegment(index: number): void {
    if (index < 0 || index >= this.draft.length) {
      this.lastError = `no segment ${index}`;
      return;
    }
    this.draft.splice(index, 1);
    this.dirty = true;
    this.lastError = null;
  }

  private addSegment(seg: SegmentPair): boolean {
    const added = disjointAdd(this.draft, seg);
    if (!added.ok) {
      this.lastError = added.error;
      return false;
    }
    this.draft = added.segments;
    this.dirty = true;
    this.lastError = null;
    return true;
  }

  /**
   * Push the draft. On success the session rebases onto the new revision;
   * on conflict the draft is kept and the server record exposed; on a
   * transport failure nothing changes, so save can simply be called again.
   */
  async save(): Promise<SaveResult> {
    try {
      const outcome = await this.client.putAnnotations(
        this.videoId, this.draft, this.baseRevision);
      if (outcome.status === 200) {
        this.baseRevision = outcome.record.revision;
        this.dirty = false;
        this.conflict = null;
        return { kind: 'saved', revision: outcome.record.revision };
      }
      this.conflict = outcome.current;
      return { kind: 'conflict', server: outcome.current };
    } catch (err) {
      if (err instanceof ApiError) {
        this.lastError = err.message;
        return {
          kind: 'rejected',
          error: { field: err.field ?? 'body', message: err.message },
        };
      }
      return { kind: 'offline', message: err instanceof Error ? err.message : String(err) };
    }
  }

  /** Resolve a conflict by discarding the draft in favor of the server. */
  reloadFromServer(): void {
    if (!this.conflict) return;
    this.draft = this.conflict.segments.map(s => [...s] as SegmentPair);
    this.baseRevision = this.conflict.revision;
    this.conflict = null;
    this.dirty = false;
    this.pendingStart = null;
    this.lastError = null;
  }

  /**
   * Resolve a conflict by rebasing: keep the server's segments and re-add
   * every local one that still fits. Returns what could not be kept. The
   * merged draft is unsaved, so a follow-up save is expected.
   */
  mergeWithServer(): SegmentPair[] {
    if (!this.conflict) return [];
    const merged = mergeDraftOntoServer(this.conflict.segments, this.draft);
    this.draft = merged.segments;
    this.baseRevision = this.conflict.revision;
    this.conflict = null;
    this.dirty = true;
    return merged.dropped;
  }

  /** Snapshot for the per-video draft cache. */
  toDraftState(): DraftState {
    return {
      segments: this.draft.map(s => [...s] as SegmentPair),
      pendingStart: this.pendingStart,
      baseRevision: this.baseRevision,
      dirty: this.dirty,
    };
  }
}
