/**
 * Wire types for the annotation service API.
 *
 * The service speaks plain JSON over HTTP. Annotation writes use optimistic
 * locking: every PUT carries the revision the client based its edit on, and
 * a stale revision comes back as 409 with the current record so the client
 * can decide how to reconcile.
 */

/** Inclusive frame range, serialized as a two-element array. */
export type SegmentPair = [number, number];

/** One row of GET /api/videos. */
export interface VideoInfo {
  video_id: string;
  /** Frame width in pixels. */
  width: number;
  /** Frame height in pixels. */
  height: number;
  /** Frames per second of the source footage. */
  fps: number;
  /** Total frame count; valid cursor positions are 0 .. n_frames - 1. */
  n_frames: number;
  /** Whether the pipeline has produced stroke predictions for this video. */
  has_predictions: boolean;
  /** Revision of the stored annotations (0 when none saved yet). */
  annotation_revision: number;
}

/** The stored annotation document for one video. */
export interface AnnotationRecord {
  format_version: number;
  video_id: string;
  segments: SegmentPair[];
  /** Monotonically increasing write counter, bumped by every accepted PUT. */
  revision: number;
  /** ISO timestamp of the last accepted write, absent before the first. */
  updated_at?: string;
}

/** Body of a 400 response; field names the offending part of the request. */
export interface FieldError {
  field: string;
  message: string;
}

/** Outcome of a save attempt, as the session reports it to the UI. */
export type SaveResult =
  | { kind: 'saved'; revision: number }
  /** The server has a newer revision; its current record is attached. */
  | { kind: 'conflict'; server: AnnotationRecord }
  /** The server rejected the payload itself (should not happen for edits
   *  the session validated, but the UI still needs somewhere to put it). */
  | { kind: 'rejected'; error: FieldError }
  /** The request never completed; the draft is untouched and can be retried. */
  | { kind: 'offline'; message: string };
