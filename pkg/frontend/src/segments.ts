/** Pure helpers for inclusive frame segments kept sorted and disjoint. */

import type { SegmentPair } from './types.js';

/** Display length in frames; both endpoints count. */
export function segmentLength([start, end]: SegmentPair): number {
  return end - start + 1;
}

/** Inclusive ranges overlap when each starts at or before the other ends. */
export function overlaps(a: SegmentPair, b: SegmentPair): boolean {
  return a[0] <= b[1] && b[0] <= a[1];
}

/** Index of the first list entry overlapping seg, or -1. */
export function firstOverlap(seg: SegmentPair, list: SegmentPair[]): number {
  return list.findIndex(other => overlaps(seg, other));
}

export type AddResult =
  | { ok: true; segments: SegmentPair[] }
  | { ok: false; error: string };

/**
 * Insert a segment into a sorted disjoint list, refusing overlaps.
 * Mirrors the server-side validation so a draft the client accepts is a
 * draft the server will accept.
 */
export function disjointAdd(list: SegmentPair[], seg: SegmentPair): AddResult {
  const [start, end] = seg;
  if (!Number.isInteger(start) || !Number.isInteger(end)) {
    return { ok: false, error: 'segment endpoints must be integers' };
  }
  if (start > end) {
    return { ok: false, error: `segment start ${start} is after end ${end}` };
  }
  const clash = firstOverlap(seg, list);
  if (clash >= 0) {
    const [cs, ce] = list[clash]!;
    return { ok: false, error: `[${start}, ${end}] overlaps [${cs}, ${ce}]` };
  }
  const segments = [...list, seg].sort((a, b) => a[0] - b[0]);
  return { ok: true, segments };
}

/**
 * Reconcile a local draft with a newer server record: the server's segments
 * win, and every draft segment that fits around them is re-added. Returns
 * the merged list plus whatever had to be dropped, so the UI can say so.
 */
export function mergeDraftOntoServer(
  server: SegmentPair[],
  draft: SegmentPair[],
): { segments: SegmentPair[]; dropped: SegmentPair[] } {
  let segments = [...server].sort((a, b) => a[0] - b[0]);
  const dropped: SegmentPair[] = [];
  for (const seg of draft) {
    if (segments.some(s => s[0] === seg[0] && s[1] === seg[1])) {
      continue; // already present, nothing lost
    }
    const added = disjointAdd(segments, seg);
    if (added.ok) {
      segments = added.segments;
    } else {
      dropped.push(seg);
    }
  }
  return { segments, dropped };
}
