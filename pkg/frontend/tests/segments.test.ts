import { describe, expect, it } from 'vitest';

import {
  disjointAdd,
  firstOverlap,
  mergeDraftOntoServer,
  overlaps,
  segmentLength,
} from '../src/segments.js';
import type { SegmentPair } from '../src/types.js';

describe('segmentLength', () => {
  it('counts both endpoints', () => {
    expect(segmentLength([10, 10])).toBe(1);
    expect(segmentLength([100, 159])).toBe(60);
  });
});

describe('overlaps', () => {
  it('treats a shared frame as overlap', () => {
    expect(overlaps([10, 20], [20, 30])).toBe(true);
    expect(overlaps([10, 20], [21, 30])).toBe(false);
    expect(overlaps([21, 30], [10, 20])).toBe(false);
    expect(overlaps([0, 100], [40, 50])).toBe(true);
  });
});

describe('disjointAdd', () => {
  it('keeps the list sorted by start', () => {
    const r1 = disjointAdd([[50, 60]], [10, 20]);
    expect(r1).toEqual({ ok: true, segments: [[10, 20], [50, 60]] });
  });

  it('rejects inverted segments', () => {
    const r = disjointAdd([], [50, 40]);
    expect(r.ok).toBe(false);
    if (!r.ok) expect(r.error).toContain('after end');
  });

  it('rejects non-integer endpoints', () => {
    expect(disjointAdd([], [1.5, 3]).ok).toBe(false);
  });

  it('rejects overlap and names the clash', () => {
    const r = disjointAdd([[10, 89]], [20, 29]);
    expect(r.ok).toBe(false);
    if (!r.ok) expect(r.error).toBe('[20, 29] overlaps [10, 89]');
  });

  it('does not mutate the input list', () => {
    const list: SegmentPair[] = [[5, 9]];
    disjointAdd(list, [20, 30]);
    expect(list).toEqual([[5, 9]]);
  });
});

describe('mergeDraftOntoServer', () => {
  it('keeps server segments and re-adds what fits', () => {
    const merged = mergeDraftOntoServer([[5, 9]], [[10, 89], [95, 110]]);
    expect(merged.segments).toEqual([[5, 9], [10, 89], [95, 110]]);
    expect(merged.dropped).toEqual([]);
  });

  it('drops draft segments that clash with the server', () => {
    const merged = mergeDraftOntoServer([[10, 30]], [[20, 40], [50, 60]]);
    expect(merged.segments).toEqual([[10, 30], [50, 60]]);
    expect(merged.dropped).toEqual([[20, 40]]);
  });

  it('treats an exact duplicate as already present, not dropped', () => {
    const merged = mergeDraftOntoServer([[10, 89]], [[10, 89]]);
    expect(merged.segments).toEqual([[10, 89]]);
    expect(merged.dropped).toEqual([]);
  });
});
