import { describe, expect, it } from 'vitest';

import { handleKey } from '../src/keyboard.js';
import { ReviewSession } from '../src/session.js';
import type { AnnotationRecord, VideoInfo } from '../src/types.js';

const info: VideoInfo = {
  video_id: 'vid0', width: 16, height: 16, fps: 25, n_frames: 200,
  has_predictions: false, annotation_revision: 0,
};
const empty: AnnotationRecord = {
  format_version: 1, video_id: 'vid0', segments: [], revision: 0,
};

function session(): ReviewSession {
  return new ReviewSession(info, empty, [], {
    putAnnotations: () => Promise.reject(new Error('unused')),
  });
}

describe('handleKey', () => {
  it('steps one frame with plain arrows', () => {
    const s = session();
    expect(handleKey(s, { key: 'ArrowRight', shiftKey: false })).toBe(true);
    expect(s.cursor).toBe(1);
    handleKey(s, { key: 'ArrowLeft', shiftKey: false });
    expect(s.cursor).toBe(0);
  });

  it('steps one second with shift held', () => {
    const s = session();
    handleKey(s, { key: 'ArrowRight', shiftKey: true });
    expect(s.cursor).toBe(25);
    handleKey(s, { key: 'ArrowLeft', shiftKey: true });
    expect(s.cursor).toBe(0);
  });

  it('marks a segment with s then e', () => {
    const s = session();
    handleKey(s, { key: 'ArrowRight', shiftKey: true });
    handleKey(s, { key: 's', shiftKey: false });
    handleKey(s, { key: 'ArrowRight', shiftKey: true });
    handleKey(s, { key: 'e', shiftKey: false });
    expect(s.draft).toEqual([[25, 50]]);
  });

  it('leaves unknown keys alone', () => {
    const s = session();
    expect(handleKey(s, { key: 'x', shiftKey: false })).toBe(false);
    expect(s.cursor).toBe(0);
  });
});
