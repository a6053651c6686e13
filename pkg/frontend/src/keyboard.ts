import type { ReviewSession } from './session.js';

export interface KeyInput {
  key: string;
  shiftKey: boolean;
}

/** Maps a key press onto the session. Returns whether it was consumed. */
export function handleKey(session: ReviewSession, ev: KeyInput): boolean {
  switch (ev.key) {
    case 'ArrowLeft':
      session.step(ev.shiftKey ? -session.secondStride : -1);
      return true;
    case 'ArrowRight':
      session.step(ev.shiftKey ? session.secondStride : 1);
      return true;
    case 's':
      session.markStart();
      return true;
    case 'e':
      session.markEnd();
      return true;
    default:
      return false;
  }
}
