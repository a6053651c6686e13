/** DOM wiring. All review logic lives in session.ts; this file renders it. */

import { AnnotSvcClient } from './api.js';
import { DraftCache } from './drafts.js';
import { handleKey } from './keyboard.js';
import { ReviewSession } from './session.js';
import { segmentLength } from './segments.js';
import type { SegmentPair, VideoInfo } from './types.js';

const client = new AnnotSvcClient('');
const drafts = new DraftCache(safeLocalStorage());
let session: ReviewSession | null = null;

function safeLocalStorage(): Storage | null {
  try {
    return window.localStorage;
  } catch {
    return null;
  }
}

function el<T extends HTMLElement>(id: string): T {
  const node = document.getElementById(id);
  if (!node) throw new Error(`missing #${id}`);
  return node as T;
}

function fmt(seg: SegmentPair): string {
  return `[${seg[0]}, ${seg[1]}] (${segmentLength(seg)} frames)`;
}

async function openVideo(info: VideoInfo): Promise<void> {
  const [record, predictions] = await Promise.all([
    client.getAnnotations(info.video_id),
    info.has_predictions ? client.getPredictions(info.video_id) : Promise.resolve([]),
  ]);
  const restored = drafts.load(info.video_id) ?? undefined;
  session = new ReviewSession(info, record, predictions, client, restored);
  render();
}

function renderVideoList(videos: VideoInfo[]): void {
  const list = el<HTMLUListElement>('videos');
  list.replaceChildren();
  for (const info of videos) {
    const item = document.createElement('li');
    const link = document.createElement('a');
    link.href = '#';
    link.textContent = `${info.video_id} (${info.n_frames} frames, rev ${info.annotation_revision})`;
    link.onclick = ev => {
      ev.preventDefault();
      void openVideo(info);
    };
    item.appendChild(link);
    list.appendChild(item);
  }
}

function renderSegments(
  id: string,
  segments: SegmentPair[],
  action: string,
  onClick: (index: number) => void,
): void {
  const list = el<HTMLUListElement>(id);
  list.replaceChildren();
  segments.forEach((seg, index) => {
    const item = document.createElement('li');
    item.textContent = fmt(seg) + ' ';
    const button = document.createElement('button');
    button.textContent = action;
    button.onclick = () => {
      onClick(index);
      afterEdit();
    };
    item.appendChild(button);
    list.appendChild(item);
  });
}

function render(): void {
  const s = session;
  if (!s) return;
  el<HTMLImageElement>('frame').src = client.frameUrl(s.videoId, s.cursor);
  el('meta').textContent =
    `${s.videoId}: frame ${s.cursor} / ${s.info.n_frames - 1}, ` +
    `revision ${s.baseRevision}${s.dirty ? ', unsaved edits' : ''}` +
    (s.pendingStart !== null ? `, start marked at ${s.pendingStart}` : '');
  el('error').textContent = s.lastError ?? '';

  const banner = el('conflict');
  if (s.conflict) {
    banner.style.display = '';
    el('conflict-text').textContent =
      `Someone else saved revision ${s.conflict.revision} while you were editing. ` +
      `Reload their version, or merge your segments onto it and save again.`;
  } else {
    banner.style.display = 'none';
  }

  renderSegments('predictions', s.predictions, 'accept', i => s.acceptPrediction(i));
  renderSegments('draft', s.draft, 'delete', i => s.deleteSegment(i));
}

function afterEdit(): void {
  if (session) drafts.save(session.videoId, session.toDraftState());
  render();
}

async function saveNow(): Promise<void> {
  if (!session) return;
  const result = await session.save();
  if (result.kind === 'saved') {
    drafts.clear(session.videoId);
  } else if (result.kind === 'offline') {
    session.lastError = `save failed (${result.message}), draft kept; retry with Save`;
  }
  afterEdit();
}

function wire(): void {
  document.addEventListener('keydown', ev => {
    if (!session || ev.target instanceof HTMLInputElement) return;
    if (handleKey(session, ev)) {
      ev.preventDefault();
      afterEdit();
    }
  });
  el<HTMLButtonElement>('save').onclick = () => void saveNow();
  el<HTMLButtonElement>('conflict-reload').onclick = () => {
    session?.reloadFromServer();
    afterEdit();
  };
  el<HTMLButtonElement>('conflict-merge').onclick = () => {
    const dropped = session?.mergeWithServer() ?? [];
    if (session && dropped.length > 0) {
      session.lastError = `merged; dropped ${dropped.map(d => fmt(d)).join(', ')}`;
    }
    void saveNow();
  };
}

async function main(): Promise<void> {
  wire();
  const videos = await client.listVideos();
  renderVideoList(videos);
  const first = videos[0];
  if (first) await openVideo(first);
}

void main();
