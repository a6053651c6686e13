import type { AnnotationRecord, FieldError, SegmentPair, VideoInfo } from './types.js';

/** 4xx from the service, carrying the field-level detail when there is one. */
export class ApiError extends Error {
  constructor(
    readonly status: number,
    readonly field: string | undefined,
    message: string,
  ) {
    super(message);
    this.name = 'ApiError';
  }
}

export type PutOutcome =
  | { status: 200; record: AnnotationRecord }
  | { status: 409; current: AnnotationRecord };

type FetchLike = (input: string, init?: RequestInit) => Promise<Response>;

/**
 * Thin typed client for the annotation service. Anything other than the
 * documented statuses throws: ApiError for 4xx, the raw fetch error when
 * the request never completed.
 */
export class AnnotSvcClient {
  private readonly doFetch: FetchLike;

  constructor(
    private readonly baseUrl: string = '',
    fetchImpl?: FetchLike,
  ) {
    const impl = fetchImpl ?? (globalThis.fetch as FetchLike);
    this.doFetch = (input, init) => impl(input, init);
  }

  private url(path: string): string {
    return `${this.baseUrl}${path}`;
  }

  private async raise(res: Response): Promise<never> {
    let field: string | undefined;
    let message = `HTTP ${res.status}`;
    try {
      const body = (await res.json()) as { error?: FieldError & { message?: string } };
      if (body.error) {
        field = body.error.field;
        message = body.error.message ?? message;
      }
    } catch {
      // non-JSON error body, keep the status message
    }
    throw new ApiError(res.status, field, message);
  }

  async listVideos(): Promise<VideoInfo[]> {
    const res = await this.doFetch(this.url('/api/videos'));
    if (!res.ok) await this.raise(res);
    const doc = (await res.json()) as { videos: VideoInfo[] };
    return doc.videos;
  }

  /** URL of the lossless frame raster, for an <img> src. */
  frameUrl(videoId: string, frame: number): string {
    return this.url(`/api/videos/${videoId}/frame/${frame}`);
  }

  /** Pipeline predictions for one video; a video without any yields []. */
  async getPredictions(videoId: string): Promise<SegmentPair[]> {
    const res = await this.doFetch(this.url(`/api/videos/${videoId}/predictions`));
    if (res.status === 404) return [];
    if (!res.ok) await this.raise(res);
    const doc = (await res.json()) as { segments: SegmentPair[] };
    return doc.segments;
  }

  async getAnnotations(videoId: string): Promise<AnnotationRecord> {
    const res = await this.doFetch(this.url(`/api/videos/${videoId}/annotations`));
    if (!res.ok) await this.raise(res);
    return (await res.json()) as AnnotationRecord;
  }

  async putAnnotations(
    videoId: string,
    segments: SegmentPair[],
    revision: number,
  ): Promise<PutOutcome> {
    const res = await this.doFetch(this.url(`/api/videos/${videoId}/annotations`), {
      method: 'PUT',
      headers: { 'Content-Type': 'application/json' },
      body: JSON.stringify({ segments, revision }),
    });
    if (res.status === 200) {
      return { status: 200, record: (await res.json()) as AnnotationRecord };
    }
    if (res.status === 409) {
      return { status: 409, current: (await res.json()) as AnnotationRecord };
    }
    return this.raise(res);
  }
}
