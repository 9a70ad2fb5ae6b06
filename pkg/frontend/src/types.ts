/** Wire types of the retrieval service (see docs/data_formats.md). */

export interface SceneAnnotations {
  motions: string[];
  contexts: [string, string][]; // [relation, class]
  simple: string[];
  sentences: string[];
}

export interface SceneMetadata {
  id: string;
  track_id: string;
  frame_refs: string[];
  annotations: SceneAnnotations | null;
}

export interface QueryResult {
  id: string;
  score: number;
  metadata: SceneMetadata | null;
}

export interface QueryResponse {
  results: QueryResult[];
  latency_ms: number;
}

export interface MaskPayload {
  rle: string; // base64 little-endian (u16 class_id, u32 run_len) pairs
  classes: Record<string, string>;
}

export interface SceneDetail extends SceneMetadata {
  image_dims: [number, number];
  ground_truth: unknown;
  masks?: {
    object: MaskPayload;
    ground: MaskPayload;
  };
}

export interface HealthInfo {
  status: "ok" | "degraded";
  index_size: number;
  model_version: string | null;
}
