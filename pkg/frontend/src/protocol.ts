/**
 * Wire protocol types and codecs (see docs/protocol.md in the repo root).
 * One JSON object per WebSocket text message, newline terminated.
 */

export type MethodName = "dwell" | "twist_binary" | "twist_directional" | "twist_continuous";

export const METHODS: MethodName[] = [
  "dwell",
  "twist_binary",
  "twist_directional",
  "twist_continuous",
];

export interface PoseMessage {
  type: "pose";
  t_ms: number;
  quat: [number, number, number, number];
}

export type ClientMessage =
  | PoseMessage
  | { type: "set_method"; method: MethodName }
  | ({ type: "set_config" } & Record<string, unknown>)
  | { type: "start_task" }
  | { type: "reset" };

export type ButtonColor = "red" | "gray" | "black";

export interface StateMessage {
  type: "state";
  t_ms: number;
  gaze_target: number | null;
  twist_deg: number;
  indicator_deg: number;
  indicator_visible: boolean;
  indicator_red: boolean;
  dwell_progress: number;
  dwell_indicator_visible: boolean;
  continuous_value: number;
  expected_button: number | null;
  buttons: Record<string, ButtonColor>;
}

export interface EventMessage {
  type: "event";
  t_ms: number;
  method: MethodName;
  kind: string;
  button: number;
  elapsed_ms?: number;
  value?: number;
  direction?: "left" | "right";
  point?: [number, number, number];
}

export interface TaskRecord {
  button: number;
  t_ms: number;
  elapsed_ms: number;
  counted: boolean;
}

export interface TaskResultMessage {
  type: "task_result";
  records: TaskRecord[];
  false_positives: number;
  mean_ms: number | null;
  sd_ms: number | null;
  completed: boolean;
}

export interface ErrorMessage {
  type: "error";
  code: string;
  detail: string;
}

export type ServerMessage = StateMessage | EventMessage | TaskResultMessage | ErrorMessage;

export interface SceneDescription {
  rows: number;
  cols: number;
  cell_width_m: number;
  cell_height_m: number;
  gap_m: number;
  distance_m: number;
  floor?: { height_m: number; extent_m: number };
}

export class ProtocolError extends Error {}

export function encodeClient(msg: ClientMessage): string {
  return JSON.stringify(msg) + "\n";
}

const SERVER_TYPES = new Set(["state", "event", "task_result", "error"]);

export function decodeServer(line: string): ServerMessage {
  let raw: unknown;
  try {
    raw = JSON.parse(line);
  } catch (e) {
    throw new ProtocolError(`malformed JSON: ${e}`);
  }
  if (typeof raw !== "object" || raw === null || Array.isArray(raw)) {
    throw new ProtocolError("server message must be a JSON object");
  }
  const msg = raw as Record<string, unknown>;
  if (typeof msg.type !== "string" || !SERVER_TYPES.has(msg.type)) {
    throw new ProtocolError(`unknown server message type ${String(msg.type)}`);
  }
  if (msg.type === "state") {
    for (const field of ["t_ms", "twist_deg", "indicator_deg", "dwell_progress"]) {
      if (typeof msg[field] !== "number") {
        throw new ProtocolError(`state message missing numeric ${field}`);
      }
    }
  }
  if (msg.type === "error" && typeof msg.code !== "string") {
    throw new ProtocolError("error message missing code");
  }
  return msg as unknown as ServerMessage;
}

export function poseMessage(tMs: number, quat: [number, number, number, number]): PoseMessage {
  return { type: "pose", t_ms: tMs, quat };
}
