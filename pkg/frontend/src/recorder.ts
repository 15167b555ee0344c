/**
 * Session recorder: keeps every pose the client sent and exports the
 * standard trace CSV (t_ms,qw,qx,qy,qz) so a live session can be
 * replayed offline with `twistsel replay`.
 */

import { PoseMessage } from "./protocol.js";

export const TRACE_HEADER = "t_ms,qw,qx,qy,qz";

export class SessionRecorder {
  private poses: PoseMessage[] = [];
  recording = true;

  record(msg: PoseMessage): void {
    if (this.recording) this.poses.push(msg);
  }

  clear(): void {
    this.poses = [];
  }

  get count(): number {
    return this.poses.length;
  }

  /** Full-precision CSV; numbers round-trip exactly through JSON/CSV. */
  toTraceCsv(): string {
    const lines = [TRACE_HEADER];
    for (const p of this.poses) {
      lines.push(`${p.t_ms},${p.quat[0]},${p.quat[1]},${p.quat[2]},${p.quat[3]}`);
    }
    return lines.join("\n") + "\n";
  }
}
