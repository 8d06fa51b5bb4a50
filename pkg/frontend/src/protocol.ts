/** Wire types and version-stamp helpers shared by the whole client. */

export interface Stamp {
  lamport: number;
  client: string;
}

export interface Op {
  lamport: number;
  client: string;
  action: string;
  [key: string]: unknown;
}

export type ServerMessage =
  | { t: "snapshot"; seq: number; doc: any }
  | { t: "op"; seq: number; op: Op }
  | { t: "presence"; clients: { client: string; locale: string }[] }
  | { t: "error"; code: string; detail: string };

export type ClientMessage =
  | { t: "hello"; project: string; client: string; last_seq: number; locale: string }
  | { t: "op"; op: Op }
  | { t: "resync"; from_seq: number };

/** Total order: lamport first, ties to the lexicographically larger client. */
export function cmpStamp(a: Stamp, b: Stamp): number {
  if (a.lamport !== b.lamport) return a.lamport - b.lamport;
  if (a.client === b.client) return 0;
  return a.client < b.client ? -1 : 1;
}

export function supersedes(incoming: Stamp, current: Stamp): boolean {
  return cmpStamp(incoming, current) > 0;
}

export function stampKey(s: Stamp): string {
  return `${s.lamport}.${s.client}`;
}

export function opStamp(op: Op): Stamp {
  return { lamport: op.lamport, client: op.client };
}

export function opId(op: Op): string {
  return stampKey(opStamp(op));
}

export const COLORS = ["yellow", "green", "blue", "pink", "orange", "gray"] as const;
export type Color = (typeof COLORS)[number];

export type NavTarget =
  | { kind: "note"; board_id: string; note_id: string }
  | { kind: "block_title"; board_id: string }
  | { kind: "external"; url: string };
