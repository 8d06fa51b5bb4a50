/**
 * Client replica: integrated state plus an overlay of locally emitted ops
 * the server has not echoed yet. The rendered document is always
 * integrated-plus-pending; an echo clears its pending entry, and after a
 * resync the surviving pending ops are re-emitted with fresh stamps (and
 * freshly derived entity ids, with references rewritten to match).
 */

import { Doc, applyOp, docFromSnapshot, emptyDoc } from "./model";
import { Op, opId, opStamp, stampKey } from "./protocol";

const ID_FIELDS = ["board", "note", "from_note", "to_note", "connection", "attachment", "ref"];

export class ClientReplica {
  readonly client: string;
  doc: Doc;
  applied = new Set<string>();
  pending = new Map<string, Op>();
  pendingOrder: string[] = [];
  lastSeq = 0;
  private clock = 0;

  constructor(client: string, projectId: string) {
    this.client = client;
    this.doc = emptyDoc(projectId);
  }

  tick(): { lamport: number; client: string } {
    this.clock += 1;
    return { lamport: this.clock, client: this.client };
  }

  private observe(lamport: number): void {
    if (lamport > this.clock) this.clock = lamport;
  }

  /** Apply one op from the sequenced stream; duplicates are no-ops. */
  integrate(op: Op, seq?: number): boolean {
    if (seq !== undefined && seq > this.lastSeq) this.lastSeq = seq;
    const id = opId(op);
    this.observe(op.lamport);
    if (this.pending.delete(id)) {
      this.pendingOrder = this.pendingOrder.filter((p) => p !== id);
    }
    if (this.applied.has(id)) return false;
    this.applied.add(id);
    applyOp(this.doc, op);
    return true;
  }

  /** Mint a stamp, apply locally (optimistic echo), queue for sending. */
  localOp(fields: { action: string; [key: string]: unknown }): Op {
    const stamp = this.tick();
    const op: Op = { ...fields, lamport: stamp.lamport, client: stamp.client };
    const id = opId(op);
    this.applied.add(id);
    applyOp(this.doc, op);
    this.pending.set(id, op);
    this.pendingOrder.push(id);
    return op;
  }

  /** Replace all state with a server snapshot; pending stays queued. */
  loadSnapshot(docJson: any, seq: number): void {
    this.doc = docFromSnapshot(docJson);
    this.applied = new Set();
    this.lastSeq = seq;
    // Local optimistic effects are gone until the pending ops are re-emitted.
  }

  /**
   * Rebuild pending ops with fresh stamps for re-emission after a resync.
   * Creates derive their entity ids from stamps, so the optimistic ids
   * change; later pending ops referencing them are rewritten.
   */
  reemitPending(): Op[] {
    const idMap = new Map<string, string>();
    const out: Op[] = [];
    const order = this.pendingOrder;
    const old = this.pending;
    this.pending = new Map();
    this.pendingOrder = [];
    for (const pendingId of order) {
      const original = old.get(pendingId);
      if (!original) continue;
      const stamp = this.tick();
      const op: Op = { ...original, lamport: stamp.lamport, client: stamp.client };
      const oldKey = stampKey(opStamp(original));
      const newKey = stampKey(stamp);
      if (op.action === "create_board") idMap.set(`b${oldKey}`, `b${newKey}`);
      if (op.action === "create_note") idMap.set(`n${oldKey}`, `n${newKey}`);
      if (op.action === "create_connection") idMap.set(`c${oldKey}`, `c${newKey}`);
      if (op.action === "add_attachment" || op.action === "add_nav_ref") {
        idMap.set(oldKey, newKey);
      }
      for (const field of ID_FIELDS) {
        const value = op[field];
        if (typeof value === "string" && idMap.has(value)) op[field] = idMap.get(value);
      }
      if (op.target && typeof op.target === "object") {
        const target = { ...(op.target as Record<string, unknown>) };
        for (const field of ["board_id", "note_id"]) {
          const value = target[field];
          if (typeof value === "string" && idMap.has(value)) target[field] = idMap.get(value);
        }
        op.target = target;
      }
      const id = opId(op);
      this.applied.add(id);
      applyOp(this.doc, op);
      this.pending.set(id, op);
      this.pendingOrder.push(id);
      out.push(op);
    }
    return out;
  }
}
