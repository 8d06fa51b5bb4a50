/**
 * Client-side document state, mirroring the server's merge semantics so the
 * optimistic local view and the authoritative stream land on the same state:
 * per-field last-writer-wins under the stamp order, tombstoned deletes that
 * beat any concurrent edit, add/remove sets keyed by unique ids, and
 * clamping applied at observation time.
 */

import { NavTarget, Op, Stamp, cmpStamp, opStamp, stampKey, supersedes } from "./protocol";

export interface NoteRec {
  noteId: string;
  boardId: string | null;
  created: Stamp | null;
  values: Record<string, unknown>;
  stamps: Record<string, Stamp>;
  attachments: Map<string, { label: string; url: string }>;
  navRefs: Map<string, NavTarget>;
  removedAttachments: Set<string>;
  removedNavRefs: Set<string>;
}

export interface BoardRec {
  boardId: string;
  kind: string | null;
  created: Stamp | null;
  values: Record<string, unknown>;
  stamps: Record<string, Stamp>;
  technique: string | null;
}

export interface ConnRec {
  connectionId: string;
  boardId: string;
  fromNote: string;
  toNote: string;
  stamp: Stamp;
}

export interface ChatMsg {
  author: string;
  text: string;
  stamp: Stamp;
}

export interface Doc {
  projectId: string;
  defaultLocale: string;
  values: Record<string, unknown>;
  stamps: Record<string, Stamp>;
  boards: Map<string, BoardRec>;
  notes: Map<string, NoteRec>;
  connections: Map<string, Map<string, ConnRec>>; // pair key -> records
  chat: Map<string, ChatMsg>; // stamp key -> message
  noteTombstones: Set<string>;
  connTombstones: Set<string>;
}

export const DEFAULT_NOTE_SIZE: [number, number] = [0.12, 0.08];

export interface Region {
  regionId: string;
  labelKey: string;
  rect: [number, number, number, number];
}

function columns(kind: string, names: string[]): Region[] {
  const width = 1 / names.length;
  return names.map((name, i) => ({
    regionId: name,
    labelKey: `tpl.${kind}.${name}`,
    rect: [i * width, 0, width, 1],
  }));
}

export const LAYOUTS: Record<string, Region[]> = {
  free_wall: [{ regionId: "wall", labelKey: "tpl.free_wall.wall", rect: [0, 0, 1, 1] }],
  swot: [
    { regionId: "strengths", labelKey: "tpl.swot.strengths", rect: [0, 0, 0.5, 0.5] },
    { regionId: "weaknesses", labelKey: "tpl.swot.weaknesses", rect: [0.5, 0, 0.5, 0.5] },
    { regionId: "opportunities", labelKey: "tpl.swot.opportunities", rect: [0, 0.5, 0.5, 0.5] },
    { regionId: "threats", labelKey: "tpl.swot.threats", rect: [0.5, 0.5, 0.5, 0.5] },
  ],
  kanban: columns("kanban", ["todo", "doing", "done"]),
  scrum: columns("scrum", ["backlog", "sprint", "in_progress", "review", "done"]),
  design_thinking: columns("design_thinking", [
    "empathize",
    "define",
    "ideate",
    "prototype",
    "test",
  ]),
};

export const TEMPLATE_KINDS = Object.keys(LAYOUTS);

export const STAGES = [
  "preparation",
  "idea_generation",
  "idea_evaluation",
  "planning",
  "prototyping",
  "marketing_reflection",
];

export function recommendedTemplates(stage: string): string[] {
  if (stage === "idea_generation") return ["free_wall", "design_thinking"];
  if (stage === "idea_evaluation") return ["swot"];
  if (stage === "planning") return ["kanban", "scrum"];
  return ["free_wall"];
}

/** One forward step, staying put, or any backtrack. */
export function stageChangeAllowed(current: string, target: string): boolean {
  return STAGES.indexOf(target) - STAGES.indexOf(current) <= 1;
}

export function emptyDoc(projectId: string): Doc {
  return {
    projectId,
    defaultLocale: "en",
    values: { stage: "preparation", title: "" },
    stamps: {
      stage: { lamport: 0, client: "" },
      title: { lamport: 0, client: "" },
    },
    boards: new Map(),
    notes: new Map(),
    connections: new Map(),
    chat: new Map(),
    noteTombstones: new Set(),
    connTombstones: new Set(),
  };
}

// ---------------------------------------------------------------------------
// geometry

export function clampSize(size: [number, number]): [number, number] {
  return [
    Math.min(Math.max(size[0], 1e-9), 1),
    Math.min(Math.max(size[1], 1e-9), 1),
  ];
}

export function clampPosition(
  position: [number, number],
  size: [number, number],
): [number, number] {
  const [w, h] = clampSize(size);
  return [
    Math.min(Math.max(position[0], 0), 1 - w),
    Math.min(Math.max(position[1], 0), 1 - h),
  ];
}

export function noteSize(note: NoteRec): [number, number] {
  const raw = (note.values.size as [number, number] | undefined) ?? DEFAULT_NOTE_SIZE;
  return clampSize(raw);
}

export function notePosition(note: NoteRec): [number, number] {
  const raw = (note.values.position as [number, number] | undefined) ?? [0, 0];
  return clampPosition(raw, noteSize(note));
}

/** Region under the note's center; boundary ties go to the earlier region. */
export function regionOf(kind: string, position: [number, number], size: [number, number]): string {
  const [w, h] = clampSize(size);
  const cx = Math.min(Math.max(position[0] + w / 2, 0), 1);
  const cy = Math.min(Math.max(position[1] + h / 2, 0), 1);
  const regions = LAYOUTS[kind] ?? LAYOUTS.free_wall;
  for (const region of regions) {
    const [rx, ry, rw, rh] = region.rect;
    if (rx <= cx && cx <= rx + rw && ry <= cy && cy <= ry + rh) return region.regionId;
  }
  return regions[regions.length - 1].regionId;
}

export function transitional(kind: string, position: [number, number], size: [number, number]): boolean {
  const [w, h] = clampSize(size);
  const [x, y] = clampPosition(position, [w, h]);
  let touched = 0;
  for (const region of LAYOUTS[kind] ?? []) {
    const [rx, ry, rw, rh] = region.rect;
    const ow = Math.min(x + w, rx + rw) - Math.max(x, rx);
    const oh = Math.min(y + h, ry + rh) - Math.max(y, ry);
    if (ow > 1e-12 && oh > 1e-12 && ++touched > 1) return true;
  }
  return false;
}

// ---------------------------------------------------------------------------
// observable views

export function boardOrder(doc: Doc): BoardRec[] {
  return [...doc.boards.values()]
    .filter((b) => b.created !== null)
    .sort((a, b) => cmpStamp(a.created!, b.created!));
}

export function noteAlive(doc: Doc, noteId: string): boolean {
  const rec = doc.notes.get(noteId);
  if (!rec || rec.created === null || rec.boardId === null) return false;
  const board = doc.boards.get(rec.boardId);
  return !!board && board.created !== null;
}

export function visibleNotes(doc: Doc, boardId: string): NoteRec[] {
  return [...doc.notes.values()]
    .filter((n) => n.created !== null && n.boardId === boardId)
    .sort((a, b) => (a.noteId < b.noteId ? -1 : 1));
}

export function visibleConnections(doc: Doc, boardId: string): ConnRec[] {
  const out: ConnRec[] = [];
  for (const records of doc.connections.values()) {
    let winner: ConnRec | null = null;
    for (const rec of records.values()) {
      if (!winner || cmpStamp(rec.stamp, winner.stamp) > 0) winner = rec;
    }
    if (
      winner &&
      winner.boardId === boardId &&
      noteAlive(doc, winner.fromNote) &&
      noteAlive(doc, winner.toNote)
    ) {
      out.push(winner);
    }
  }
  return out.sort((a, b) => (a.connectionId < b.connectionId ? -1 : 1));
}

export function chatMessages(doc: Doc): ChatMsg[] {
  return [...doc.chat.values()].sort((a, b) => cmpStamp(a.stamp, b.stamp));
}

// ---------------------------------------------------------------------------
// transition function

function lww(values: Record<string, unknown>, stamps: Record<string, Stamp>, name: string, value: unknown, stamp: Stamp): void {
  const current = stamps[name];
  if (!current || supersedes(stamp, current)) {
    values[name] = value;
    stamps[name] = stamp;
  }
}

function boardRec(doc: Doc, boardId: string): BoardRec {
  let rec = doc.boards.get(boardId);
  if (!rec) {
    rec = { boardId, kind: null, created: null, values: {}, stamps: {}, technique: null };
    doc.boards.set(boardId, rec);
  }
  return rec;
}

function noteRec(doc: Doc, noteId: string): NoteRec | null {
  if (doc.noteTombstones.has(noteId)) return null;
  let rec = doc.notes.get(noteId);
  if (!rec) {
    rec = {
      noteId,
      boardId: null,
      created: null,
      values: {},
      stamps: {},
      attachments: new Map(),
      navRefs: new Map(),
      removedAttachments: new Set(),
      removedNavRefs: new Set(),
    };
    doc.notes.set(noteId, rec);
  }
  return rec;
}

function pairKey(a: string, b: string): string {
  return a < b ? `${a}|${b}` : `${b}|${a}`;
}

export function applyOp(doc: Doc, op: Op): void {
  const stamp = opStamp(op);
  const id = stampKey(stamp);
  switch (op.action) {
    case "create_board": {
      const rec = boardRec(doc, `b${id}`);
      if (rec.created !== null) return;
      rec.created = stamp;
      rec.kind = op.kind as string;
      rec.technique = (op.technique as string | undefined) ?? null;
      lww(rec.values, rec.stamps, "title", op.title, stamp);
      lww(rec.values, rec.stamps, "perspective", op.perspective ?? "overview", stamp);
      return;
    }
    case "rename_board": {
      const rec = boardRec(doc, op.board as string);
      lww(rec.values, rec.stamps, "title", op.title, stamp);
      return;
    }
    case "set_perspective": {
      const rec = boardRec(doc, op.board as string);
      lww(rec.values, rec.stamps, "perspective", op.perspective, stamp);
      return;
    }
    case "create_note": {
      const noteId = `n${id}`;
      const rec = noteRec(doc, noteId);
      if (!rec || rec.created !== null) return;
      rec.created = stamp;
      rec.boardId = op.board as string;
      lww(rec.values, rec.stamps, "position", op.position, stamp);
      lww(rec.values, rec.stamps, "size", op.size ?? DEFAULT_NOTE_SIZE, stamp);
      lww(rec.values, rec.stamps, "text", op.text, stamp);
      lww(rec.values, rec.stamps, "color", "yellow", stamp);
      lww(rec.values, rec.stamps, "highlighted", false, stamp);
      return;
    }
    case "edit_note_text":
    case "move_note":
    case "resize_note":
    case "set_note_color":
    case "set_highlight": {
      const rec = noteRec(doc, op.note as string);
      if (!rec) return;
      const field = {
        edit_note_text: "text",
        move_note: "position",
        resize_note: "size",
        set_note_color: "color",
        set_highlight: "highlighted",
      }[op.action]!;
      const value = {
        edit_note_text: op.text,
        move_note: op.position,
        resize_note: op.size,
        set_note_color: op.color,
        set_highlight: op.highlighted,
      }[op.action];
      lww(rec.values, rec.stamps, field, value, stamp);
      return;
    }
    case "delete_note": {
      const noteId = op.note as string;
      if (doc.noteTombstones.has(noteId)) return;
      doc.noteTombstones.add(noteId);
      doc.notes.delete(noteId);
      for (const [key, records] of [...doc.connections]) {
        for (const rec of records.values()) {
          if (rec.fromNote === noteId || rec.toNote === noteId) {
            doc.connections.delete(key);
            break;
          }
        }
      }
      return;
    }
    case "create_connection": {
      const connectionId = `c${id}`;
      if (doc.connTombstones.has(connectionId)) return;
      const a = op.from_note as string;
      const b = op.to_note as string;
      if (doc.noteTombstones.has(a) || doc.noteTombstones.has(b)) return;
      const key = pairKey(a, b);
      let records = doc.connections.get(key);
      if (!records) {
        records = new Map();
        doc.connections.set(key, records);
      }
      if (records.has(connectionId)) return;
      records.set(connectionId, {
        connectionId,
        boardId: op.board as string,
        fromNote: a,
        toNote: b,
        stamp,
      });
      return;
    }
    case "delete_connection": {
      const connectionId = op.connection as string;
      if (doc.connTombstones.has(connectionId)) return;
      doc.connTombstones.add(connectionId);
      for (const [key, records] of doc.connections) {
        if (records.delete(connectionId)) {
          if (records.size === 0) doc.connections.delete(key);
          break;
        }
      }
      return;
    }
    case "add_attachment": {
      const rec = noteRec(doc, op.note as string);
      if (!rec || rec.removedAttachments.has(id) || rec.attachments.has(id)) return;
      rec.attachments.set(id, { label: op.label as string, url: op.url as string });
      return;
    }
    case "remove_attachment": {
      const rec = noteRec(doc, op.note as string);
      if (!rec) return;
      rec.removedAttachments.add(op.attachment as string);
      rec.attachments.delete(op.attachment as string);
      return;
    }
    case "add_nav_ref": {
      const rec = noteRec(doc, op.note as string);
      if (!rec || rec.removedNavRefs.has(id) || rec.navRefs.has(id)) return;
      rec.navRefs.set(id, op.target as NavTarget);
      return;
    }
    case "remove_nav_ref": {
      const rec = noteRec(doc, op.note as string);
      if (!rec) return;
      rec.removedNavRefs.add(op.ref as string);
      rec.navRefs.delete(op.ref as string);
      return;
    }
    case "post_chat": {
      if (doc.chat.has(id)) return;
      doc.chat.set(id, { author: op.client, text: op.text as string, stamp });
      return;
    }
    case "set_stage": {
      lww(doc.values, doc.stamps, "stage", op.stage, stamp);
      return;
    }
    case "set_project_title": {
      lww(doc.values, doc.stamps, "title", op.title, stamp);
      return;
    }
    default:
      return; // unknown ops degrade to no-ops, same as the server
  }
}

// ---------------------------------------------------------------------------
// snapshot loading (canonical project JSON from the wire)

export function docFromSnapshot(data: any): Doc {
  const doc = emptyDoc(data.project_id);
  doc.defaultLocale = data.default_locale ?? "en";
  doc.values = { stage: data.stage, title: data.title };
  doc.stamps = { ...data.field_stamps };
  doc.noteTombstones = new Set(data.tombstones?.notes ?? []);
  doc.connTombstones = new Set(data.tombstones?.connections ?? []);
  for (const boardData of data.boards ?? []) {
    const board: BoardRec = {
      boardId: boardData.board_id,
      kind: boardData.kind,
      created: boardData.created,
      values: { title: boardData.title, perspective: boardData.perspective },
      stamps: { ...boardData.field_stamps },
      technique: boardData.technique ?? null,
    };
    doc.boards.set(board.boardId, board);
    for (const noteData of boardData.notes ?? []) {
      const note: NoteRec = {
        noteId: noteData.note_id,
        boardId: board.boardId,
        created: noteData.created,
        values: {
          position: noteData.position,
          size: noteData.size,
          text: noteData.text,
          color: noteData.color,
          highlighted: noteData.highlighted,
        },
        stamps: { ...noteData.field_stamps },
        attachments: new Map(
          (noteData.attachments ?? []).map((a: any) => [a.id, { label: a.label, url: a.url }]),
        ),
        navRefs: new Map((noteData.nav_refs ?? []).map((r: any) => [r.id, r.target])),
        removedAttachments: new Set(noteData.removed?.attachments ?? []),
        removedNavRefs: new Set(noteData.removed?.nav_refs ?? []),
      };
      doc.notes.set(note.noteId, note);
    }
    for (const connData of boardData.connections ?? []) {
      const key = pairKey(connData.from_note, connData.to_note);
      let records = doc.connections.get(key);
      if (!records) {
        records = new Map();
        doc.connections.set(key, records);
      }
      records.set(connData.connection_id, {
        connectionId: connData.connection_id,
        boardId: board.boardId,
        fromNote: connData.from_note,
        toNote: connData.to_note,
        stamp: connData.stamp,
      });
    }
  }
  for (const chatData of data.chat ?? []) {
    doc.chat.set(stampKey(chatData.stamp), {
      author: chatData.author,
      text: chatData.text,
      stamp: chatData.stamp,
    });
  }
  return doc;
}

/** Deterministic projection for equality checks across replicas. */
export function observableState(doc: Doc): unknown {
  return {
    boards: boardOrder(doc).map((board) => ({
      boardId: board.boardId,
      kind: board.kind,
      perspective: board.values.perspective,
      technique: board.technique,
      title: board.values.title,
      notes: visibleNotes(doc, board.boardId).map((note) => ({
        noteId: note.noteId,
        attachments: [...note.attachments.entries()].sort(),
        color: note.values.color,
        highlighted: note.values.highlighted,
        navRefs: [...note.navRefs.entries()].sort(),
        position: notePosition(note),
        size: noteSize(note),
        text: note.values.text,
      })),
      connections: visibleConnections(doc, board.boardId).map((c) => ({
        connectionId: c.connectionId,
        fromNote: c.fromNote,
        toNote: c.toNote,
      })),
    })),
    chat: chatMessages(doc).map((m) => ({ author: m.author, text: m.text })),
    stage: doc.values.stage,
    title: doc.values.title,
  };
}
