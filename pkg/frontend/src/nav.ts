/** Jump-point directory and link resolution over the client document. */

import { Doc, boardOrder, noteAlive, visibleNotes } from "./model";
import { NavTarget } from "./protocol";

export const PREVIEW_CHARS = 40;

export type JumpPoint =
  | { type: "board_title"; boardId: string; title: string }
  | { type: "note"; boardId: string; noteId: string; preview: string };

export type Resolved =
  | { type: "location"; boardId: string; noteId?: string }
  | { type: "dangling" }
  | { type: "external"; url: string };

function referencedNoteIds(doc: Doc): Set<string> {
  const refs = new Set<string>();
  for (const note of doc.notes.values()) {
    if (note.created === null) continue;
    for (const target of note.navRefs.values()) {
      if (target.kind === "note") refs.add(target.note_id);
    }
  }
  return refs;
}

export function jumpPoints(doc: Doc): JumpPoint[] {
  const referenced = referencedNoteIds(doc);
  const points: JumpPoint[] = [];
  for (const board of boardOrder(doc)) {
    points.push({
      type: "board_title",
      boardId: board.boardId,
      title: String(board.values.title ?? ""),
    });
    for (const note of visibleNotes(doc, board.boardId)) {
      if (referenced.has(note.noteId)) {
        points.push({
          type: "note",
          boardId: board.boardId,
          noteId: note.noteId,
          preview: String(note.values.text ?? "").slice(0, PREVIEW_CHARS),
        });
      }
    }
  }
  return points;
}

export function resolve(doc: Doc, target: NavTarget): Resolved {
  if (target.kind === "external") return { type: "external", url: target.url };
  if (target.kind === "block_title") {
    const board = doc.boards.get(target.board_id);
    return board && board.created !== null
      ? { type: "location", boardId: target.board_id }
      : { type: "dangling" };
  }
  if (target.kind === "note") {
    if (!noteAlive(doc, target.note_id)) return { type: "dangling" };
    const note = doc.notes.get(target.note_id)!;
    return { type: "location", boardId: note.boardId!, noteId: target.note_id };
  }
  return { type: "dangling" };
}
