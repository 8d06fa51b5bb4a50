/**
 * DOM rendering: region backgrounds from the template layout, notes as
 * positioned cards, connections as SVG lines between note centers. The
 * renderer never mutates the document; every user gesture funnels into the
 * `actions` callbacks, which emit ops.
 */

import { Labels } from "./i18n";
import {
  Doc,
  LAYOUTS,
  clampPosition,
  noteSize,
  notePosition,
  transitional,
  visibleConnections,
  visibleNotes,
} from "./model";

export interface BoardActions {
  moveNote(noteId: string, position: [number, number]): void;
  editText(noteId: string, text: string): void;
  cycleColor(noteId: string): void;
  toggleHighlight(noteId: string): void;
  deleteNote(noteId: string): void;
  createNote(position: [number, number]): void;
  connectFrom(noteId: string): void;
}

export interface RenderState {
  focusNoteId?: string;
  connectArmedFrom?: string;
}

const SVG_NS = "http://www.w3.org/2000/svg";

export function renderBoard(
  container: HTMLElement,
  doc: Doc,
  boardId: string,
  labels: Labels,
  actions: BoardActions,
  state: RenderState,
): void {
  const board = doc.boards.get(boardId);
  container.textContent = "";
  if (!board || board.created === null || !board.kind) return;
  const detail = board.values.perspective === "detail";
  container.classList.toggle("detail", detail);

  for (const region of LAYOUTS[board.kind] ?? []) {
    const [x, y, w, h] = region.rect;
    const div = document.createElement("div");
    div.className = "region";
    div.style.left = `${x * 100}%`;
    div.style.top = `${y * 100}%`;
    div.style.width = `${w * 100}%`;
    div.style.height = `${h * 100}%`;
    const label = document.createElement("span");
    label.className = "region-label";
    label.textContent = labels.t(region.labelKey);
    div.appendChild(label);
    container.appendChild(div);
  }

  const lines = document.createElementNS(SVG_NS, "svg");
  lines.setAttribute("class", "connections");
  lines.setAttribute("viewBox", "0 0 100 100");
  lines.setAttribute("preserveAspectRatio", "none");
  for (const conn of visibleConnections(doc, boardId)) {
    const from = doc.notes.get(conn.fromNote)!;
    const to = doc.notes.get(conn.toNote)!;
    const [fx, fy] = center(from);
    const [tx, ty] = center(to);
    const line = document.createElementNS(SVG_NS, "line");
    line.setAttribute("x1", String(fx * 100));
    line.setAttribute("y1", String(fy * 100));
    line.setAttribute("x2", String(tx * 100));
    line.setAttribute("y2", String(ty * 100));
    lines.appendChild(line);
  }
  container.appendChild(lines);

  for (const note of visibleNotes(doc, boardId)) {
    const [x, y] = notePosition(note);
    let [w, h] = noteSize(note);
    if (detail) {
      w /= 2; // detail perspective renders notes at half size
      h /= 2;
    }
    const card = document.createElement("div");
    card.className = `note color-${note.values.color}`;
    card.dataset.noteId = note.noteId;
    if (note.values.highlighted) card.classList.add("highlighted");
    if (note.noteId === state.focusNoteId) card.classList.add("focused");
    if (board.kind === "kanban" && transitional(board.kind, notePosition(note), noteSize(note))) {
      card.classList.add("transitional");
    }
    card.style.left = `${x * 100}%`;
    card.style.top = `${y * 100}%`;
    card.style.width = `${w * 100}%`;
    card.style.height = `${h * 100}%`;

    const text = document.createElement("div");
    text.className = "note-text";
    text.textContent = String(note.values.text ?? "");
    card.appendChild(text);

    const meta = document.createElement("div");
    meta.className = "note-meta";
    for (const [, attachment] of [...note.attachments.entries()].sort()) {
      const link = document.createElement("a");
      link.href = attachment.url;
      link.target = "_blank";
      link.textContent = "@" + attachment.label;
      meta.appendChild(link);
    }
    card.appendChild(meta);

    const tools = document.createElement("div");
    tools.className = "note-tools";
    tools.appendChild(tool("#", labels.t("ui.note.color"), () => actions.cycleColor(note.noteId)));
    tools.appendChild(
      tool("!", labels.t("ui.note.highlight"), () => actions.toggleHighlight(note.noteId)),
    );
    tools.appendChild(
      tool("~", labels.t("ui.connect.start"), () => actions.connectFrom(note.noteId)),
    );
    tools.appendChild(tool("x", labels.t("ui.note.delete"), () => actions.deleteNote(note.noteId)));
    card.appendChild(tools);

    card.addEventListener("dblclick", () => {
      const updated = prompt(labels.t("ui.note.add"), String(note.values.text ?? ""));
      if (updated !== null) actions.editText(note.noteId, updated);
    });
    wireDrag(card, container, note.noteId, detail ? [w, h] : noteSize(note), actions);
    container.appendChild(card);
  }

  container.ondblclick = (event) => {
    if (event.target !== container && !(event.target as HTMLElement).classList.contains("region")) {
      return;
    }
    const rect = container.getBoundingClientRect();
    actions.createNote([
      (event.clientX - rect.left) / rect.width,
      (event.clientY - rect.top) / rect.height,
    ]);
  };
}

function center(note: { values: Record<string, unknown> }): [number, number] {
  const [x, y] = notePosition(note as any);
  const [w, h] = noteSize(note as any);
  return [x + w / 2, y + h / 2];
}

function tool(glyph: string, title: string, onClick: () => void): HTMLButtonElement {
  const button = document.createElement("button");
  button.type = "button";
  button.textContent = glyph;
  button.title = title;
  button.addEventListener("click", (event) => {
    event.stopPropagation();
    onClick();
  });
  return button;
}

/** Drag with a live transform; one move op per gesture, emitted at drop. */
function wireDrag(
  card: HTMLElement,
  container: HTMLElement,
  noteId: string,
  size: [number, number],
  actions: BoardActions,
): void {
  card.addEventListener("pointerdown", (down) => {
    if ((down.target as HTMLElement).tagName === "BUTTON") return;
    down.preventDefault();
    card.setPointerCapture(down.pointerId);
    const rect = container.getBoundingClientRect();
    const startLeft = card.offsetLeft;
    const startTop = card.offsetTop;
    let moved = false;

    const onMove = (move: PointerEvent) => {
      moved = true;
      card.style.transform = `translate(${move.clientX - down.clientX}px, ${
        move.clientY - down.clientY
      }px)`;
    };
    const onUp = (up: PointerEvent) => {
      card.removeEventListener("pointermove", onMove);
      card.removeEventListener("pointerup", onUp);
      card.style.transform = "";
      if (!moved) return;
      const x = (startLeft + up.clientX - down.clientX) / rect.width;
      const y = (startTop + up.clientY - down.clientY) / rect.height;
      actions.moveNote(noteId, clampPosition([x, y], size));
    };
    card.addEventListener("pointermove", onMove);
    card.addEventListener("pointerup", onUp);
  });
}
