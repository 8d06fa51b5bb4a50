/** Application wiring: one project socket, one replica, DOM panels. */

import { Labels } from "./i18n";
import {
  COLORS,
  Op,
  ServerMessage,
} from "./protocol";
import {
  STAGES,
  TEMPLATE_KINDS,
  boardOrder,
  chatMessages,
  clampPosition,
  recommendedTemplates,
  stageChangeAllowed,
} from "./model";
import { SyncChannel } from "./net";
import { jumpPoints, resolve } from "./nav";
import { ClientReplica } from "./replica";
import { BoardActions, RenderState, renderBoard } from "./render";

function quantize(x: number): number {
  return parseFloat(x.toPrecision(9));
}

function el<K extends keyof HTMLElementTagNameMap>(
  tag: K,
  className?: string,
  text?: string,
): HTMLElementTagNameMap[K] {
  const node = document.createElement(tag);
  if (className) node.className = className;
  if (text !== undefined) node.textContent = text;
  return node;
}

class App {
  readonly project: string;
  readonly me: string;
  labels = new Labels();
  replica: ClientReplica;
  channel!: SyncChannel;
  presence: { client: string; locale: string }[] = [];
  activeBoard: string | null = null;
  renderState: RenderState = {};
  status = "connecting";

  root = document.getElementById("app")!;

  constructor() {
    this.project = decodeURIComponent(location.pathname.split("/p/")[1] ?? "");
    const saved = sessionStorage.getItem("innoboard.client");
    this.me = saved ?? `u-${Math.random().toString(36).slice(2, 8)}`;
    sessionStorage.setItem("innoboard.client", this.me);
    this.replica = new ClientReplica(this.me, this.project);
  }

  async start(): Promise<void> {
    const locale = localStorage.getItem("innoboard.locale") ?? navigator.language.split("-")[0];
    await this.labels.load(locale).catch(() => this.labels.use({}, "en"));
    const wsUrl = `${location.protocol === "https:" ? "wss" : "ws"}://${location.host}/ws`;
    this.channel = new SyncChannel({
      url: wsUrl,
      project: this.project,
      client: this.me,
      locale: this.labels.locale,
      // Un-acked local ops force a full snapshot so the authoritative
      // state replaces the optimistic view before they are re-emitted.
      lastSeq: () => (this.replica.pending.size > 0 ? 0 : this.replica.lastSeq),
      onMessage: (message) => this.onMessage(message),
      onConnected: () => {},
      onStatus: (status) => {
        this.status = status;
        this.render();
      },
    });
    this.channel.start();
    this.render();
  }

  onMessage(message: ServerMessage): void {
    if (message.t === "snapshot") {
      this.replica.loadSnapshot(message.doc, message.seq);
      for (const op of this.replica.reemitPending()) this.channel.send({ t: "op", op });
    } else if (message.t === "op") {
      this.replica.integrate(message.op, message.seq);
    } else if (message.t === "presence") {
      this.presence = message.clients;
    } else if (message.t === "error") {
      this.toast(this.labels.t(`ui.error.${message.code}`) + ` (${message.detail})`);
    }
    this.render();
  }

  /** The only write path: stamp locally, apply optimistically, send. */
  emit(fields: { action: string; [key: string]: unknown }): void {
    const op = this.replica.localOp(fields);
    this.channel.send({ t: "op", op });
    this.render();
  }

  toast(text: string): void {
    const node = el("div", "toast", text);
    this.root.appendChild(node);
    setTimeout(() => node.remove(), 4000);
  }

  private actionsFor(boardId: string): BoardActions {
    return {
      moveNote: (noteId, position) =>
        this.emit({
          action: "move_note",
          note: noteId,
          position: [quantize(position[0]), quantize(position[1])],
        }),
      editText: (noteId, text) => this.emit({ action: "edit_note_text", note: noteId, text }),
      cycleColor: (noteId) => {
        const current = String(this.replica.doc.notes.get(noteId)?.values.color ?? "yellow");
        const next = COLORS[(COLORS.indexOf(current as never) + 1) % COLORS.length];
        this.emit({ action: "set_note_color", note: noteId, color: next });
      },
      toggleHighlight: (noteId) => {
        const current = !!this.replica.doc.notes.get(noteId)?.values.highlighted;
        this.emit({ action: "set_highlight", note: noteId, highlighted: !current });
      },
      deleteNote: (noteId) => this.emit({ action: "delete_note", note: noteId }),
      createNote: (position) => {
        const board = this.replica.doc.boards.get(boardId);
        const detail = board?.values.perspective === "detail";
        const size: [number, number] = detail ? [0.06, 0.04] : [0.12, 0.08];
        const clamped = clampPosition(position, size);
        const fields: { action: string; [key: string]: unknown } = {
          action: "create_note",
          board: boardId,
          position: [quantize(clamped[0]), quantize(clamped[1])],
          text: "",
        };
        if (detail) fields.size = size;
        this.emit(fields);
      },
      connectFrom: (noteId) => {
        if (!this.renderState.connectArmedFrom) {
          this.renderState.connectArmedFrom = noteId;
          this.toast(this.labels.t("ui.connect.start"));
        } else if (this.renderState.connectArmedFrom !== noteId) {
          this.emit({
            action: "create_connection",
            board: boardId,
            from_note: this.renderState.connectArmedFrom,
            to_note: noteId,
          });
          this.renderState.connectArmedFrom = undefined;
        } else {
          this.renderState.connectArmedFrom = undefined;
        }
        this.render();
      },
    };
  }

  render(): void {
    const doc = this.replica.doc;
    const boards = boardOrder(doc);
    if (!this.activeBoard || !doc.boards.get(this.activeBoard)) {
      this.activeBoard = boards[0]?.boardId ?? null;
    }
    this.root.querySelectorAll(":scope > :not(.toast)").forEach((n) => n.remove());

    const header = el("header");
    header.appendChild(el("h1", "title", String(doc.values.title ?? "") || this.project));
    header.appendChild(this.stagePicker(String(doc.values.stage ?? "preparation")));
    header.appendChild(this.templatePicker(String(doc.values.stage ?? "preparation")));
    header.appendChild(this.localePicker());
    header.appendChild(
      el(
        "span",
        `status ${this.status}`,
        this.status === "online" ? "" : this.labels.t("ui.reconnect.waiting"),
      ),
    );
    this.root.appendChild(header);

    const layout = el("div", "layout");
    layout.appendChild(this.sidebar());
    const center = el("main");
    center.appendChild(this.boardTabs(boards.map((b) => b.boardId)));
    const boardArea = el("div", "board");
    if (this.activeBoard) {
      renderBoard(
        boardArea,
        doc,
        this.activeBoard,
        this.labels,
        this.actionsFor(this.activeBoard),
        this.renderState,
      );
    }
    center.appendChild(boardArea);
    layout.appendChild(center);
    layout.appendChild(this.rightPanel());
    this.root.appendChild(layout);
  }

  private boardTabs(boardIds: string[]): HTMLElement {
    const doc = this.replica.doc;
    const tabs = el("nav", "tabs");
    for (const boardId of boardIds) {
      const board = doc.boards.get(boardId)!;
      const tab = el("button", boardId === this.activeBoard ? "tab active" : "tab");
      tab.textContent = String(board.values.title ?? boardId);
      tab.addEventListener("click", () => {
        this.activeBoard = boardId;
        this.render();
      });
      tabs.appendChild(tab);
    }
    return tabs;
  }

  private stagePicker(current: string): HTMLElement {
    const wrap = el("label", "stage");
    wrap.appendChild(el("span", "", this.labels.t("ui.stage.label")));
    const select = el("select");
    for (const stage of STAGES) {
      const option = el("option", "", this.labels.t(`stage.${stage}`));
      option.value = stage;
      option.selected = stage === current;
      select.appendChild(option);
    }
    select.addEventListener("change", () => {
      if (stageChangeAllowed(current, select.value)) {
        this.emit({ action: "set_stage", stage: select.value });
      } else {
        this.toast(this.labels.t("ui.error.bad_op"));
        select.value = current;
      }
    });
    wrap.appendChild(select);
    return wrap;
  }

  private templatePicker(stage: string): HTMLElement {
    const wrap = el("span", "templates");
    const select = el("select");
    const recommended = recommendedTemplates(stage);
    for (const kind of [...recommended, ...TEMPLATE_KINDS.filter((k) => !recommended.includes(k))]) {
      const option = el("option", "", this.labels.t(`tpl.${kind}.name`));
      option.value = kind;
      select.appendChild(option);
    }
    const add = el("button", "", this.labels.t("ui.board.add"));
    add.addEventListener("click", () => {
      const title = prompt(this.labels.t("ui.board.add"), "");
      if (title === null) return;
      this.emit({
        action: "create_board",
        kind: select.value,
        title,
        perspective: "overview",
      });
    });
    wrap.appendChild(select);
    wrap.appendChild(add);
    return wrap;
  }

  private localePicker(): HTMLElement {
    const wrap = el("label", "locale");
    wrap.appendChild(el("span", "", this.labels.t("ui.locale.label")));
    const select = el("select");
    for (const tag of ["en", "de", "fi"]) {
      const option = el("option", "", tag);
      option.value = tag;
      option.selected = tag === this.labels.locale;
      select.appendChild(option);
    }
    select.addEventListener("change", async () => {
      localStorage.setItem("innoboard.locale", select.value);
      await this.labels.load(select.value);
      this.render(); // labels only; the document is untouched
    });
    wrap.appendChild(select);
    return wrap;
  }

  private sidebar(): HTMLElement {
    const doc = this.replica.doc;
    const aside = el("aside", "nav");
    aside.appendChild(el("h2", "", this.labels.t("ui.nav.title")));
    const list = el("ul");
    for (const point of jumpPoints(doc)) {
      const item = el("li", point.type === "board_title" ? "nav-board" : "nav-note");
      const target =
        point.type === "board_title"
          ? { kind: "block_title" as const, board_id: point.boardId }
          : { kind: "note" as const, board_id: point.boardId, note_id: point.noteId };
      const resolved = resolve(doc, target);
      const button = el(
        "button",
        "",
        point.type === "board_title" ? point.title : point.preview,
      );
      if (resolved.type === "dangling") {
        button.disabled = true;
        button.title = this.labels.t("ui.nav.dangling");
      } else if (resolved.type === "location") {
        button.addEventListener("click", () => {
          this.activeBoard = resolved.boardId;
          this.renderState.focusNoteId = resolved.noteId;
          this.render();
        });
      }
      item.appendChild(button);
      list.appendChild(item);
    }
    aside.appendChild(list);
    return aside;
  }

  private rightPanel(): HTMLElement {
    const doc = this.replica.doc;
    const aside = el("aside", "panel");
    aside.appendChild(el("h2", "", this.labels.t("ui.presence.title")));
    const who = el("ul", "presence");
    for (const entry of this.presence) {
      who.appendChild(el("li", "", `${entry.client} (${entry.locale})`));
    }
    aside.appendChild(who);

    aside.appendChild(el("h2", "", this.labels.t("ui.chat.title")));
    const log = el("ul", "chat");
    for (const message of chatMessages(doc)) {
      const item = el("li");
      item.appendChild(el("b", "", message.author + ": "));
      item.appendChild(document.createTextNode(message.text));
      log.appendChild(item);
    }
    aside.appendChild(log);
    const form = el("form", "chat-form");
    const input = el("input");
    input.placeholder = this.labels.t("ui.chat.placeholder");
    const send = el("button", "", this.labels.t("ui.chat.send"));
    form.appendChild(input);
    form.appendChild(send);
    form.addEventListener("submit", (event) => {
      event.preventDefault();
      if (input.value.trim()) {
        this.emit({ action: "post_chat", text: input.value.trim() });
        input.value = "";
      }
    });
    aside.appendChild(form);
    return aside;
  }
}

if (typeof document !== "undefined" && document.getElementById("app")) {
  const app = new App();
  app.start();
  (window as never as { innoboard: App }).innoboard = app;
}
