/**
 * Two simulated browsers against the real server binary: note edits made in
 * client A appear in client B, chat is delivered, locale switching stays
 * session-local, and a server restart mid-session resyncs both clients
 * without losing acked ops.
 */

import { ChildProcess, spawn } from "node:child_process";
import { mkdtempSync } from "node:fs";
import { createServer } from "node:net";
import { tmpdir } from "node:os";
import { join } from "node:path";
import { afterAll, beforeAll, describe, expect, it } from "vitest";
import WebSocket from "ws";

import { observableState } from "../src/model";
import { ServerMessage, opId } from "../src/protocol";
import { SyncChannel } from "../src/net";
import { ClientReplica } from "../src/replica";

const REPO_ROOT = join(__dirname, "..", "..");

function freePort(): Promise<number> {
  return new Promise((resolve, reject) => {
    const probe = createServer();
    probe.listen(0, "127.0.0.1", () => {
      const port = (probe.address() as { port: number }).port;
      probe.close(() => resolve(port));
    });
    probe.on("error", reject);
  });
}

function startServer(port: number, dataDir: string): ChildProcess {
  return spawn(
    "python3",
    ["-m", "innoboard.cli", "serve", "--port", String(port), "--data-dir", dataDir, "--host", "127.0.0.1"],
    { cwd: REPO_ROOT, stdio: "ignore" },
  );
}

async function waitHealthy(port: number, timeoutMs = 15000): Promise<void> {
  const deadline = Date.now() + timeoutMs;
  while (Date.now() < deadline) {
    try {
      const response = await fetch(`http://127.0.0.1:${port}/healthz`);
      if (response.ok) return;
    } catch {
      // not up yet
    }
    await sleep(100);
  }
  throw new Error("server did not become healthy");
}

function sleep(ms: number): Promise<void> {
  return new Promise((resolve) => setTimeout(resolve, ms));
}

async function waitFor(predicate: () => boolean, what: string, timeoutMs = 10000): Promise<void> {
  const deadline = Date.now() + timeoutMs;
  while (Date.now() < deadline) {
    if (predicate()) return;
    await sleep(25);
  }
  throw new Error(`timed out waiting for ${what}`);
}

class Browser {
  replica: ClientReplica;
  channel: SyncChannel;
  errors: string[] = [];
  presence: string[] = [];

  constructor(port: number, project: string, me: string, locale: string) {
    this.replica = new ClientReplica(me, project);
    this.channel = new SyncChannel({
      url: `ws://127.0.0.1:${port}/ws`,
      project,
      client: me,
      locale,
      lastSeq: () => (this.replica.pending.size > 0 ? 0 : this.replica.lastSeq),
      onMessage: (message) => this.onMessage(message),
      onConnected: () => {},
      makeSocket: (url) => new WebSocket(url) as never,
      initialBackoffMs: 150,
      maxBackoffMs: 600,
    });
    this.channel.start();
  }

  onMessage(message: ServerMessage): void {
    if (message.t === "snapshot") {
      this.replica.loadSnapshot(message.doc, message.seq);
      for (const op of this.replica.reemitPending()) this.channel.send({ t: "op", op });
    } else if (message.t === "op") this.replica.integrate(message.op, message.seq);
    else if (message.t === "presence") this.presence = message.clients.map((c) => c.client);
    else if (message.t === "error") this.errors.push(message.code);
  }

  emit(fields: { action: string; [key: string]: unknown }) {
    const op = this.replica.localOp(fields);
    this.channel.send({ t: "op", op });
    return op;
  }

  state(): string {
    return JSON.stringify(observableState(this.replica.doc));
  }

  stop(): void {
    this.channel.stop();
  }
}

describe("two-browser session", () => {
  let port: number;
  let dataDir: string;
  let server: ChildProcess;
  let project: string;
  let alice: Browser;
  let bob: Browser;

  beforeAll(async () => {
    port = await freePort();
    dataDir = mkdtempSync(join(tmpdir(), "innoboard-e2e-"));
    server = startServer(port, dataDir);
    await waitHealthy(port);
    const response = await fetch(`http://127.0.0.1:${port}/projects`, {
      method: "POST",
      body: JSON.stringify({ title: "E2E" }),
    });
    project = ((await response.json()) as { project_id: string }).project_id;
    alice = new Browser(port, project, "alice", "de");
    bob = new Browser(port, project, "bob", "fi");
    await waitFor(() => alice.presence.includes("bob"), "both sessions present");
  }, 30000);

  afterAll(() => {
    alice?.stop();
    bob?.stop();
    server?.kill("SIGTERM");
  });

  it("propagates created, dragged, recolored, highlighted notes", async () => {
    const boardOp = alice.emit({
      action: "create_board",
      kind: "swot",
      title: "Eval",
      perspective: "overview",
    });
    const boardId = `b${opId(boardOp)}`;
    const noteOp = alice.emit({
      action: "create_note",
      board: boardId,
      position: [0.1, 0.1],
      text: "remote idea",
    });
    const noteId = `n${opId(noteOp)}`;
    alice.emit({ action: "move_note", note: noteId, position: [0.62, 0.2] }); // drag end
    alice.emit({ action: "set_note_color", note: noteId, color: "green" });
    alice.emit({ action: "set_highlight", note: noteId, highlighted: true });

    await waitFor(
      () => bob.replica.doc.notes.get(noteId)?.values.highlighted === true,
      "bob sees alice's note state",
    );
    const note = bob.replica.doc.notes.get(noteId)!;
    expect(note.values.color).toBe("green");
    expect(note.values.position).toEqual([0.62, 0.2]);
    await waitFor(() => bob.state() === alice.state(), "replicas converge");
  }, 20000);

  it("delivers chat both ways", async () => {
    bob.emit({ action: "post_chat", text: "terve!" });
    alice.emit({ action: "post_chat", text: "hallo!" });
    await waitFor(() => {
      const a = alice.state();
      return a.includes("terve!") && a.includes("hallo!") && a === bob.state();
    }, "chat delivered to both");
  }, 20000);

  it("locale switching changes labels only, never the document", async () => {
    const before = alice.state();
    const german = (await (await fetch(`http://127.0.0.1:${port}/locales/de.json`)).json()) as Record<string, string>;
    const finnish = (await (await fetch(`http://127.0.0.1:${port}/locales/fi.json`)).json()) as Record<string, string>;
    expect(german["tpl.swot.strengths"]).not.toBe(finnish["tpl.swot.strengths"]);
    expect(alice.state()).toBe(before); // fetching catalogs emitted no ops
    expect(alice.state()).toBe(bob.state());
  }, 20000);

  it("survives a server restart without losing acked ops", async () => {
    const noteCountBefore = bob.replica.doc.notes.size;
    const stateBefore = alice.state();
    expect(stateBefore).toBe(bob.state());

    server.kill("SIGTERM");
    await new Promise((resolve) => server.once("exit", resolve));
    alice.presence = [];
    bob.presence = [];
    server = startServer(port, dataDir);
    await waitHealthy(port);

    // Both channels reconnect on their own and replay nothing new.
    await waitFor(
      () => alice.presence.includes("bob") && bob.presence.includes("alice"),
      "sessions re-registered",
      15000,
    );
    expect(alice.state()).toBe(stateBefore);
    expect(bob.replica.doc.notes.size).toBe(noteCountBefore);

    // And the session keeps working after the restart.
    const op = alice.emit({ action: "post_chat", text: "back online" });
    await waitFor(
      () => bob.state().includes("back online") && bob.state() === alice.state(),
      "post-restart op delivered",
      15000,
    );
    expect(opId(op)).toContain("alice");
  }, 40000);
});
