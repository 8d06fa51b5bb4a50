/**
 * Reconnecting sync channel. On every (re)connect it says hello with the
 * replica's last seen seq, lets the server replay or snapshot as needed,
 * then re-emits pending local ops. Backoff doubles per failed attempt and
 * resets on a healthy connection.
 */

import { ClientMessage, ServerMessage } from "./protocol";

export interface SocketLike {
  send(data: string): void;
  close(): void;
  addEventListener(type: "open" | "close" | "error", listener: () => void): void;
  addEventListener(type: "message", listener: (event: { data: unknown }) => void): void;
}

export interface SyncOptions {
  url: string;
  project: string;
  client: string;
  locale: string;
  lastSeq: () => number;
  onMessage: (message: ServerMessage) => void;
  /** Called right after hello on every (re)connect; re-emit pending here. */
  onConnected: (reconnect: boolean) => void;
  onStatus?: (status: "connecting" | "online" | "offline") => void;
  makeSocket?: (url: string) => SocketLike;
  initialBackoffMs?: number;
  maxBackoffMs?: number;
  schedule?: (fn: () => void, ms: number) => void;
}

export class SyncChannel {
  private options: SyncOptions;
  private socket: SocketLike | null = null;
  private backoff: number;
  private readonly initialBackoff: number;
  private readonly maxBackoff: number;
  private connects = 0;
  private stopped = false;

  constructor(options: SyncOptions) {
    this.options = options;
    this.initialBackoff = options.initialBackoffMs ?? 500;
    this.maxBackoff = options.maxBackoffMs ?? 15_000;
    this.backoff = this.initialBackoff;
  }

  get currentBackoff(): number {
    return this.backoff;
  }

  start(): void {
    this.connect();
  }

  stop(): void {
    this.stopped = true;
    this.socket?.close();
  }

  send(message: ClientMessage): void {
    try {
      this.socket?.send(JSON.stringify(message));
    } catch {
      // Socket died mid-send; the op stays pending and the reconnect
      // handshake re-emits it.
    }
  }

  private connect(): void {
    if (this.stopped) return;
    this.options.onStatus?.("connecting");
    const make =
      this.options.makeSocket ?? ((url: string) => new WebSocket(url) as unknown as SocketLike);
    const socket = make(this.options.url);
    this.socket = socket;

    socket.addEventListener("open", () => {
      this.backoff = this.initialBackoff;
      this.connects += 1;
      this.options.onStatus?.("online");
      this.send({
        t: "hello",
        project: this.options.project,
        client: this.options.client,
        last_seq: this.options.lastSeq(),
        locale: this.options.locale,
      });
      this.options.onConnected(this.connects > 1);
    });
    socket.addEventListener("message", (event) => {
      this.options.onMessage(JSON.parse(String(event.data)) as ServerMessage);
    });
    socket.addEventListener("error", () => {
      // Swallowed: the close event that follows drives the retry.
    });
    socket.addEventListener("close", () => {
      if (this.stopped) return;
      this.options.onStatus?.("offline");
      const wait = this.backoff;
      this.backoff = Math.min(this.backoff * 2, this.maxBackoff);
      const schedule = this.options.schedule ?? ((fn, ms) => setTimeout(fn, ms));
      schedule(() => this.connect(), wait);
    });
  }
}
