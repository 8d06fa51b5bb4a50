"""HTTP and websocket transport around the hub core.

One websocket connection carries one session. Outbound messages go through
a per-connection queue pumped by a writer task, so broadcast fan-out never
reorders what a single session sees and a slow client cannot stall the
project's dispatch.
"""

from __future__ import annotations

import asyncio
import json
import logging
from pathlib import Path

from aiohttp import WSMsgType, web

from .hub import Hub, ProjectHost, error_message
from .i18n import Catalogs, builtin_catalogs
from .store import ProjectStore

log = logging.getLogger("innoboard.server")

FALLBACK_SHELL = """<!doctype html>
<html>
  <head><meta charset="utf-8"><title>innoboard</title></head>
  <body>
    <h1>innoboard</h1>
    <p>This server is running without a bundled web client.
       Connect over the websocket endpoint at <code>/ws</code>.</p>
  </body>
</html>
"""


def build_app(
    data_dir: Path | str | None = None,
    locale_dir: Path | str | None = None,
    ui_dir: Path | str | None = None,
    compact_threshold: int | None = None,
) -> web.Application:
    app = web.Application()
    store = ProjectStore(data_dir) if data_dir else None
    kwargs = {}
    if compact_threshold is not None:
        kwargs["compact_threshold"] = compact_threshold
    app["hub"] = Hub(store, **kwargs)
    app["catalogs"] = (
        Catalogs.load_dir(Path(locale_dir)) if locale_dir else builtin_catalogs()
    )
    app["ui_dir"] = Path(ui_dir) if ui_dir else None
    app["queues"] = {}  # project_id -> {client -> asyncio.Queue}
    app["sockets"] = set()

    app.router.add_get("/healthz", handle_healthz)
    app.router.add_post("/projects", handle_create_project)
    app.router.add_get("/p/{token}", handle_shell)
    app.router.add_get("/locales/{tag}.json", handle_locale)
    app.router.add_get("/ws", handle_websocket)
    if app["ui_dir"] is not None:
        app.router.add_static("/static/", app["ui_dir"])
    app.on_shutdown.append(_close_websockets)
    return app


async def handle_healthz(request: web.Request) -> web.Response:
    return web.Response(text="ok")


async def handle_create_project(request: web.Request) -> web.Response:
    try:
        body = await request.json()
    except (json.JSONDecodeError, UnicodeDecodeError):
        body = {}
    title = str(body.get("title", ""))
    locale = str(body.get("default_locale", "en"))
    token = request.app["hub"].create_project(title, default_locale=locale)
    return web.json_response({"project_id": token})


async def handle_shell(request: web.Request) -> web.Response:
    token = request.match_info["token"]
    if request.app["hub"].get(token) is None:
        raise web.HTTPNotFound(text="no such project")
    ui_dir = request.app["ui_dir"]
    if ui_dir is not None and (ui_dir / "index.html").is_file():
        return web.FileResponse(ui_dir / "index.html")
    return web.Response(text=FALLBACK_SHELL, content_type="text/html")


async def handle_locale(request: web.Request) -> web.Response:
    tag = request.match_info["tag"]
    return web.json_response(request.app["catalogs"].merged(tag))


def _project_queues(app: web.Application, project_id: str) -> dict:
    return app["queues"].setdefault(project_id, {})


def _route(
    app: web.Application,
    project_id: str,
    own_queue: asyncio.Queue,
    routed: list[tuple[str | None, dict]],
) -> None:
    queues = _project_queues(app, project_id)
    for target, message in routed:
        if target is None:
            own_queue.put_nowait(message)
        elif target == "*":
            for queue in queues.values():
                queue.put_nowait(message)
        else:
            queue = queues.get(target)
            if queue is not None:
                queue.put_nowait(message)


async def handle_websocket(request: web.Request) -> web.WebSocketResponse:
    ws = web.WebSocketResponse(heartbeat=30)
    await ws.prepare(request)
    app = request.app
    app["sockets"].add(ws)

    queue: asyncio.Queue = asyncio.Queue()
    host: ProjectHost | None = None
    client: str | None = None

    async def pump() -> None:
        while True:
            message = await queue.get()
            if message is None:
                return
            try:
                await ws.send_str(json.dumps(message))
            except ConnectionError:
                return

    writer = asyncio.create_task(pump())
    try:
        async for frame in ws:
            if frame.type != WSMsgType.TEXT:
                continue
            try:
                message = json.loads(frame.data)
            except json.JSONDecodeError:
                queue.put_nowait(error_message("bad_op", "frame is not JSON"))
                continue
            if not isinstance(message, dict):
                queue.put_nowait(error_message("bad_op", "frame is not an object"))
                continue
            kind = message.get("t")

            if kind == "hello":
                if host is not None:
                    queue.put_nowait(error_message("bad_op", "session already joined"))
                    continue
                project_id = str(message.get("project", ""))
                candidate = app["hub"].get(project_id)
                if candidate is None:
                    queue.put_nowait(
                        error_message("no_such_project", f"unknown project {project_id}")
                    )
                    continue
                wanted = str(message.get("client", ""))
                joined, routed = candidate.hello(
                    wanted,
                    int(message.get("last_seq", 0) or 0),
                    str(message.get("locale", "en")),
                )
                if joined:
                    host, client = candidate, wanted
                    _project_queues(app, project_id)[client] = queue
                _route(app, project_id, queue, routed)
            elif kind == "op":
                if host is None or client is None:
                    queue.put_nowait(error_message("bad_op", "send hello before ops"))
                    continue
                _route(app, host.project_id, queue, host.handle_op(client, message))
            elif kind == "resync":
                if host is None or client is None:
                    queue.put_nowait(error_message("bad_op", "send hello first"))
                    continue
                routed = host.resync(client, int(message.get("from_seq", 0) or 0))
                _route(app, host.project_id, queue, routed)
            else:
                queue.put_nowait(error_message("bad_op", f"unknown message type {kind!r}"))
    finally:
        if host is not None and client is not None:
            _project_queues(app, host.project_id).pop(client, None)
            _route(app, host.project_id, queue, host.leave(client))
        queue.put_nowait(None)
        await writer
        app["sockets"].discard(ws)
    return ws


async def _close_websockets(app: web.Application) -> None:
    for ws in list(app.get("sockets", ())):
        await ws.close()


async def run_server(
    port: int,
    data_dir: Path | str,
    locale_dir: Path | str | None = None,
    ui_dir: Path | str | None = None,
    host: str = "0.0.0.0",
) -> None:
    """Serve until cancelled; raises OSError when the port is taken."""
    app = build_app(data_dir=data_dir, locale_dir=locale_dir, ui_dir=ui_dir)
    runner = web.AppRunner(app)
    await runner.setup()
    site = web.TCPSite(runner, host, port)
    try:
        await site.start()
        log.info("listening on %s:%d", host, port)
        await asyncio.Event().wait()
    finally:
        await runner.cleanup()
