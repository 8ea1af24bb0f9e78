"""Two-player battleship served over HTTP.

All game logic runs inside the faceted evaluator: each player's board lives
in a box holding a facet whose public side is an empty board, guarded by a
label whose policy admits only that player's identity string. Every value
leaving the evaluator for the HTTP layer passes through export_plain, the one
choke point that refuses facets and missing-data placeholders.
"""

from __future__ import annotations

import json
import mimetypes
import re
import threading
from dataclasses import dataclass
from http.server import BaseHTTPRequestHandler, ThreadingHTTPServer
from pathlib import Path
from urllib.parse import parse_qs, urlparse

from .errors import FacetEscapeError, LangError, StarObservedError
from .facets import NIL, STAR, Facet, Pair, render
from .interp import Interp
from .reader import Const, Obs, Unbox, Var, parse_expr, parse_program

GRID = 10


class OutOfTurnError(Exception):
    pass


class InvalidBoardError(Exception):
    pass


class InvalidCoordinateError(Exception):
    pass


GAME_CODE = """
(define (makeboard) '())

(define (add-piece board x y) (cons (cons x y) board))

(define (mark-hit board x y)
  (if (null? board)
      (cons board false)
      (let* ([fst (car board)]
             [rst (cdr board)])
        (if (and (= (car fst) x)
                 (= (cdr fst) y))
            (cons rst true)
            (let ([hit (mark-hit rst x y)])
              (cons (cons fst (car hit)) (cdr hit)))))))

(define (count-tiles board)
  (if (null? board) 0 (+ 1 (count-tiles (cdr board)))))

(define p1l (let-label p1l (lambda (who) (= who "player1")) p1l))
(define p2l (let-label p2l (lambda (who) (= who "player2")) p2l))
"""


def export_plain(value):
    """The only gate between the evaluator and HTTP. Facets and holes stop here."""
    if isinstance(value, Facet):
        raise FacetEscapeError("faceted value reached the service boundary: %s" % render(value))
    if value is STAR:
        raise StarObservedError("missing data reached the service boundary")
    if isinstance(value, Pair):
        return (export_plain(value.car), export_plain(value.cdr))
    if value is NIL:
        return None
    if isinstance(value, (bool, int, str)):
        return value
    raise FacetEscapeError("unexpected value at the service boundary: %s" % render(value))


def _pairs_to_tiles(exported) -> list:
    tiles = []
    cur = exported
    while cur is not None:
        (x, y), cur = cur
        tiles.append((x, y))
    return tiles


def _board_expr(tiles: list) -> str:
    out = "(makeboard)"
    for x, y in tiles:
        out = "(add-piece %s %d %d)" % (out, x, y)
    return out


def _validate_board(tiles: list, who: str) -> None:
    seen = set()
    for tile in tiles:
        if len(tile) != 2:
            raise InvalidBoardError("%s: tiles must be x,y pairs" % who)
        x, y = tile
        if not (0 <= x < GRID and 0 <= y < GRID):
            raise InvalidCoordinateError("%s: tile (%d,%d) is off the %dx%d grid" % (who, x, y, GRID, GRID))
        if (x, y) in seen:
            raise InvalidBoardError("%s: duplicate tile (%d,%d)" % (who, x, y))
        seen.add((x, y))


@dataclass
class StrikeOutcome:
    hit: bool
    remaining: int
    game_over: bool
    winner: int | None


class Game:
    """One game: a fresh interpreter, two labelled boards, strict turn order."""

    def __init__(self, board1: list, board2: list):
        _validate_board(board1, "player1")
        _validate_board(board2, "player2")
        self.lock = threading.Lock()
        self.interp = Interp()
        self.interp.run_program(parse_program(GAME_CODE))
        setup = "(define p1board (box (facet p1l %s (makeboard))))\n" % _board_expr(board1)
        setup += "(define p2board (box (facet p2l %s (makeboard))))\n" % _board_expr(board2)
        self.interp.run_program(parse_program(setup))
        self.turn = 1
        self.last: dict | None = None

    ### views

    def view_board(self, player: int, viewer: str):
        """The board value player's label reveals to viewer. Built as an AST so
        arbitrary viewer strings can never reach the parser."""
        ast = Obs(Var("p%dl" % player), Const(viewer), Unbox(Var("p%dboard" % player)))
        return self.interp.eval_top(ast)

    def tiles(self, player: int, viewer: str) -> list:
        return _pairs_to_tiles(export_plain(self.view_board(player, viewer)))

    def remaining(self, player: int) -> int:
        ast = parse_expr(
            '(obs p%dl "player%d" (count-tiles (unbox p%dboard)))' % (player, player, player)
        )
        return export_plain(self.interp.eval_top(ast))

    @property
    def game_over(self) -> bool:
        return self.winner is not None

    @property
    def winner(self) -> int | None:
        # the first mover's opponent is checked first
        if self.remaining(2) == 0:
            return 1
        if self.remaining(1) == 0:
            return 2
        return None

    def state(self) -> dict:
        return {
            "turn": self.turn,
            "game_over": self.game_over,
            "winner": self.winner,
            "remaining": {"1": self.remaining(1), "2": self.remaining(2)},
            "last": self.last,
        }

    ### moves

    def strike(self, striker: int, x: int, y: int) -> StrikeOutcome:
        if not isinstance(x, int) or not isinstance(y, int) or isinstance(x, bool) or isinstance(y, bool):
            raise InvalidCoordinateError("coordinates must be integers")
        if not (0 <= x < GRID and 0 <= y < GRID):
            raise InvalidCoordinateError("(%s,%s) is off the %dx%d grid" % (x, y, GRID, GRID))
        if self.game_over:
            raise OutOfTurnError("the game is over")
        if striker != self.turn:
            raise OutOfTurnError("it is player %d's turn" % self.turn)
        target = 2 if striker == 1 else 1
        code = (
            "(let ([ans (mark-hit (unbox p%(t)dboard) %(x)d %(y)d)])\n"
            "  (begin\n"
            "    (set! p%(t)dboard (car ans))\n"
            '    (cons (obs p%(t)dl "player%(t)d" (cdr ans))\n'
            '          (obs p%(t)dl "player%(t)d" (count-tiles (car ans))))))'
        ) % {"t": target, "x": x, "y": y}
        hit, remaining = export_plain(self.interp.eval_top(parse_expr(code)))
        self.turn = target
        winner = striker if remaining == 0 else None
        self.last = {"by": striker, "x": x, "y": y, "hit": hit}
        return StrikeOutcome(hit=hit, remaining=remaining, game_over=remaining == 0, winner=winner)


### HTTP layer

_BOARD_PAGE = """<html><head><title>Battleship</title></head><body>
<h1>Player %(player)d's Game Board</h1>
<p>as seen by %(viewer)s</p>
<pre>%(board)s</pre>
</body></html>"""

_HIT_PAGE = """<html><body><h1>Congratulations!</h1> <h4>You hit player %d!</h4></body></html>"""

_MISS_PAGE = """<html><body><p>No hit :(</p></body></html>"""

_INDEX_PAGE = """<html><body><h1>Battleship</h1>
<ul>
<li>GET /player1/{id}, /player2/{id}: board views</li>
<li>GET /player1strike/{x,y}, /player2strike/{x,y}: strikes</li>
<li>GET /api/board/{player}?viewer={id}, POST /api/strike/{player}, GET /api/state</li>
</ul></body></html>"""

_POS_RE = re.compile(r"^[0-9],[0-9]$")


class _Handler(BaseHTTPRequestHandler):
    def log_message(self, fmt, *args):  # keep test output quiet
        pass

    @property
    def game(self) -> Game:
        return self.server.game

    def _send(self, status: int, body: str, ctype: str = "text/html") -> None:
        payload = body.encode()
        self.send_response(status)
        self.send_header("Content-Type", ctype)
        self.send_header("Content-Length", str(len(payload)))
        self.end_headers()
        self.wfile.write(payload)

    def _send_json(self, status: int, obj) -> None:
        self._send(status, json.dumps(obj), ctype="application/json")

    def do_GET(self):
        url = urlparse(self.path)
        parts = [p for p in url.path.split("/") if p]
        try:
            with self.game.lock:
                if not parts:
                    return self._serve_index()
                if parts[0] in ("player1", "player2") and len(parts) == 2:
                    player = int(parts[0][-1])
                    board = self.game.view_board(player, parts[1])
                    return self._send(
                        200, _BOARD_PAGE % {"player": player, "viewer": parts[1], "board": render(board)}
                    )
                if parts[0] in ("player1strike", "player2strike") and len(parts) == 2:
                    return self._strike_page(int(parts[0][6]), parts[1])
                if parts[:2] == ["api", "state"] and len(parts) == 2:
                    return self._send_json(200, self.game.state())
                if parts[:2] == ["api", "board"] and len(parts) == 3:
                    return self._api_board(parts[2], url.query)
                if self.server.ui_dir and self._serve_static(url.path):
                    return None
            self._send(404, "<h1>404</h1>")
        except OutOfTurnError as e:
            self._send(409, "<h1>409</h1><p>%s</p>" % e)
        except (InvalidCoordinateError, ValueError) as e:
            self._send(400, "<h1>400</h1><p>%s</p>" % e)
        except LangError as e:
            self._send(500, "<h1>500</h1><p>%s</p>" % e)

    def do_POST(self):
        url = urlparse(self.path)
        parts = [p for p in url.path.split("/") if p]
        try:
            if parts[:2] == ["api", "strike"] and len(parts) == 3:
                with self.game.lock:
                    return self._api_strike(parts[2])
            self._send_json(404, {"error": "no such route"})
        except OutOfTurnError as e:
            self._send_json(409, {"error": str(e)})
        except (InvalidCoordinateError, ValueError) as e:
            self._send_json(400, {"error": str(e)})
        except LangError as e:
            self._send_json(500, {"error": str(e)})

    ### route bodies

    def _serve_index(self):
        if self.server.ui_dir and self._serve_static("/index.html"):
            return None
        return self._send(200, _INDEX_PAGE)

    def _serve_static(self, path: str) -> bool:
        root = Path(self.server.ui_dir).resolve()
        target = (root / path.lstrip("/")).resolve()
        if not str(target).startswith(str(root)) or not target.is_file():
            return False
        ctype = mimetypes.guess_type(str(target))[0] or "application/octet-stream"
        payload = target.read_bytes()
        self.send_response(200)
        self.send_header("Content-Type", ctype)
        self.send_header("Content-Length", str(len(payload)))
        self.end_headers()
        self.wfile.write(payload)
        return True

    def _strike_page(self, striker: int, pos: str):
        if not _POS_RE.match(pos):
            raise InvalidCoordinateError("position must look like x,y with single digits")
        x, y = int(pos[0]), int(pos[2])
        outcome = self.game.strike(striker, x, y)
        target = 2 if striker == 1 else 1
        if outcome.hit:
            return self._send(200, _HIT_PAGE % target)
        return self._send(200, _MISS_PAGE)

    def _api_board(self, player: str, query: str):
        if player not in ("1", "2"):
            return self._send_json(404, {"error": "no such player"})
        viewer = parse_qs(query).get("viewer", [""])[0]
        tiles = self.game.tiles(int(player), viewer)
        return self._send_json(200, {"tiles": [[x, y] for x, y in tiles]})

    def _api_strike(self, player: str):
        if player not in ("1", "2"):
            return self._send_json(404, {"error": "no such player"})
        length = int(self.headers.get("Content-Length", 0))
        try:
            body = json.loads(self.rfile.read(length) or b"{}")
        except json.JSONDecodeError:
            raise ValueError("body must be JSON")
        if not isinstance(body, dict) or "x" not in body or "y" not in body:
            raise ValueError("body must carry x and y")
        outcome = self.game.strike(int(player), body["x"], body["y"])
        return self._send_json(
            200,
            {
                "hit": outcome.hit,
                "remaining": outcome.remaining,
                "game_over": outcome.game_over,
                "winner": outcome.winner,
                "by": int(player),
            },
        )


def make_server(game: Game, port: int = 0, ui_dir: str | None = None) -> ThreadingHTTPServer:
    server = ThreadingHTTPServer(("127.0.0.1", port), _Handler)
    server.game = game
    server.ui_dir = ui_dir
    return server
