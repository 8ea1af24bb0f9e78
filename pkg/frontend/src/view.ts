import type { ClientGameView, LastStrike, PlayerId, StateResponse, Tile } from "./types.js";
import { opponentOf } from "./types.js";

export const GRID = 10;

export function buildView(
  me: PlayerId,
  state: StateResponse,
  myTiles: Tile[],
  oppTiles: Tile[],
): ClientGameView {
  const opp = opponentOf(me);
  return {
    me,
    myTiles,
    oppTiles,
    myTurn: !state.game_over && state.turn === me,
    gameOver: state.game_over,
    winner: state.winner,
    remaining: { me: state.remaining[String(me) as "1" | "2"], opponent: state.remaining[String(opp) as "1" | "2"] },
    last: state.last,
  };
}

export function renderGridHtml(tiles: Tile[], clickable: boolean): string {
  const occupied = new Set(tiles.map(([x, y]) => `${x},${y}`));
  const rows: string[] = [];
  for (let y = 0; y < GRID; y++) {
    const cells: string[] = [];
    for (let x = 0; x < GRID; x++) {
      const classes = ["cell"];
      if (occupied.has(`${x},${y}`)) classes.push("ship");
      if (clickable) classes.push("aim");
      cells.push(`<td class="${classes.join(" ")}" data-x="${x}" data-y="${y}"></td>`);
    }
    rows.push(`<tr>${cells.join("")}</tr>`);
  }
  return `<table class="grid">${rows.join("")}</table>`;
}

export function statusLine(view: ClientGameView): string {
  if (view.gameOver) {
    return view.winner === view.me ? "You won!" : `Player ${view.winner} won.`;
  }
  return view.myTurn ? "Your turn: pick a cell on the right." : `Waiting for player ${opponentOf(view.me)}.`;
}

export function describeStrike(last: LastStrike | null, me: PlayerId): string {
  if (!last) return "";
  if (last.by === me) {
    return last.hit ? `Congratulations! You hit player ${opponentOf(me)}!` : "No hit :(";
  }
  return last.hit
    ? `Player ${last.by} hit your ship at ${last.x},${last.y}.`
    : `Player ${last.by} missed at ${last.x},${last.y}.`;
}
