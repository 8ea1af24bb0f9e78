export type PlayerId = 1 | 2;

export type Tile = [number, number];

export interface LastStrike {
  by: PlayerId;
  x: number;
  y: number;
  hit: boolean;
}

export interface StateResponse {
  turn: PlayerId;
  game_over: boolean;
  winner: PlayerId | null;
  remaining: { "1": number; "2": number };
  last: LastStrike | null;
}

export interface StrikeResponse {
  hit: boolean;
  remaining: number;
  game_over: boolean;
  winner: PlayerId | null;
  by: PlayerId;
}

export interface ClientGameView {
  me: PlayerId;
  myTiles: Tile[];
  // exactly what the server returned; the client never fills hidden cells in
  oppTiles: Tile[];
  myTurn: boolean;
  gameOver: boolean;
  winner: PlayerId | null;
  remaining: { me: number; opponent: number };
  last: LastStrike | null;
}

export function opponentOf(me: PlayerId): PlayerId {
  return me === 1 ? 2 : 1;
}
