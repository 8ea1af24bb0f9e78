import type { PlayerId, StateResponse, StrikeResponse, Tile } from "./types.js";

export class ApiError extends Error {
  constructor(message: string, readonly status?: number) {
    super(message);
  }
}

export class TurnError extends ApiError {}

type FetchLike = (input: string, init?: RequestInit) => Promise<Response>;

function asTiles(payload: unknown): Tile[] {
  const tiles = (payload as { tiles?: unknown })?.tiles;
  if (!Array.isArray(tiles)) throw new ApiError("malformed board payload");
  return tiles.map((t) => {
    if (!Array.isArray(t) || t.length !== 2 || !Number.isInteger(t[0]) || !Number.isInteger(t[1])) {
      throw new ApiError("malformed board payload");
    }
    return [t[0], t[1]] as Tile;
  });
}

function asState(payload: unknown): StateResponse {
  const s = payload as StateResponse;
  if (!s || (s.turn !== 1 && s.turn !== 2) || typeof s.game_over !== "boolean" || !s.remaining) {
    throw new ApiError("malformed state payload");
  }
  return s;
}

export class Api {
  constructor(
    private base = "",
    private fetchFn: FetchLike = (input, init) => fetch(input, init),
  ) {}

  private async getJson(path: string): Promise<unknown> {
    const response = await this.fetchFn(this.base + path);
    if (!response.ok) throw new ApiError(`GET ${path} failed`, response.status);
    try {
      return await response.json();
    } catch {
      throw new ApiError("malformed JSON from " + path);
    }
  }

  async state(): Promise<StateResponse> {
    return asState(await this.getJson("/api/state"));
  }

  async board(player: PlayerId, viewer: string): Promise<Tile[]> {
    return asTiles(await this.getJson(`/api/board/${player}?viewer=${encodeURIComponent(viewer)}`));
  }

  async strike(player: PlayerId, x: number, y: number): Promise<StrikeResponse> {
    const response = await this.fetchFn(`${this.base}/api/strike/${player}`, {
      method: "POST",
      headers: { "Content-Type": "application/json" },
      body: JSON.stringify({ x, y }),
    });
    let payload: unknown;
    try {
      payload = await response.json();
    } catch {
      throw new ApiError("malformed JSON from strike", response.status);
    }
    if (response.status === 409) throw new TurnError("not your turn", 409);
    if (!response.ok) {
      throw new ApiError((payload as { error?: string })?.error ?? "strike failed", response.status);
    }
    return payload as StrikeResponse;
  }
}
