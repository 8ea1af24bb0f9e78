import { afterEach, beforeEach, describe, expect, it, vi } from "vitest";

import type { Api } from "../src/api.js";
import { GameClient } from "../src/client.js";
import type { ClientGameView, StateResponse, StrikeResponse, Tile } from "../src/types.js";

const baseState: StateResponse = {
  turn: 1,
  game_over: false,
  winner: null,
  remaining: { "1": 2, "2": 2 },
  last: null,
};

function stubApi(over: Partial<Record<"state" | "board" | "strike", unknown>> = {}) {
  const api = {
    state: vi.fn(async (): Promise<StateResponse> => baseState),
    board: vi.fn(async (player: number): Promise<Tile[]> => (player === 1 ? [[1, 2]] : [])),
    strike: vi.fn(
      async (): Promise<StrikeResponse> => ({ hit: false, remaining: 2, game_over: false, winner: null, by: 1 }),
    ),
    ...over,
  };
  return api as unknown as Api & typeof api;
}

beforeEach(() => {
  vi.useFakeTimers();
});

afterEach(() => {
  vi.useRealTimers();
});

describe("GameClient", () => {
  it("refresh assembles the view for this player's eyes", async () => {
    const api = stubApi();
    const views: ClientGameView[] = [];
    const client = new GameClient(api, 1, (v) => views.push(v));
    const view = await client.refresh();
    expect(view?.myTiles).toEqual([[1, 2]]);
    expect(view?.oppTiles).toEqual([]);
    expect(view?.myTurn).toBe(true);
    expect(views).toHaveLength(1);
    expect(api.board).toHaveBeenCalledWith(1, "player1");
    expect(api.board).toHaveBeenCalledWith(2, "player1");
  });

  it("polls on the configured interval until stopped", async () => {
    const api = stubApi();
    const client = new GameClient(api, 1, () => {}, () => {}, 500);
    client.start();
    await vi.advanceTimersByTimeAsync(0);
    expect(api.state).toHaveBeenCalledTimes(1);
    await vi.advanceTimersByTimeAsync(1500);
    expect(api.state).toHaveBeenCalledTimes(4);
    client.stop();
    await vi.advanceTimersByTimeAsync(2000);
    expect(api.state).toHaveBeenCalledTimes(4);
  });

  it("reports poll failures and recovers on the next success", async () => {
    const api = stubApi();
    api.state.mockRejectedValueOnce(new TypeError("fetch failed"));
    const errors: unknown[] = [];
    const views: ClientGameView[] = [];
    const client = new GameClient(api, 1, (v) => views.push(v), (e) => errors.push(e), 500);
    client.start();
    await vi.advanceTimersByTimeAsync(0);
    expect(errors).toHaveLength(1);
    expect(views).toHaveLength(0);
    await vi.advanceTimersByTimeAsync(500);
    expect(views).toHaveLength(1);
    client.stop();
  });

  it("allows only one strike in flight", async () => {
    let release!: (value: StrikeResponse) => void;
    const api = stubApi({
      strike: vi.fn(() => new Promise<StrikeResponse>((resolve) => (release = resolve))),
    });
    const client = new GameClient(api, 1, () => {});
    const first = client.strike(0, 0);
    const second = await client.strike(1, 1);
    expect(second).toBeNull();
    expect(api.strike).toHaveBeenCalledTimes(1);
    release({ hit: true, remaining: 1, game_over: false, winner: null, by: 1 });
    const outcome = await first;
    expect(outcome?.hit).toBe(true);
  });

  it("refreshes after a strike resolves", async () => {
    const api = stubApi();
    const client = new GameClient(api, 1, () => {});
    await client.strike(3, 3);
    await vi.advanceTimersByTimeAsync(0);
    expect(api.state).toHaveBeenCalledTimes(1);
  });
});
