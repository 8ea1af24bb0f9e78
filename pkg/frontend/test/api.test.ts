import { describe, expect, it } from "vitest";

import { Api, ApiError, TurnError } from "../src/api.js";

function jsonResponse(payload: unknown, status = 200): Response {
  return new Response(JSON.stringify(payload), {
    status,
    headers: { "Content-Type": "application/json" },
  });
}

function fakeFetch(routes: Record<string, Response>) {
  const seen: string[] = [];
  const fetchFn = async (input: string) => {
    seen.push(input);
    const response = routes[input.split("?")[0]];
    if (!response) return new Response("not found", { status: 404 });
    return response.clone();
  };
  return { fetchFn, seen };
}

describe("Api", () => {
  it("fetches and validates a board", async () => {
    const { fetchFn, seen } = fakeFetch({ "/api/board/1": jsonResponse({ tiles: [[2, 3], [1, 2]] }) });
    const api = new Api("", fetchFn);
    expect(await api.board(1, "player1")).toEqual([[2, 3], [1, 2]]);
    expect(seen[0]).toBe("/api/board/1?viewer=player1");
  });

  it("url-encodes the viewer", async () => {
    const { fetchFn, seen } = fakeFetch({ "/api/board/1": jsonResponse({ tiles: [] }) });
    await new Api("", fetchFn).board(1, "a&b=c");
    expect(seen[0]).toBe("/api/board/1?viewer=a%26b%3Dc");
  });

  it("rejects malformed board payloads", async () => {
    const cases = [{ tiles: "nope" }, { tiles: [[1]] }, { tiles: [["a", "b"]] }, {}];
    for (const payload of cases) {
      const { fetchFn } = fakeFetch({ "/api/board/1": jsonResponse(payload) });
      await expect(new Api("", fetchFn).board(1, "x")).rejects.toThrow(ApiError);
    }
  });

  it("rejects non-json bodies", async () => {
    const fetchFn = async () => new Response("<html>oops</html>", { status: 200 });
    await expect(new Api("", fetchFn).state()).rejects.toThrow(/malformed JSON/);
  });

  it("validates the state shape", async () => {
    const { fetchFn } = fakeFetch({ "/api/state": jsonResponse({ turn: 7 }) });
    await expect(new Api("", fetchFn).state()).rejects.toThrow(/malformed state/);
  });

  it("posts strikes and returns the outcome", async () => {
    let body: unknown;
    const fetchFn = async (_input: string, init?: RequestInit) => {
      body = JSON.parse(String(init?.body));
      return jsonResponse({ hit: true, remaining: 1, game_over: false, winner: null, by: 1 });
    };
    const outcome = await new Api("", fetchFn).strike(1, 2, 3);
    expect(body).toEqual({ x: 2, y: 3 });
    expect(outcome.hit).toBe(true);
  });

  it("maps 409 to a turn error", async () => {
    const fetchFn = async () => jsonResponse({ error: "it is player 1's turn" }, 409);
    await expect(new Api("", fetchFn).strike(2, 0, 0)).rejects.toThrow(TurnError);
  });

  it("surfaces other strike failures with the server message", async () => {
    const fetchFn = async () => jsonResponse({ error: "(42,0) is off the 10x10 grid" }, 400);
    await expect(new Api("", fetchFn).strike(1, 42, 0)).rejects.toThrow(/off the 10x10 grid/);
  });

  it("propagates network failures", async () => {
    const fetchFn = async () => {
      throw new TypeError("fetch failed");
    };
    await expect(new Api("", fetchFn).state()).rejects.toThrow("fetch failed");
  });
});
