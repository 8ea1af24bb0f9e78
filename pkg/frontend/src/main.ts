import { Api, TurnError } from "./api.js";
import { GameClient } from "./client.js";
import type { ClientGameView, PlayerId } from "./types.js";
import { opponentOf } from "./types.js";
import { describeStrike, renderGridHtml, statusLine } from "./view.js";

const el = (id: string) => document.getElementById(id)!;

function pickIdentity(): PlayerId | null {
  const param = new URLSearchParams(location.search).get("me");
  if (param === "1" || param === "2") return Number(param) as PlayerId;
  return null;
}

function startGame(me: PlayerId): void {
  el("picker").style.display = "none";
  el("game").style.display = "";
  el("who").textContent = `You are player ${me}`;

  const client = new GameClient(
    new Api(),
    me,
    (view) => render(view),
    () => showBanner("Connection lost, retrying..."),
  );

  function render(view: ClientGameView): void {
    hideBanner();
    el("mine").innerHTML = renderGridHtml(view.myTiles, false);
    el("theirs").innerHTML = renderGridHtml(view.oppTiles, view.myTurn);
    el("status").textContent = statusLine(view);
    el("last").textContent = describeStrike(view.last, me);
    el("counts").textContent = `Your ships: ${view.remaining.me} | Player ${opponentOf(me)}: ${view.remaining.opponent}`;
  }

  el("theirs").addEventListener("click", async (event) => {
    const cell = (event.target as HTMLElement).closest("td.aim");
    if (!cell) return;
    const x = Number(cell.getAttribute("data-x"));
    const y = Number(cell.getAttribute("data-y"));
    try {
      const outcome = await client.strike(x, y);
      if (outcome) {
        el("last").textContent = outcome.hit
          ? `Congratulations! You hit player ${opponentOf(me)}!`
          : "No hit :(";
      }
    } catch (err) {
      if (err instanceof TurnError) {
        el("last").textContent = "Not your turn.";
      } else {
        showBanner("Strike failed, try again.");
      }
    }
  });

  client.start();
}

function showBanner(text: string): void {
  const banner = el("banner");
  banner.textContent = text;
  banner.style.display = "";
}

function hideBanner(): void {
  el("banner").style.display = "none";
}

const me = pickIdentity();
if (me) {
  startGame(me);
} else {
  el("picker").addEventListener("click", (event) => {
    const button = (event.target as HTMLElement).closest("button[data-player]");
    if (button) startGame(Number(button.getAttribute("data-player")) as PlayerId);
  });
}
