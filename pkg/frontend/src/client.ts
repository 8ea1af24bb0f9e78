import type { Api } from "./api.js";
import type { ClientGameView, PlayerId, StrikeResponse } from "./types.js";
import { opponentOf } from "./types.js";
import { buildView } from "./view.js";

/** Polls the service and pushes fresh views; allows one strike in flight. */
export class GameClient {
  private timer: ReturnType<typeof setInterval> | null = null;
  private striking = false;

  constructor(
    private api: Api,
    readonly me: PlayerId,
    private onChange: (view: ClientGameView) => void,
    private onError: (err: unknown) => void = () => {},
    private intervalMs = 1000,
  ) {}

  async refresh(): Promise<ClientGameView | null> {
    try {
      const viewer = `player${this.me}`;
      const [state, mine, theirs] = await Promise.all([
        this.api.state(),
        this.api.board(this.me, viewer),
        this.api.board(opponentOf(this.me), viewer),
      ]);
      const view = buildView(this.me, state, mine, theirs);
      this.onChange(view);
      return view;
    } catch (err) {
      this.onError(err);
      return null;
    }
  }

  start(): void {
    if (this.timer) return;
    void this.refresh();
    this.timer = setInterval(() => void this.refresh(), this.intervalMs);
  }

  stop(): void {
    if (!this.timer) return;
    clearInterval(this.timer);
    this.timer = null;
  }

  async strike(x: number, y: number): Promise<StrikeResponse | null> {
    if (this.striking) return null;
    this.striking = true;
    try {
      return await this.api.strike(this.me, x, y);
    } finally {
      this.striking = false;
      void this.refresh();
    }
  }
}
