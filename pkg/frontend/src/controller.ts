// Debounced, sequence-numbered request channel: one per panel. Rapid
// control changes collapse to a single request after the debounce window,
// and responses that arrive out of order are dropped so the rendered state
// always corresponds to the last issued request.

export interface Scheduler {
  schedule(fn: () => void, delayMs: number): number;
  cancel(handle: number): void;
}

export const realScheduler: Scheduler = {
  schedule: (fn, delayMs) => setTimeout(fn, delayMs) as unknown as number,
  cancel: (handle) => clearTimeout(handle),
};

export class RequestChannel<T> {
  private seq = 0;
  private applied = 0;
  private pending: number | null = null;
  private inFlight = 0;

  constructor(
    private issue: () => Promise<T>,
    private apply: (result: T) => void,
    private onError: (error: unknown) => void = () => undefined,
    private debounceMs = 150,
    private scheduler: Scheduler = realScheduler,
  ) {}

  /** Schedule a request for the current state, collapsing rapid calls. */
  request(): void {
    if (this.pending !== null) {
      this.scheduler.cancel(this.pending);
    }
    this.pending = this.scheduler.schedule(() => {
      this.pending = null;
      this.fire();
    }, this.debounceMs);
  }

  /** Issue immediately (initial loads, button clicks). */
  fire(): void {
    const ticket = ++this.seq;
    this.inFlight += 1;
    this.issue().then(
      (result) => {
        this.inFlight -= 1;
        if (ticket > this.applied && ticket === this.seq) {
          this.applied = ticket;
          this.apply(result);
        }
        // older ticket or superseded: stale, drop silently
      },
      (error) => {
        this.inFlight -= 1;
        if (ticket === this.seq) this.onError(error);
      },
    );
  }

  get inFlightCount(): number {
    return this.inFlight;
  }
}
