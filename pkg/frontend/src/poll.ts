// Queue refresh polling: immediate first run, then a fixed interval.
// Overlapping runs are skipped rather than queued; rejections are swallowed
// so a transient network error does not kill the loop.

export const QUEUE_POLL_INTERVAL_MS = 15_000;

export function startPolling(
  fn: () => Promise<void>,
  intervalMs: number = QUEUE_POLL_INTERVAL_MS,
): () => void {
  let running = false;
  let stopped = false;
  const tick = async () => {
    if (running || stopped) return;
    running = true;
    try {
      await fn();
    } catch {
      // next tick retries
    } finally {
      running = false;
    }
  };
  void tick();
  const timer = setInterval(() => void tick(), intervalMs);
  return () => {
    stopped = true;
    clearInterval(timer);
  };
}
