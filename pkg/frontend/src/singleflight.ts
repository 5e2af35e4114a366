// One in-flight upload at a time, mirroring the server's 429 policy: a
// second attempt fails fast client-side instead of burning the round trip.

export class UploadBusy extends Error {
  constructor() {
    super("an upload is already in flight");
    this.name = "UploadBusy";
  }
}

export class SingleFlight {
  private busy = false;

  get inFlight(): boolean {
    return this.busy;
  }

  async run<T>(fn: () => Promise<T>): Promise<T> {
    if (this.busy) throw new UploadBusy();
    this.busy = true;
    try {
      return await fn();
    } finally {
      this.busy = false;
    }
  }
}
