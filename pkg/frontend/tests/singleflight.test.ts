import { describe, expect, it } from "vitest";

import { SingleFlight, UploadBusy } from "../src/singleflight";

function deferred<T>(): { promise: Promise<T>; resolve: (v: T) => void; reject: (e: unknown) => void } {
  let resolve!: (v: T) => void;
  let reject!: (e: unknown) => void;
  const promise = new Promise<T>((res, rej) => {
    resolve = res;
    reject = rej;
  });
  return { promise, resolve, reject };
}

describe("SingleFlight", () => {
  it("rejects a second call while the first is in flight", async () => {
    const gate = new SingleFlight();
    const first = deferred<string>();
    const running = gate.run(() => first.promise);
    expect(gate.inFlight).toBe(true);
    await expect(gate.run(() => Promise.resolve("second"))).rejects.toThrow(UploadBusy);
    first.resolve("first");
    expect(await running).toBe("first");
    expect(gate.inFlight).toBe(false);
  });

  it("allows a new call after the previous one settles", async () => {
    const gate = new SingleFlight();
    await gate.run(() => Promise.resolve(1));
    expect(await gate.run(() => Promise.resolve(2))).toBe(2);
  });

  it("releases the slot when the task throws", async () => {
    const gate = new SingleFlight();
    await expect(gate.run(() => Promise.reject(new Error("boom")))).rejects.toThrow("boom");
    expect(gate.inFlight).toBe(false);
    expect(await gate.run(() => Promise.resolve("ok"))).toBe("ok");
  });
});
