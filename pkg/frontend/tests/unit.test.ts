// @vitest-environment happy-dom
import { describe, expect, it } from "vitest";

import { ApiClient, HttpError } from "../src/api.js";
import { classColor, decodeRle, maskLegend, rasterToRgba } from "../src/masks.js";
import { QuerySequencer, Store, initialState } from "../src/state.js";
import { makeMockServer, queryFixture, sceneFixture } from "./mockServer.js";

describe("ApiClient", () => {
  it("posts query payloads and parses responses", async () => {
    const server = makeMockServer({ queryResponses: [queryFixture(["x"])] });
    const client = new ApiClient("http://svc///", server.fetch);
    const response = await client.query("hello", 7);
    expect(response.results[0].id).toBe("x");
    expect(server.calls[0].url).toBe("http://svc/query");
    expect(server.calls[0].body).toEqual({ text: "hello", top_n: 7 });
  });

  it("raises HttpError with the service detail", async () => {
    const server = makeMockServer({ queryResponses: [{ status: 503, detail: "index not loaded" }] });
    const client = new ApiClient("http://svc", server.fetch);
    await expect(client.query("q", 1)).rejects.toThrowError(HttpError);
    await expect(client.query("q", 1)).rejects.toThrow(/no fixture response queued/);
  });

  it("fetches scenes with and without masks", async () => {
    const server = makeMockServer({ scenes: { s1: sceneFixture("s1") } });
    const client = new ApiClient("http://svc", server.fetch);
    const scene = await client.scene("s1", true);
    expect(scene.track_id).toBe("track-s1");
    expect(server.calls[0].url).toBe("http://svc/scenes/s1?include=masks");
    await expect(client.scene("nope")).rejects.toThrow(/404/);
  });

  it("reports health", async () => {
    const server = makeMockServer({ scenes: { a: sceneFixture("a") } });
    const health = await new ApiClient("http://svc", server.fetch).health();
    expect(health).toEqual({ status: "ok", index_size: 1, model_version: "v1-test" });
  });
});

describe("Store", () => {
  it("history is append-only, most recent first", () => {
    const store = new Store();
    store.recordQuery("first", 5, 1000);
    store.recordQuery("second", 3, 2000);
    expect(store.get().history.map((h) => h.text)).toEqual(["second", "first"]);
  });

  it("results mirror the last successful response; errors preserve them", () => {
    const store = new Store();
    const results = queryFixture(["a", "b"]).results;
    store.applyResults(results, 3.5);
    expect(store.get().results).toBe(results);
    store.applyError("boom");
    expect(store.get().results).toBe(results);
    expect(store.get().error).toBe("boom");
  });

  it("notifies subscribers on every transition", () => {
    const store = new Store();
    let seen = 0;
    const unsubscribe = store.subscribe(() => seen++);
    store.update({ queryText: "x" });
    store.backToGrid();
    unsubscribe();
    store.update({ queryText: "y" });
    expect(seen).toBe(2);
  });

  it("initial state is an empty grid", () => {
    expect(initialState().view).toBe("grid");
    expect(initialState().results).toEqual([]);
  });
});

describe("QuerySequencer", () => {
  it("only the newest sequence number is current", () => {
    const seq = new QuerySequencer();
    const first = seq.begin();
    const second = seq.begin();
    expect(seq.isCurrent(first.seq)).toBe(false);
    expect(seq.isCurrent(second.seq)).toBe(true);
  });

  it("aborts the superseded request's signal", () => {
    const seq = new QuerySequencer();
    const first = seq.begin();
    expect(first.signal.aborted).toBe(false);
    seq.begin();
    expect(first.signal.aborted).toBe(true);
  });
});

describe("mask decoding", () => {
  it("decodes little-endian rle pairs", () => {
    const scene = sceneFixture("s", true);
    const raster = decodeRle(scene.masks!.object.rle, 4, 2);
    expect([...raster]).toEqual([1, 1, 1, 2, 2, 2, 2, 2]);
  });

  it("rejects malformed payloads", () => {
    const scene = sceneFixture("s", true);
    expect(() => decodeRle(scene.masks!.object.rle, 3, 2)).toThrow(/run lengths/);
    expect(() => decodeRle(btoa("abc"), 1, 1)).toThrow(/whole pairs/);
  });

  it("colors are stable and void stays transparent", () => {
    expect(classColor(0)).toEqual([0, 0, 0, 0]);
    expect(classColor(3)).toEqual(classColor(3));
    expect(classColor(3)).not.toEqual(classColor(4));
    const rgba = rasterToRgba(new Uint16Array([0, 3]));
    expect(rgba[3]).toBe(0);
    expect(rgba[7]).toBeGreaterThan(0);
  });

  it("legend lists only the classes present", () => {
    const raster = new Uint16Array([0, 1, 1, 2]);
    const legend = maskLegend(raster, { "1": "person", "2": "car", "9": "bus" });
    expect(legend.map((l) => l.name)).toEqual(["person", "car"]);
  });
});
