import { describe, expect, it } from "vitest";

import { SseParser } from "../src/api.js";

describe("SseParser", () => {
  it("parses a complete frame", () => {
    const parser = new SseParser();
    const frames = parser.push('event: snapshot\ndata: {"pending": []}\n\n');
    expect(frames).toEqual([{ kind: "snapshot", data: '{"pending": []}' }]);
  });

  it("buffers frames split at arbitrary byte boundaries", () => {
    const parser = new SseParser();
    const whole = 'event: ticket_created\ndata: {"a": 1}\n\n';
    let collected: unknown[] = [];
    for (const ch of whole) collected = collected.concat(parser.push(ch));
    expect(collected).toEqual([{ kind: "ticket_created", data: '{"a": 1}' }]);
  });

  it("emits multiple frames from one chunk", () => {
    const parser = new SseParser();
    const frames = parser.push(
      "event: a\ndata: 1\n\nevent: b\ndata: 2\n\n",
    );
    expect(frames.map((f) => f.kind)).toEqual(["a", "b"]);
    expect(frames.map((f) => f.data)).toEqual(["1", "2"]);
  });

  it("joins multi-line data with newlines", () => {
    const parser = new SseParser();
    const frames = parser.push("data: first\ndata: second\n\n");
    expect(frames).toEqual([{ kind: "message", data: "first\nsecond" }]);
  });

  it("drops comment keepalives without emitting", () => {
    const parser = new SseParser();
    expect(parser.push(": keepalive\n\n")).toEqual([]);
    // and a frame after a keepalive still parses
    expect(parser.push("event: x\ndata: y\n\n")).toEqual([
      { kind: "x", data: "y" },
    ]);
  });

  it("defaults the event kind to message", () => {
    const parser = new SseParser();
    expect(parser.push("data: hello\n\n")).toEqual([
      { kind: "message", data: "hello" },
    ]);
  });

  it("tolerates CRLF line endings", () => {
    const parser = new SseParser();
    expect(parser.push("event: x\r\ndata: y\r\n\r\n")).toEqual([
      { kind: "x", data: "y" },
    ]);
  });

  it("strips only one leading space from values", () => {
    const parser = new SseParser();
    expect(parser.push("data:  padded\n\n")).toEqual([
      { kind: "message", data: " padded" },
    ]);
  });

  it("ignores event-only frames with no data", () => {
    const parser = new SseParser();
    expect(parser.push("event: ping\n\n")).toEqual([]);
  });

  it("keeps an incomplete trailing frame buffered", () => {
    const parser = new SseParser();
    expect(parser.push("event: x\ndata: y")).toEqual([]);
    expect(parser.push("\n\n")).toEqual([{ kind: "x", data: "y" }]);
  });
});
