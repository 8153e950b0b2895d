import { readFileSync, readdirSync } from "node:fs";
import { join } from "node:path";

import { describe, expect, it, vi } from "vitest";

import { ServiceClient, PostLike } from "../src/api.js";
import { Controls } from "../src/controls.js";
import { ViewTransform } from "../src/transform.js";
import { PathFile, Point } from "../src/types.js";
import { ViewState } from "../src/view.js";

const FIXTURES = join(__dirname, "..", "fixtures", "paths");
const SHARED = join(__dirname, "..", "..", "src", "ferrosim", "data", "paths");

describe("shared preset path files", () => {
  it("fixture copies byte-equal the canonical shared files", () => {
    const names = readdirSync(FIXTURES).filter((n) => n.endsWith(".json"));
    expect(names.length).toBeGreaterThanOrEqual(8);
    for (const name of names) {
      const fixture = readFileSync(join(FIXTURES, name));
      const shared = readFileSync(join(SHARED, name));
      expect(fixture.equals(shared), `${name} diverged from the shared file`).toBe(true);
    }
  });

  it("parse into well-formed polylines", () => {
    for (const name of readdirSync(FIXTURES)) {
      const file = JSON.parse(readFileSync(join(FIXTURES, name), "utf8")) as PathFile;
      expect(file.points_mm.length).toBeGreaterThan(10);
      expect(file.spacing_mm).toBeCloseTo(0.05, 9);
      for (const [x, y] of file.points_mm) {
        expect(Math.hypot(x, y)).toBeLessThanOrEqual(4.0 + 1e-9);
      }
    }
  });

  it("preset selection posts the file's points verbatim", async () => {
    const circle = JSON.parse(
      readFileSync(join(FIXTURES, "circle.json"), "utf8"),
    ) as PathFile;
    const posts: { url: string; body: unknown }[] = [];
    const post: PostLike = async (url, body) => {
      posts.push({ url, body });
      return new Response("{}", { status: 200 });
    };
    vi.stubGlobal(
      "fetch",
      vi.fn(async (url: string) => {
        expect(url).toBe("/paths/circle.json");
        return new Response(JSON.stringify(circle), { status: 200 });
      }),
    );
    const view = new ViewState();
    const controls = new Controls({
      client: new ServiceClient("", post),
      sessionId: "abc",
      transform: () => new ViewTransform(720, 720, 6.0),
      workspaceRadius: 4.0,
      view,
    });
    const sent = await controls.submitPreset("circle");
    vi.unstubAllGlobals();
    expect(sent).toEqual(circle.points_mm as Point[]);
    const body = posts[0].body as { points: Point[] };
    expect(body.points).toEqual(circle.points_mm);
    expect(view.referencePath).toEqual(circle.points_mm);
  });
});
