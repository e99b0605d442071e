import { beforeEach, describe, expect, it } from "vitest";

import { ApiClient } from "../src/api.js";
import { TreeView } from "../src/treeView.js";
import { FakeServer } from "./fakeServer.js";

let server: FakeServer;
let api: ApiClient;

beforeEach(() => {
  server = new FakeServer();
  api = new ApiClient("", server.fetch);
});

describe("tree view", () => {
  it("loads both trees", async () => {
    const view = new TreeView(api, "demo", "sa", "sb");
    await view.load();
    expect(view.state.leftTree?.roots.map((r) => r.name)).toEqual([
      "All_Event_Vitals",
      "Person_Master",
    ]);
    expect(view.state.rightTree?.roots).toHaveLength(2);
  });

  it("slider at maximum shows no lines", async () => {
    const view = new TreeView(api, "demo", "sa", "sb");
    await view.load();
    await view.setMinScore(0.99);
    expect(view.state.lines).toEqual([]);
    expect(view.state.capExceeded).toBe(false);
  });

  it("sub-tree selection renders only lines originating inside it", async () => {
    const view = new TreeView(api, "demo", "sa", "sb");
    await view.load();
    await view.setMinScore(-1);
    await view.selectSubtree("sa:1");
    expect(view.state.capExceeded).toBe(false);
    expect(view.state.lines.length).toBeGreaterThan(0);
    const inside = new Set(["sa:1", "sa:2", "sa:3"]);
    expect(view.state.lines.every((l) => inside.has(l.leftId))).toBe(true);
    const html = view.render();
    expect(html).toContain('data-left="sa:2"');
    expect(html).not.toContain('data-left="sa:4"');
    expect(html).not.toContain('data-left="sa:5"');
  });

  it("clearing the selection restores the full line set", async () => {
    const view = new TreeView(api, "demo", "sa", "sb");
    await view.load();
    await view.setMinScore(0.5);
    const fullCount = view.state.lines.length;
    await view.selectSubtree("sa:4");
    expect(view.state.lines.length).toBeLessThan(fullCount);
    await view.selectSubtree(null);
    expect(view.state.lines.length).toBe(fullCount);
  });

  it("depth selector restricts lines to shallow nodes", async () => {
    const view = new TreeView(api, "demo", "sa", "sb");
    await view.load();
    await view.setMinScore(-1);
    await view.setDepthMax(1);
    const roots = new Set(["sa:1", "sa:4"]);
    expect(view.state.lines.length).toBe(4); // 2 left roots x 2 right roots
    expect(view.state.lines.every((l) => roots.has(l.leftId))).toBe(true);
  });

  it("refuses to draw beyond the line cap and prompts for narrowing", async () => {
    const view = new TreeView(api, "demo", "sa", "sb", 3);
    await view.load();
    await view.setMinScore(-1); // all 25 links pass
    expect(view.state.capExceeded).toBe(true);
    expect(view.state.lines).toEqual([]);
    const html = view.render();
    expect(html).toContain("narrow your filters");
    expect(html).not.toContain('class="line"');
  });

  it("marks selected sub-tree in the rendered tree", async () => {
    const view = new TreeView(api, "demo", "sa", "sb");
    await view.load();
    await view.selectSubtree("sa:1");
    expect(view.render()).toContain("selected");
  });
});
