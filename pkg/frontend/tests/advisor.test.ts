import { describe, expect, it } from "vitest";

import { ApiClient } from "../src/api.js";
import { Advisor, MIN_HAND_HINT, NO_DEALER_HINT } from "../src/advisor.js";
import { renderAdvisor } from "../src/render.js";
import { SessionState } from "../src/state.js";
import { fakeFetch, jsonResponse, MOVES } from "./helpers.js";

function advisorWith(handler: Parameters<typeof fakeFetch>[0]) {
  const { fetchFn, calls } = fakeFetch(handler);
  const advisor = new Advisor(new ApiClient(fetchFn), new SessionState());
  return { advisor, calls };
}

describe("advisor flow", () => {
  it("8,8 vs 10 displays the service's Split. byte-exact", async () => {
    const { advisor } = advisorWith(() => jsonResponse(200, MOVES.split));
    await advisor.addPlayerCard("8");
    await advisor.addPlayerCard("8");
    await advisor.setDealerUpcard("10");
    expect(advisor.state.lastRecommendation?.display).toBe("Split.");
    const html = renderAdvisor(advisor);
    expect(html).toContain(">Split.</div>");
  });

  it("sends no request under two player cards, shows an inline hint", async () => {
    const { advisor, calls } = advisorWith(() => jsonResponse(200, MOVES.hit));
    await advisor.addPlayerCard("8");
    expect(calls.length).toBe(0);
    expect(advisor.hint).toBe(MIN_HAND_HINT);
    expect(renderAdvisor(advisor)).toContain(MIN_HAND_HINT);
  });

  it("waits for the dealer upcard before querying", async () => {
    const { advisor, calls } = advisorWith(() => jsonResponse(200, MOVES.hit));
    await advisor.addPlayerCard("10");
    await advisor.addPlayerCard("6");
    expect(calls.length).toBe(0);
    expect(advisor.hint).toBe(NO_DEALER_HINT);
  });

  it("re-queries after a hit card and shows the next move", async () => {
    let call = 0;
    const { advisor } = advisorWith(() => jsonResponse(200, call++ === 0 ? MOVES.hit : MOVES.stand));
    await advisor.addPlayerCard("10");
    await advisor.addPlayerCard("6");
    await advisor.setDealerUpcard("10");
    expect(advisor.state.lastRecommendation?.display).toBe("Hit.");
    await advisor.recordHitCard("5");
    expect(advisor.state.playerHand).toEqual(["10", "6", "5"]);
    expect(advisor.state.lastRecommendation?.display).toBe("Stand.");
    expect(advisor.state.history.map((h) => h.recommendation.display)).toEqual(["Hit.", "Stand."]);
  });

  it("clearing the hand resets the panel but keeps history", async () => {
    const { advisor } = advisorWith(() => jsonResponse(200, MOVES.split));
    await advisor.addPlayerCard("8");
    await advisor.addPlayerCard("8");
    await advisor.setDealerUpcard("10");
    advisor.clear();
    expect(advisor.state.playerHand).toEqual([]);
    expect(advisor.state.lastRecommendation).toBeNull();
    expect(advisor.hint).toBe(MIN_HAND_HINT);
    expect(advisor.state.history.length).toBe(1);
  });

  it("surfaces 422 as a dismissible banner message", async () => {
    const { advisor } = advisorWith(() => jsonResponse(422, { error: "invalid hand" }));
    advisor.state.addPlayerCard("8");
    advisor.state.addPlayerCard("8");
    advisor.state.setDealerUpcard("10");
    await advisor.refresh();
    expect(advisor.error).toContain("422");
    expect(renderAdvisor(advisor)).toContain("banner error");
  });

  it("discards stale responses that lost the race", async () => {
    let resolveFirst: ((r: Response) => void) | null = null;
    const { fetchFn } = fakeFetch((_, init) => {
      const body = JSON.parse(String(init?.body)) as { player: string[] };
      if (body.player.length === 2) {
        return new Promise<Response>((resolve) => {
          resolveFirst = resolve; // held open until after the second answer
        });
      }
      return jsonResponse(200, MOVES.stand);
    });
    const advisor = new Advisor(new ApiClient(fetchFn), new SessionState());
    advisor.state.addPlayerCard("10");
    advisor.state.addPlayerCard("6");
    advisor.state.setDealerUpcard("10");
    const first = advisor.refresh();
    const second = advisor.recordHitCard("5");
    await second;
    resolveFirst!(jsonResponse(200, MOVES.hit));
    await first;
    expect(advisor.state.lastRecommendation?.display).toBe("Stand.");
    expect(advisor.state.history.length).toBe(1);
  });

  it("never computes strategy locally: the shown string is the response's", async () => {
    const odd = { move: "stand", display: "Stand." };
    const { advisor } = advisorWith(() => jsonResponse(200, odd));
    await advisor.addPlayerCard("8");
    await advisor.addPlayerCard("8");
    await advisor.setDealerUpcard("10");
    // Even for a hand where a chart would say otherwise, the UI echoes
    // the service verbatim.
    expect(advisor.state.lastRecommendation).toEqual(odd);
  });
});
