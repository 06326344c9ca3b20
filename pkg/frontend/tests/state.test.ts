import { describe, expect, it } from "vitest";

import { SessionState } from "../src/state.js";
import { MemoryStorage, MOVES } from "./helpers.js";

describe("SessionState", () => {
  it("tracks the hand and recommendation", () => {
    const state = new SessionState();
    state.addPlayerCard("8");
    state.addPlayerCard("8");
    state.setDealerUpcard("10");
    state.setRecommendation(MOVES.split!);
    expect(state.playerHand).toEqual(["8", "8"]);
    expect(state.lastRecommendation?.display).toBe("Split.");
  });

  it("history is append-only across hand clears", () => {
    const state = new SessionState();
    state.appendHistory({ hand: ["8", "8"], upcard: "10", recommendation: MOVES.split!, action: "query" });
    state.clearHand();
    state.appendHistory({ hand: ["A", "7"], upcard: "6", recommendation: MOVES.double!, action: "query" });
    expect(state.history.length).toBe(2);
    expect(state.history[0]?.hand).toEqual(["8", "8"]);
  });

  it("survives a page refresh via storage", () => {
    const storage = new MemoryStorage();
    const state = new SessionState(storage);
    state.addPlayerCard("10");
    state.addPlayerCard("6");
    state.setDealerUpcard("10");
    state.setRecommendation(MOVES.hit!);
    state.appendHistory({ hand: ["10", "6"], upcard: "10", recommendation: MOVES.hit!, action: "query" });
    state.recordTrainerResult(true);

    const revived = new SessionState(storage);
    expect(revived.playerHand).toEqual(["10", "6"]);
    expect(revived.dealerUpcard).toBe("10");
    expect(revived.lastRecommendation?.display).toBe("Hit.");
    expect(revived.history.length).toBe(1);
    expect(revived.trainerScore).toEqual({ correct: 1, total: 1 });
  });

  it("ignores corrupt snapshots", () => {
    const storage = new MemoryStorage();
    storage.setItem("carp-session", "{broken json");
    const state = new SessionState(storage);
    expect(state.playerHand).toEqual([]);
  });

  it("trainer score only increments on correct answers", () => {
    const state = new SessionState();
    state.recordTrainerResult(true);
    state.recordTrainerResult(false);
    state.recordTrainerResult(true);
    expect(state.trainerScore).toEqual({ correct: 2, total: 3 });
  });
});
