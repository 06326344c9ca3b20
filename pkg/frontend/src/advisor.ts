/**
 * Manual-entry decision loop: pick player cards and the dealer upcard,
 * get the engine's move after every change, add the drawn card after a
 * hit and ask again. Responses superseded by a newer edit are discarded
 * by sequence number.
 */
import { ApiClient, ApiError, type Recommendation } from "./api.js";
import type { SessionState } from "./state.js";

export const MIN_HAND_HINT = "Add at least two player cards.";
export const NO_DEALER_HINT = "Pick the dealer upcard.";

export class Advisor {
  hint: string | null = MIN_HAND_HINT;
  error: string | null = null;
  private seq = 0;

  constructor(
    private readonly api: ApiClient,
    readonly state: SessionState,
  ) {}

  async addPlayerCard(rank: string): Promise<Recommendation | null> {
    this.state.addPlayerCard(rank);
    return this.refresh(`added ${rank}`);
  }

  async removePlayerCard(index: number): Promise<Recommendation | null> {
    this.state.removePlayerCard(index);
    return this.refresh("removed a card");
  }

  async setDealerUpcard(rank: string): Promise<Recommendation | null> {
    this.state.setDealerUpcard(rank);
    return this.refresh(`dealer ${rank}`);
  }

  /** After a hit the drawn card joins the hand and the next move appears. */
  async recordHitCard(rank: string): Promise<Recommendation | null> {
    this.state.addPlayerCard(rank);
    return this.refresh(`hit, drew ${rank}`);
  }

  clear(): void {
    this.seq += 1; // in-flight responses become stale
    this.state.clearHand();
    this.hint = MIN_HAND_HINT;
    this.error = null;
  }

  /**
   * Re-query the service for the current state. Under two player cards
   * or without an upcard no request is sent, only an inline hint.
   */
  async refresh(action = "query"): Promise<Recommendation | null> {
    this.error = null;
    const mySeq = ++this.seq;
    if (this.state.playerHand.length < 2) {
      this.hint = MIN_HAND_HINT;
      this.state.setRecommendation(null);
      return null;
    }
    if (!this.state.dealerUpcard) {
      this.hint = NO_DEALER_HINT;
      this.state.setRecommendation(null);
      return null;
    }
    this.hint = null;
    try {
      const rec = await this.api.recommend(this.state.playerHand, this.state.dealerUpcard);
      if (mySeq !== this.seq) return null; // superseded by a newer action
      this.state.setRecommendation(rec);
      this.state.appendHistory({
        hand: [...this.state.playerHand],
        upcard: this.state.dealerUpcard,
        recommendation: rec,
        action,
      });
      return rec;
    } catch (err) {
      if (mySeq !== this.seq) return null;
      this.error = err instanceof ApiError ? `${err.status || "network"}: ${err.message}` : String(err);
      return null;
    }
  }
}
