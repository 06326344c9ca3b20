/**
 * Session state: the current hand, the last service recommendation, an
 * append-only decision history, and the trainer score. Persists through
 * page refreshes via storage (localStorage in the browser, anything
 * storage-shaped in tests).
 */
import type { Recommendation } from "./api.js";

export interface HistoryEntry {
  hand: string[];
  upcard: string | null;
  recommendation: Recommendation;
  action: string;
}

export interface TrainerScore {
  correct: number;
  total: number;
}

export interface StorageLike {
  getItem(key: string): string | null;
  setItem(key: string, value: string): void;
}

interface Snapshot {
  playerHand: string[];
  dealerUpcard: string | null;
  lastRecommendation: Recommendation | null;
  history: HistoryEntry[];
  trainerScore: TrainerScore;
}

const STORAGE_KEY = "carp-session";

export class SessionState {
  playerHand: string[] = [];
  dealerUpcard: string | null = null;
  lastRecommendation: Recommendation | null = null;
  private readonly _history: HistoryEntry[] = [];
  private _score: TrainerScore = { correct: 0, total: 0 };

  constructor(
    private readonly storage?: StorageLike,
    private readonly key = STORAGE_KEY,
  ) {
    this.restore();
  }

  get history(): readonly HistoryEntry[] {
    return this._history;
  }

  get trainerScore(): TrainerScore {
    return { ...this._score };
  }

  addPlayerCard(rank: string): void {
    this.playerHand = [...this.playerHand, rank];
    this.persist();
  }

  removePlayerCard(index: number): void {
    this.playerHand = this.playerHand.filter((_, i) => i !== index);
    this.persist();
  }

  setDealerUpcard(rank: string | null): void {
    this.dealerUpcard = rank;
    this.persist();
  }

  setRecommendation(rec: Recommendation | null): void {
    this.lastRecommendation = rec;
    this.persist();
  }

  /** History never shrinks; every decision the user saw is retained. */
  appendHistory(entry: HistoryEntry): void {
    this._history.push(entry);
    this.persist();
  }

  recordTrainerResult(correct: boolean): TrainerScore {
    this._score = {
      correct: this._score.correct + (correct ? 1 : 0),
      total: this._score.total + 1,
    };
    this.persist();
    return this.trainerScore;
  }

  clearHand(): void {
    this.playerHand = [];
    this.dealerUpcard = null;
    this.lastRecommendation = null;
    this.persist();
  }

  private persist(): void {
    if (!this.storage) return;
    const snapshot: Snapshot = {
      playerHand: this.playerHand,
      dealerUpcard: this.dealerUpcard,
      lastRecommendation: this.lastRecommendation,
      history: this._history,
      trainerScore: this._score,
    };
    this.storage.setItem(this.key, JSON.stringify(snapshot));
  }

  private restore(): void {
    if (!this.storage) return;
    const raw = this.storage.getItem(this.key);
    if (!raw) return;
    try {
      const snap = JSON.parse(raw) as Snapshot;
      this.playerHand = snap.playerHand ?? [];
      this.dealerUpcard = snap.dealerUpcard ?? null;
      this.lastRecommendation = snap.lastRecommendation ?? null;
      this._history.push(...(snap.history ?? []));
      this._score = snap.trainerScore ?? { correct: 0, total: 0 };
    } catch {
      // Corrupt snapshots reset the session rather than crash the app.
    }
  }
}
