/**
 * Drill mode: deal a random hand, let the user commit to a move, then
 * grade it against the engine's answer. The deal stream is seeded so a
 * session can be replayed.
 */
import { ApiClient, type Recommendation } from "./api.js";
import type { SessionState } from "./state.js";

export const DEAL_RANKS = ["2", "3", "4", "5", "6", "7", "8", "9", "10", "A"] as const;

/** Moves the user can commit to; display text mirrors the engine's. */
export const USER_MOVES: { move: string; label: string }[] = [
  { move: "hit", label: "Hit." },
  { move: "stand", label: "Stand." },
  { move: "double", label: "Double." },
  { move: "split", label: "Split." },
  { move: "dont_split", label: "Don't split." },
  { move: "double_down_split_else_hit", label: "Double Down Split. If not possible, then hit." },
];

export interface TrainerRound {
  player: [string, string];
  dealer: string;
}

export interface GradeResult {
  correct: boolean;
  engine: Recommendation;
  score: { correct: number; total: number };
}

export function mulberry32(seed: number): () => number {
  let a = seed >>> 0;
  return () => {
    a = (a + 0x6d2b79f5) | 0;
    let t = Math.imul(a ^ (a >>> 15), 1 | a);
    t = (t + Math.imul(t ^ (t >>> 7), 61 | t)) ^ t;
    return ((t ^ (t >>> 14)) >>> 0) / 4294967296;
  };
}

export function dealRound(rand: () => number): TrainerRound {
  const pick = () => DEAL_RANKS[Math.floor(rand() * DEAL_RANKS.length)] as string;
  for (;;) {
    const player: [string, string] = [pick(), pick()];
    // A dealt blackjack has no move to practice; redraw.
    if (player.includes("A") && player.includes("10")) continue;
    return { player, dealer: pick() };
  }
}

export class Trainer {
  current: TrainerRound | null = null;
  lastGrade: GradeResult | null = null;
  error: string | null = null;
  private readonly rand: () => number;

  constructor(
    private readonly api: ApiClient,
    readonly state: SessionState,
    seed = Date.now() & 0x7fffffff,
  ) {
    this.rand = mulberry32(seed);
  }

  next(): TrainerRound {
    this.current = dealRound(this.rand);
    this.lastGrade = null;
    this.error = null;
    return this.current;
  }

  /** Fetch the engine's move for the dealt round and grade the pick. */
  async grade(userMove: string): Promise<GradeResult | null> {
    if (!this.current) return null;
    try {
      const engine = await this.api.recommend(this.current.player, this.current.dealer);
      const correct = engine.move === userMove;
      const score = this.state.recordTrainerResult(correct);
      this.state.appendHistory({
        hand: [...this.current.player],
        upcard: this.current.dealer,
        recommendation: engine,
        action: `trainer picked ${userMove}`,
      });
      this.lastGrade = { correct, engine, score };
      this.error = null;
      return this.lastGrade;
    } catch (err) {
      this.error = String(err);
      return null;
    }
  }
}
