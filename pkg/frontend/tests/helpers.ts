import type { FetchLike } from "../src/api.js";
import type { StorageLike } from "../src/state.js";

export class MemoryStorage implements StorageLike {
  private store = new Map<string, string>();

  getItem(key: string): string | null {
    return this.store.get(key) ?? null;
  }

  setItem(key: string, value: string): void {
    this.store.set(key, value);
  }
}

export function jsonResponse(status: number, body: unknown): Response {
  return new Response(JSON.stringify(body), {
    status,
    headers: { "content-type": "application/json" },
  });
}

export interface RecordedCall {
  path: string;
  init?: RequestInit;
}

/** fetch stub that answers from a handler and records every call. */
export function fakeFetch(
  handler: (path: string, init?: RequestInit) => Response | Promise<Response>,
): { fetchFn: FetchLike; calls: RecordedCall[] } {
  const calls: RecordedCall[] = [];
  const fetchFn: FetchLike = async (path, init) => {
    calls.push({ path, init });
    return handler(path, init);
  };
  return { fetchFn, calls };
}

/** The service's own payload for a given engine move. */
export const MOVES: Record<string, { move: string; display: string }> = {
  hit: { move: "hit", display: "Hit." },
  stand: { move: "stand", display: "Stand." },
  double: { move: "double", display: "Double." },
  split: { move: "split", display: "Split." },
  dont_split: { move: "dont_split", display: "Don't split." },
  dds: { move: "double_down_split_else_hit", display: "Double Down Split. If not possible, then hit." },
  blackjack: { move: "blackjack_win", display: "Blackjack, you win!" },
};
