/**
 * HTML renderers for the three views. Pure string builders so the view
 * logic is testable without a DOM; main.ts swaps them into the page.
 */
import type { Recommendation } from "./api.js";
import type { Advisor } from "./advisor.js";
import type { SessionState } from "./state.js";
import { Trainer, USER_MOVES } from "./trainer.js";

export function escapeHtml(text: string): string {
  // The apostrophe is deliberately left alone so move strings like
  // "Don't split." render byte-exact.
  return text.replace(/&/g, "&amp;").replace(/</g, "&lt;").replace(/>/g, "&gt;").replace(/"/g, "&quot;");
}

export const PALETTE_RANKS = ["2", "3", "4", "5", "6", "7", "8", "9", "10", "J", "Q", "K", "A"];

export function renderMove(rec: Recommendation | null, hint: string | null): string {
  if (rec) {
    return `<div class="move-display" data-move="${escapeHtml(rec.move)}">${escapeHtml(rec.display)}</div>`;
  }
  if (hint) {
    return `<div class="move-hint">${escapeHtml(hint)}</div>`;
  }
  return `<div class="move-hint">Waiting for cards.</div>`;
}

export function renderErrorBanner(message: string | null): string {
  if (!message) return "";
  return (
    `<div class="banner error" role="alert">${escapeHtml(message)}` +
    `<button data-action="dismiss-banner">x</button>` +
    `<button data-action="retry">retry</button></div>`
  );
}

function rankButtons(action: string): string {
  return PALETTE_RANKS.map(
    (r) => `<button data-action="${action}" data-rank="${r}">${r}</button>`,
  ).join("");
}

export function renderAdvisor(advisor: Advisor): string {
  const state = advisor.state;
  const hand = state.playerHand
    .map(
      (r, i) =>
        `<span class="card-chip">${escapeHtml(r)}` +
        `<button data-action="remove-card" data-index="${i}">x</button></span>`,
    )
    .join("");
  const dealer = state.dealerUpcard
    ? `<span class="card-chip dealer">${escapeHtml(state.dealerUpcard)}</span>`
    : `<span class="placeholder">none</span>`;
  const history = [...state.history]
    .slice(-8)
    .reverse()
    .map(
      (h) =>
        `<li>${h.hand.join(",")} vs ${h.upcard ?? "?"} &rarr; ` +
        `${escapeHtml(h.recommendation.display)} <em>(${escapeHtml(h.action)})</em></li>`,
    )
    .join("");
  return `
  <section class="advisor">
    ${renderErrorBanner(advisor.error)}
    <h2>Advisor</h2>
    <div class="palette"><h3>Add player card</h3>${rankButtons("add-card")}</div>
    <div class="palette"><h3>Dealer upcard</h3>${rankButtons("set-dealer")}</div>
    <div class="hand-row"><h3>Player hand</h3>${hand || '<span class="placeholder">empty</span>'}</div>
    <div class="hand-row"><h3>Dealer shows</h3>${dealer}</div>
    ${renderMove(state.lastRecommendation, advisor.hint)}
    <div class="actions">
      <button data-action="clear-hand">Clear hand</button>
    </div>
    <div class="history"><h3>History</h3><ol>${history}</ol></div>
  </section>`;
}

export function renderTrainer(trainer: Trainer): string {
  const score = trainer.state.trainerScore;
  let round = `<button data-action="trainer-deal">Deal</button>`;
  if (trainer.current) {
    const moves = USER_MOVES.map(
      (m) => `<button data-action="trainer-pick" data-move="${m.move}">${escapeHtml(m.label)}</button>`,
    ).join("");
    round = `
      <div class="trainer-round">
        <p>You hold <strong>${trainer.current.player.join(", ")}</strong>
           against dealer <strong>${trainer.current.dealer}</strong>.</p>
        <div class="palette">${moves}</div>
      </div>`;
  }
  let verdict = "";
  if (trainer.lastGrade) {
    const g = trainer.lastGrade;
    verdict = `
      <div class="verdict ${g.correct ? "correct" : "incorrect"}">
        <p>${g.correct ? "Correct." : "Incorrect."}</p>
        <p>Engine says: <span class="move-display">${escapeHtml(g.engine.display)}</span></p>
        <button data-action="trainer-deal">Next hand</button>
      </div>`;
  }
  return `
  <section class="trainer">
    ${renderErrorBanner(trainer.error)}
    <h2>Trainer</h2>
    <p class="score">Score: ${score.correct} / ${score.total}</p>
    ${round}
    ${verdict}
  </section>`;
}

export function renderAnalyzePanel(
  recommendation: Recommendation | null,
  playerHand: string[],
  dealerUpcard: string | null,
  error: string | null,
): string {
  const hand = playerHand.length ? playerHand.join(", ") : "none detected";
  return `
  <section class="analyze-panel">
    ${renderErrorBanner(error)}
    <p>Player hand: <strong>${escapeHtml(hand)}</strong></p>
    <p>Dealer upcard: <strong>${escapeHtml(dealerUpcard ?? "not visible")}</strong></p>
    ${renderMove(recommendation, recommendation ? null : "No recommendation for this scene.")}
  </section>`;
}
