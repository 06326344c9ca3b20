/**
 * DOM shell: hash navigation between the three views plus event wiring.
 * All decisions and state live in the imported modules.
 */
import { ApiClient, type AnalysisResponse } from "./api.js";
import { Advisor } from "./advisor.js";
import { fitTransform, overlayFromAnalysis, overlaySvg, type OverlayModel } from "./overlay.js";
import { renderAdvisor, renderAnalyzePanel, renderTrainer } from "./render.js";
import { SessionState } from "./state.js";
import { Trainer } from "./trainer.js";

const api = new ApiClient();
const state = new SessionState(window.localStorage);
const advisor = new Advisor(api, state);
const trainer = new Trainer(api, state);

let analyzeImageUrl: string | null = null;
let analyzeOverlay: OverlayModel | null = null;
let analyzeError: string | null = null;
let lastAnalysis: AnalysisResponse | null = null;

const app = document.getElementById("app") as HTMLElement;

function currentView(): string {
  const hash = window.location.hash.replace("#/", "");
  return ["analyze", "advisor", "trainer"].includes(hash) ? hash : "advisor";
}

function render(): void {
  const view = currentView();
  for (const link of document.querySelectorAll("nav a")) {
    link.classList.toggle("active", link.getAttribute("href") === `#/${view}`);
  }
  if (view === "advisor") {
    app.innerHTML = renderAdvisor(advisor);
  } else if (view === "trainer") {
    app.innerHTML = renderTrainer(trainer);
  } else {
    app.innerHTML = `
      <section class="analyze">
        <h2>Analyze a photo</h2>
        <input type="file" id="photo-input" accept="image/png,image/jpeg" />
        <div class="viewer" id="viewer">
          ${analyzeImageUrl ? `<img id="photo" src="${analyzeImageUrl}" alt="table photo" />` : ""}
        </div>
        <div id="analyze-panel">${
          lastAnalysis
            ? renderAnalyzePanel(
                lastAnalysis.recommendation,
                lastAnalysis.player_hand,
                lastAnalysis.dealer_upcard,
                analyzeError,
              )
            : renderAnalyzePanel(null, [], null, analyzeError)
        }</div>
      </section>`;
    const img = document.getElementById("photo") as HTMLImageElement | null;
    if (img && analyzeOverlay) {
      const drawOverlay = () => {
        const viewer = document.getElementById("viewer") as HTMLElement;
        const t = fitTransform(
          analyzeOverlay!.imageWidth,
          analyzeOverlay!.imageHeight,
          img.clientWidth,
          img.clientHeight,
        );
        const old = viewer.querySelector("svg.overlay");
        if (old) old.remove();
        viewer.insertAdjacentHTML("beforeend", overlaySvg(analyzeOverlay!, t));
      };
      if (img.complete) drawOverlay();
      else img.addEventListener("load", drawOverlay, { once: true });
    }
    const input = document.getElementById("photo-input") as HTMLInputElement | null;
    input?.addEventListener("change", async () => {
      const file = input.files?.[0];
      if (!file) return;
      if (analyzeImageUrl) URL.revokeObjectURL(analyzeImageUrl);
      analyzeImageUrl = URL.createObjectURL(file);
      analyzeError = null;
      try {
        const result = await api.analyze(file, file.name);
        lastAnalysis = result;
        const dims = await imageDims(analyzeImageUrl);
        analyzeOverlay = overlayFromAnalysis(result, dims[0], dims[1]);
      } catch (err: any) {
        // Keep the previous overlay; surface the failure as a banner.
        analyzeError = err?.status ? `${err.status}: ${err.message}` : String(err);
      }
      render();
    });
  }
}

function imageDims(url: string): Promise<[number, number]> {
  return new Promise((resolve, reject) => {
    const probe = new Image();
    probe.onload = () => resolve([probe.naturalWidth, probe.naturalHeight]);
    probe.onerror = reject;
    probe.src = url;
  });
}

document.addEventListener("click", async (event) => {
  const target = (event.target as HTMLElement).closest("[data-action]") as HTMLElement | null;
  if (!target) return;
  const action = target.dataset.action;
  const rank = target.dataset.rank ?? "";
  if (action === "add-card") await advisor.addPlayerCard(rank);
  else if (action === "set-dealer") await advisor.setDealerUpcard(rank);
  else if (action === "remove-card") await advisor.removePlayerCard(Number(target.dataset.index));
  else if (action === "clear-hand") advisor.clear();
  else if (action === "trainer-deal") trainer.next();
  else if (action === "trainer-pick") await trainer.grade(target.dataset.move ?? "");
  else if (action === "dismiss-banner") {
    advisor.error = null;
    trainer.error = null;
    analyzeError = null;
  } else if (action === "retry") await advisor.refresh("retry");
  else return;
  render();
});

window.addEventListener("hashchange", render);
window.addEventListener("resize", () => {
  if (currentView() === "analyze") render();
});
render();
