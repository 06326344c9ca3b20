/**
 * Detection overlay geometry. Quads live in image coordinates; the
 * viewport transform letterboxes them into the on-screen box, and the
 * two mappings invert each other to well under a pixel.
 */
import type { AnalysisResponse } from "./api.js";

export interface OverlayItem {
  quad: [number, number][];
  label: string;
  role: string;
  distance: number;
}

export interface OverlayModel {
  imageWidth: number;
  imageHeight: number;
  items: OverlayItem[];
}

export interface ViewportTransform {
  scale: number;
  offsetX: number;
  offsetY: number;
}

export function overlayFromAnalysis(
  response: AnalysisResponse,
  imageWidth: number,
  imageHeight: number,
): OverlayModel {
  return {
    imageWidth,
    imageHeight,
    items: response.detections.map((d) => ({
      quad: d.quad,
      label: d.label,
      role: d.role,
      distance: d.neighbor_distances.length ? Math.min(...d.neighbor_distances) : NaN,
    })),
  };
}

/** Contain-fit: scale to fit, centered with letterboxing. */
export function fitTransform(
  imageWidth: number,
  imageHeight: number,
  viewWidth: number,
  viewHeight: number,
): ViewportTransform {
  const scale = Math.min(viewWidth / imageWidth, viewHeight / imageHeight);
  return {
    scale,
    offsetX: (viewWidth - imageWidth * scale) / 2,
    offsetY: (viewHeight - imageHeight * scale) / 2,
  };
}

export function imageToViewport(p: [number, number], t: ViewportTransform): [number, number] {
  return [p[0] * t.scale + t.offsetX, p[1] * t.scale + t.offsetY];
}

export function viewportToImage(p: [number, number], t: ViewportTransform): [number, number] {
  return [(p[0] - t.offsetX) / t.scale, (p[1] - t.offsetY) / t.scale];
}

const ROLE_CLASS: Record<string, string> = {
  player: "overlay-player",
  dealer: "overlay-dealer",
};

/** SVG markup for the overlay, sized to the viewport box. */
export function overlaySvg(model: OverlayModel, t: ViewportTransform): string {
  const polys = model.items
    .map((item) => {
      const pts = item.quad
        .map((p) => imageToViewport(p, t).map((v) => v.toFixed(1)).join(","))
        .join(" ");
      const cls = ROLE_CLASS[item.role] ?? "overlay-unassigned";
      const anchor = imageToViewport(item.quad[0] ?? [0, 0], t);
      const tag = item.role === "player" || item.role === "dealer"
        ? `${item.label} (${item.role})`
        : item.label;
      return (
        `<polygon class="${cls}" points="${pts}"></polygon>` +
        `<text x="${anchor[0].toFixed(1)}" y="${(anchor[1] - 6).toFixed(1)}">${tag}</text>`
      );
    })
    .join("");
  return `<svg class="overlay" xmlns="http://www.w3.org/2000/svg">${polys}</svg>`;
}
