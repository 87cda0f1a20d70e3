// Pure viewBox arithmetic for SVG pan/zoom; the DOM binding lives in ui.ts.

export interface ViewBox {
  x: number;
  y: number;
  w: number;
  h: number;
}

export function format(vb: ViewBox): string {
  return `${vb.x} ${vb.y} ${vb.w} ${vb.h}`;
}

export function pan(vb: ViewBox, dxPx: number, dyPx: number, widthPx: number, heightPx: number): ViewBox {
  return {
    ...vb,
    x: vb.x - (dxPx * vb.w) / widthPx,
    y: vb.y - (dyPx * vb.h) / heightPx,
  };
}

/**
 * Zoom by `factor` (>1 zooms out) keeping the point under the cursor fixed.
 * fx/fy are the cursor position as fractions of the viewport.
 */
export function zoom(vb: ViewBox, factor: number, fx: number, fy: number): ViewBox {
  const mx = vb.x + fx * vb.w;
  const my = vb.y + fy * vb.h;
  const w = vb.w * factor;
  const h = vb.h * factor;
  return { x: mx - fx * w, y: my - fy * h, w, h };
}

const VIEWBOX_RE = /viewBox="([\d.\s-]+)"/;

export function initialViewBox(svgText: string): ViewBox {
  const match = VIEWBOX_RE.exec(svgText);
  if (match && match[1]) {
    const parts = match[1].trim().split(/\s+/).map(Number);
    if (parts.length === 4 && parts.every((n) => Number.isFinite(n))) {
      return { x: parts[0]!, y: parts[1]!, w: parts[2]!, h: parts[3]! };
    }
  }
  return { x: 0, y: 0, w: 800, h: 600 };
}
