/** Minimal deterministic SVG document builder. */

export type Attrs = Record<string, string | number>;

function escapeText(value: string): string {
  return value
    .replace(/&/g, "&amp;")
    .replace(/</g, "&lt;")
    .replace(/>/g, "&gt;")
    .replace(/"/g, "&quot;");
}

function attrString(attrs: Attrs): string {
  return Object.entries(attrs)
    .map(([key, value]) => ` ${key}="${escapeText(String(value))}"`)
    .join("");
}

export class SvgDoc {
  private parts: string[] = [];

  constructor(
    readonly width: number,
    readonly height: number,
  ) {}

  element(tag: string, attrs: Attrs, text?: string): void {
    if (text === undefined) {
      this.parts.push(`<${tag}${attrString(attrs)}/>`);
    } else {
      this.parts.push(`<${tag}${attrString(attrs)}>${escapeText(text)}</${tag}>`);
    }
  }

  line(x1: number, y1: number, x2: number, y2: number, attrs: Attrs = {}): void {
    this.element("line", { x1: r(x1), y1: r(y1), x2: r(x2), y2: r(y2), ...attrs });
  }

  text(x: number, y: number, content: string, attrs: Attrs = {}): void {
    this.element(
      "text",
      { x: r(x), y: r(y), "font-family": "monospace", "font-size": 11, ...attrs },
      content,
    );
  }

  polyline(points: Array<[number, number]>, attrs: Attrs = {}): void {
    const pts = points.map(([x, y]) => `${r(x)},${r(y)}`).join(" ");
    this.element("polyline", { points: pts, fill: "none", ...attrs });
  }

  rect(x: number, y: number, w: number, h: number, attrs: Attrs = {}): void {
    this.element("rect", { x: r(x), y: r(y), width: r(w), height: r(h), ...attrs });
  }

  circle(cx: number, cy: number, radius: number, attrs: Attrs = {}): void {
    this.element("circle", { cx: r(cx), cy: r(cy), r: radius, ...attrs });
  }

  render(): string {
    return (
      `<svg xmlns="http://www.w3.org/2000/svg" width="${this.width}" ` +
      `height="${this.height}" viewBox="0 0 ${this.width} ${this.height}">\n` +
      this.parts.join("\n") +
      "\n</svg>\n"
    );
  }
}

function r(value: number): string {
  return Number(value.toFixed(3)).toString();
}
