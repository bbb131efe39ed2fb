import { ScatterModel, ScatterPoint } from "./model.js";

const W = 420;
const H = 420;
const M = 30;

const SVG_NS = "http://www.w3.org/2000/svg";

type Projector = (x: number, y: number) => [number, number];

const projector = (bounds: [number, number, number, number]): Projector => {
  const [xMin, xMax, yMin, yMax] = bounds;
  return (x, y) => [
    M + ((x - xMin) / (xMax - xMin)) * (W - 2 * M),
    H - M - ((y - yMin) / (yMax - yMin)) * (H - 2 * M),
  ];
};

const el = (tag: string, attrs: Record<string, string>): SVGElement => {
  const node = document.createElementNS(SVG_NS, tag);
  for (const [key, value] of Object.entries(attrs)) {
    node.setAttribute(key, value);
  }
  return node;
};

const pointColor = (p: ScatterPoint): string => {
  const label = p.labeled ? p.label : p.predicted;
  return label === 1 ? "#1f77b4" : "#e8803a";
};

export const renderScatter = (
  model: ScatterModel,
  onSelect: (id: string) => void,
): HTMLElement => {
  const wrap = document.createElement("div");
  wrap.id = "scatter";
  if (model.kind === "empty" || model.bounds === null) {
    const note = document.createElement("p");
    note.className = "placeholder";
    note.textContent =
      "No features selected yet — answer the loop's prompts to add one.";
    wrap.appendChild(note);
    return wrap;
  }

  const svg = el("svg", {
    viewBox: `0 0 ${W} ${H}`,
    width: String(W),
    height: String(H),
    role: "img",
  });
  const project = projector(model.bounds);

  for (const segment of model.boundary ?? []) {
    const path = segment
      .map(([x, y], i) => {
        const [px, py] = project(x, y);
        return `${i === 0 ? "M" : "L"}${px.toFixed(1)},${py.toFixed(1)}`;
      })
      .join(" ");
    svg.appendChild(
      el("path", { d: path, class: "boundary", fill: "none" }),
    );
  }

  for (const p of model.points) {
    const [cx, cy] = project(p.x, p.y);
    if (p.flagged) {
      svg.appendChild(
        el("circle", {
          cx: String(cx),
          cy: String(cy),
          r: "13",
          class: "flag-ring",
        }),
      );
    }
    const classes = ["point"];
    if (p.isError) classes.push("error");
    if (p.selected) classes.push("selected");
    if (!p.labeled) classes.push("unlabeled");
    const dot = el("circle", {
      cx: String(cx),
      cy: String(cy),
      r: "8",
      fill: pointColor(p),
      class: classes.join(" "),
      "data-object-id": p.id,
    });
    dot.addEventListener("click", () => onSelect(p.id));
    const tip = el("title", {});
    tip.textContent = `${p.id} (predicted ${p.predicted})`;
    dot.appendChild(tip);
    svg.appendChild(dot);
  }

  const caption = document.createElement("p");
  caption.className = "axes";
  caption.textContent =
    model.kind === "strip"
      ? `strip: ${model.axes![0]}`
      : `x: ${model.axes![0]}, y: ${model.axes![1]}`;
  wrap.appendChild(svg);
  wrap.appendChild(caption);
  return wrap;
};
