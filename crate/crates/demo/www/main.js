import init, { scenarioCells, sourcingCurve, wageSweep } from "./pkg/chainrisk_demo.js";

const NS = "http://www.w3.org/2000/svg";
const $ = (id) => document.getElementById(id);
const num = (id) => Number($(id).value);

function el(name, attrs, parent) {
  const e = document.createElementNS(NS, name);
  for (const [k, v] of Object.entries(attrs)) e.setAttribute(k, v);
  if (parent) parent.appendChild(e);
  return e;
}

// series: [{ xs, ys, stroke, dash, markers, label }]
function lineChart(title, series, { width = 300, height = 200, yMin = 0, yMax } = {}) {
  const pad = { l: 40, r: 10, t: 22, b: 24 };
  const xs = series.flatMap((s) => s.xs);
  const ys = series.flatMap((s) => s.ys);
  const x0 = Math.min(...xs), x1 = Math.max(...xs);
  const top = yMax ?? (Math.max(...ys) * 1.1 || 1);
  const sx = (x) => pad.l + ((x - x0) / (x1 - x0 || 1)) * (width - pad.l - pad.r);
  const sy = (y) => height - pad.b - ((y - yMin) / (top - yMin || 1)) * (height - pad.t - pad.b);

  const svg = el("svg", { width, height, viewBox: `0 0 ${width} ${height}`, "font-size": 10 });
  el("text", { x: width / 2, y: 14, "text-anchor": "middle" }, svg).textContent = title;
  el("line", { x1: pad.l, y1: sy(yMin), x2: width - pad.r, y2: sy(yMin), stroke: "black" }, svg);
  el("line", { x1: pad.l, y1: sy(yMin), x2: pad.l, y2: pad.t, stroke: "black" }, svg);
  for (const v of [yMin, (yMin + top) / 2, top]) {
    el("text", { x: pad.l - 4, y: sy(v) + 3, "text-anchor": "end" }, svg).textContent = +v.toFixed(2);
  }
  for (const v of [x0, x1]) {
    el("text", { x: sx(v), y: height - 8, "text-anchor": "middle" }, svg).textContent = +v.toFixed(2);
  }
  series.forEach((s, k) => {
    const pts = s.xs.map((x, i) => `${sx(x).toFixed(1)},${sy(s.ys[i]).toFixed(1)}`).join(" ");
    el("polyline", { points: pts, fill: "none", stroke: s.stroke, "stroke-width": 1.5, "stroke-dasharray": s.dash ?? "" }, svg);
    if (s.markers) {
      s.xs.forEach((x, i) => el("rect", { x: sx(x) - 2, y: sy(s.ys[i]) - 2, width: 4, height: 4, fill: s.stroke }, svg));
    }
    if (s.label) {
      el("text", { x: width - pad.r - 4, y: pad.t + 10 + 11 * k, "text-anchor": "end", fill: s.stroke }, svg).textContent = s.label;
    }
  });
  return svg;
}

function guarded(errId, f) {
  return () => {
    $(errId).textContent = "";
    try {
      f();
    } catch (e) {
      $(errId).textContent = String(e);
    }
  };
}

function runCells() {
  const cells = scenarioCells($("config").value);
  const out = $("cells");
  out.replaceChildren();
  const top = Math.max(...cells.flatMap((c) => c.total)) * 1.1;
  for (const c of cells) {
    const xs = c.total.map((_, i) => i + 1);
    out.appendChild(
      lineChart(`${c.name} (South ${c.south_share.toFixed(2)})`, [
        { xs, ys: c.east, stroke: "#808080", dash: "5 3" },
        { xs, ys: c.south, stroke: "black", markers: true },
        { xs, ys: c.total, stroke: "#d62728" },
      ], { yMax: top })
    );
  }
}

function runCurve() {
  const pts = sourcingCurve({
    rho_min: 0.25,
    rho_max: 6,
    steps: 24,
    eta: num("c-eta"),
    zeta: num("c-zeta"),
    zeta_lo: num("c-lo"),
    zeta_hi: num("c-hi"),
    suppliers: num("c-m"),
    south_technology: num("c-t"),
  });
  const xs = pts.map((p) => p.rho);
  $("curve").replaceChildren(
    lineChart("South share of upstream suppliers against rho", [
      { xs, ys: pts.map((p) => p.risk), stroke: "#d62728", label: "planner, risk" },
      { xs, ys: pts.map((p) => p.ambiguity), stroke: "black", markers: true, label: "planner, ambiguity" },
      { xs, ys: pts.map((p) => p.individual), stroke: "#808080", dash: "5 3", label: "individual" },
    ], { width: 600, height: 300, yMax: 1 })
  );
}

function runWages() {
  const pts = wageSweep({
    technology_min: num("w-lo"),
    technology_max: num("w-hi"),
    steps: 31,
    trade_cost: num("w-tau"),
  });
  const xs = pts.map((p) => p.technology);
  $("wages").replaceChildren(
    lineChart("Wages (world income 1) against South technology", [
      { xs, ys: pts.map((p) => p.wage_east), stroke: "#808080", dash: "5 3", label: "East wage" },
      { xs, ys: pts.map((p) => p.wage_south), stroke: "black", markers: true, label: "South wage" },
    ], { width: 600, height: 300 }),
    lineChart("Real wages against South technology", [
      { xs, ys: pts.map((p) => p.real_wage_east), stroke: "#808080", dash: "5 3", label: "East" },
      { xs, ys: pts.map((p) => p.real_wage_south), stroke: "black", markers: true, label: "South" },
    ], { width: 600, height: 300 })
  );
}

await init();
$("status").textContent = "";
$("run-cells").onclick = guarded("cells-error", runCells);
$("run-curve").onclick = guarded("curve-error", runCurve);
$("run-wages").onclick = guarded("wages-error", runWages);
guarded("cells-error", runCells)();
guarded("curve-error", runCurve)();
guarded("wages-error", runWages)();
