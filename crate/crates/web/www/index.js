import init, { expansion_curve, cone_map, constants_table } from "./pkg/statphase_web.js";

const $ = (id) => document.getElementById(id);
const num = (id) => parseFloat($(id).value);

const COLORS = { oracle_abs: "#1f77b4", expansion_abs: "#2ca02c", abs_error: "#d62728", bound: "#ff7f0e" };
const REGION_COLORS = {
  inside_cone: "#2ca02c", left_outside: "#1f77b4", right_outside: "#9467bd",
  critical_left: "#d62728", critical_right: "#8c564b", unclassified: "#bbb",
};

// axes over [x0,x1]×[y0,y1]; returns a mapping into canvas pixels
function frame(ctx, x0, x1, y0, y1, xlabel, logx) {
  const { width: w, height: h } = ctx.canvas;
  const m = { l: 60, r: 150, t: 10, b: 30 };
  ctx.clearRect(0, 0, w, h);
  ctx.strokeStyle = "#999";
  ctx.strokeRect(m.l, m.t, w - m.l - m.r, h - m.t - m.b);
  ctx.fillStyle = "#444";
  ctx.font = "11px sans-serif";
  const px = (x) => m.l + ((x - x0) / (x1 - x0)) * (w - m.l - m.r);
  const py = (y) => h - m.b - ((y - y0) / (y1 - y0)) * (h - m.t - m.b);
  for (let k = Math.ceil(y0); k <= Math.floor(y1); k++) ctx.fillText("1e" + k, 20, py(k) + 4);
  if (logx) for (let k = Math.ceil(x0); k <= Math.floor(x1); k++) ctx.fillText("1e" + k, px(k) - 10, h - 12);
  else for (let k = Math.ceil(x0); k <= Math.floor(x1); k++) ctx.fillText(String(k), px(k) - 4, h - 12);
  ctx.fillText(xlabel, w - m.r - 20, h - 12);
  return { px, py, legendX: w - m.r + 10 };
}

function plotCurve() {
  try {
    const c = JSON.parse(expansion_curve($("problem").value, num("c-mu"), num("c-n"), num("c-from"), num("c-to"), 60));
    const ctx = $("curve").getContext("2d");
    const lx = c.omega.map(Math.log10);
    const keys = Object.keys(COLORS);
    const ys = keys.flatMap((k) => c[k].filter((v) => v > 0).map(Math.log10));
    const f = frame(ctx, lx[0], lx[lx.length - 1], Math.floor(Math.min(...ys)), Math.ceil(Math.max(...ys)), "ω", true);
    keys.forEach((k, j) => {
      ctx.strokeStyle = COLORS[k];
      ctx.beginPath();
      let pen = false;
      c[k].forEach((v, i) => {
        if (!(v > 0)) { pen = false; return; }
        const [x, y] = [f.px(lx[i]), f.py(Math.log10(v))];
        pen ? ctx.lineTo(x, y) : ctx.moveTo(x, y);
        pen = true;
      });
      ctx.stroke();
      ctx.fillStyle = COLORS[k];
      ctx.fillText(k, f.legendX, 20 + 16 * j);
    });
    const bad = c.abs_error.filter((e, i) => e > c.bound[i]).length;
    $("c-msg").textContent = bad ? `${bad} points exceed the bound` : "bound holds at every point";
    $("c-msg").className = bad ? "err" : "";
  } catch (e) {
    $("c-msg").textContent = String(e);
    $("c-msg").className = "err";
  }
}

function plotCone() {
  try {
    const pts = JSON.parse(cone_map(num("m-mu"), num("m-t"), num("m-lo"), num("m-hi"), 121));
    const ctx = $("cone").getContext("2d");
    const ys = pts.flatMap((p) => [p.u_abs, p.abs_error, p.bound]).filter((v) => v > 0).map(Math.log10);
    const f = frame(ctx, pts[0].ratio, pts[pts.length - 1].ratio, Math.floor(Math.min(...ys)), Math.ceil(Math.max(...ys)), "ratio", false);
    for (const p of pts) {
      ctx.fillStyle = REGION_COLORS[p.region];
      ctx.beginPath();
      ctx.arc(f.px(p.ratio), f.py(Math.log10(p.u_abs)), 3, 0, 2 * Math.PI);
      ctx.fill();
      if (p.abs_error > 0) {
        ctx.fillStyle = "#000";
        ctx.fillRect(f.px(p.ratio) - 1, f.py(Math.log10(p.abs_error)) - 1, 3, 3);
      }
    }
    Object.entries(REGION_COLORS).forEach(([k, col], j) => {
      ctx.fillStyle = col;
      ctx.fillText(k, f.legendX, 20 + 16 * j);
    });
    ctx.fillStyle = "#000";
    ctx.fillText("■ expansion error", f.legendX, 20 + 16 * 6);
    const bad = pts.filter((p) => p.bound != null && p.abs_error > p.bound).length;
    $("m-msg").textContent = "dots: |u|, coloured by region. " + (bad ? `${bad} points exceed the bound` : "bound holds wherever it applies");
  } catch (e) {
    $("m-msg").textContent = String(e);
  }
}

function showConstants() {
  const t = $("consts");
  try {
    const c = JSON.parse(constants_table(num("k-mu"), num("k-e1"), num("k-e2"), num("k-e")));
    t.innerHTML = Object.entries(c)
      .map(([k, v]) => `<tr><td>${k}</td><td>${typeof v === "number" ? v.toPrecision(8) : v}</td></tr>`)
      .join("");
  } catch (e) {
    t.innerHTML = `<tr><td class="err">${e}</td></tr>`;
  }
}

await init();
$("c-run").onclick = plotCurve;
$("m-run").onclick = plotCone;
$("k-run").onclick = showConstants;
plotCurve();
plotCone();
showConstants();
