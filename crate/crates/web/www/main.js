import init, { shapeOutline, hankel, runDemo } from "./pkg/fbnewton_web.js";

const $ = (id) => document.getElementById(id);
const RHO = 3.0;
let last = null;

function toCanvas(ctx, x, y) {
  const s = ctx.canvas.width / 2 / (1.15 * RHO);
  return [ctx.canvas.width / 2 + x * s, ctx.canvas.height / 2 - y * s];
}

function polyline(ctx, pts, style, dash) {
  ctx.beginPath();
  for (let i = 0; i < pts.length; i += 2) {
    const [x, y] = toCanvas(ctx, pts[i], pts[i + 1]);
    if (i === 0) ctx.moveTo(x, y); else ctx.lineTo(x, y);
  }
  ctx.closePath();
  ctx.strokeStyle = style;
  ctx.setLineDash(dash);
  ctx.lineWidth = 2;
  ctx.stroke();
  ctx.setLineDash([]);
}

function drawScene(truth, iterate, initial, sources, lo, hi) {
  const ctx = $("view").getContext("2d");
  ctx.clearRect(0, 0, ctx.canvas.width, ctx.canvas.height);
  const [cx, cy] = toCanvas(ctx, 0, 0);
  const r = toCanvas(ctx, RHO, 0)[0] - cx;
  ctx.strokeStyle = "#1f4fd1";
  ctx.setLineDash([6, 4]);
  ctx.beginPath();
  ctx.arc(cx, cy, r, 0, 2 * Math.PI);
  ctx.stroke();
  ctx.setLineDash([]);
  ctx.lineWidth = 4;
  ctx.beginPath();
  ctx.arc(cx, cy, r, -hi, -lo);
  ctx.stroke();
  ctx.lineWidth = 1;
  if (truth) polyline(ctx, truth, "#d62728", []);
  if (initial) polyline(ctx, initial, "#2ca02c", [8, 5]);
  if (iterate) polyline(ctx, iterate, "black", [10, 4, 2, 4]);
  ctx.fillStyle = "#d62728";
  for (let i = 0; i < (sources || []).length; i += 2) {
    const [x, y] = toCanvas(ctx, sources[i], sources[i + 1]);
    ctx.beginPath();
    ctx.arc(x, y, 3.5, 0, 2 * Math.PI);
    ctx.fill();
  }
}

function showIterate() {
  if (!last) return;
  const m = Number($("iter").value);
  $("iterlabel").textContent = `${m} / ${last.iterates.length - 1}`;
  drawScene(last.truth, last.iterates[m], last.iterates[0], last.sources,
    Number($("lo").value) * Math.PI, Number($("hi").value) * Math.PI);
}

function preview() {
  last = null;
  try {
    drawScene(shapeOutline($("shape").value), null, null, [],
      Number($("lo").value) * Math.PI, Number($("hi").value) * Math.PI);
  } catch (e) {
    $("status").textContent = String(e);
  }
}

function run() {
  $("status").textContent = "running...";
  setTimeout(() => {
    const t0 = performance.now();
    try {
      const json = runDemo($("shape").value, Number($("omega").value), Number($("delta").value),
        Number($("seed").value), Number($("lo").value) * Math.PI, Number($("hi").value) * Math.PI,
        Number($("sources").value), Number($("r0").value));
      last = JSON.parse(json);
      $("iter").max = last.iterates.length - 1;
      $("iter").value = last.iterates.length - 1;
      const ms = (performance.now() - t0).toFixed(0);
      $("status").textContent =
        `${last.termination} after ${last.iterates.length - 1} iterations, N = ${last.truncation_order}\n` +
        `${last.metric} error ${last.error.toExponential(3)}, ${ms} ms`;
      showIterate();
    } catch (e) {
      $("status").textContent = String(e);
    }
  }, 10);
}

function evalHankel() {
  try {
    const [hr, hi, dr, di] = hankel(Number($("hn").value), Number($("ht").value));
    $("hout").textContent = `H = ${hr.toPrecision(10)} + ${hi.toPrecision(10)}i, H' = ${dr.toPrecision(10)} + ${di.toPrecision(10)}i`;
  } catch (e) {
    $("hout").textContent = String(e);
  }
}

await init();
$("status").textContent = "ready";
$("run").addEventListener("click", run);
$("heval").addEventListener("click", evalHankel);
$("iter").addEventListener("input", showIterate);
for (const id of ["shape", "lo", "hi"]) $(id).addEventListener("change", preview);
preview();
