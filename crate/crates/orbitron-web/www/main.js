// Page glue for the orbitron demo: loads the wasm module (built by
// build-web.sh into ./pkg) and renders the three views on plain canvases.

import init, { radius_sweep, xi2_sweep, orbit_trace } from "./pkg/orbitron_web.js";

const STRIDE = 7; // [swept, xi1, max_re, definite, m_lower, m_upper, m_xi2]
const $ = (id) => document.getElementById(id);

function params() {
  return {
    mass: +$("mass").value,
    i1: +$("i1").value,
    i3: +$("i3").value,
    mu: +$("mu").value,
    q: +$("q").value,
    h: +$("h").value,
    xi2: +$("xi2").value,
    r: +$("r").value,
    nudge: +$("nudge").value,
  };
}

function rows(flat, stride) {
  const out = [];
  for (let i = 0; i + stride <= flat.length; i += stride) {
    out.push(flat.slice(i, i + stride));
  }
  return out;
}

function frame(ctx, w, h) {
  ctx.clearRect(0, 0, w, h);
  ctx.fillStyle = "#fff";
  ctx.fillRect(0, 0, w, h);
}

// Line plot of max_re over the swept variable with certificate shading and
// boundary markers located by margin sign changes.
function drawSweep(canvas, data, xlabel) {
  const ctx = canvas.getContext("2d");
  const { width: w, height: h } = canvas;
  frame(ctx, w, h);
  const pad = { l: 54, r: 12, t: 10, b: 34 };
  const xs = data.map((r) => r[0]);
  const ys = data.map((r) => r[2]);
  const x0 = Math.min(...xs), x1 = Math.max(...xs);
  const yMax = Math.max(1e-12, ...ys) * 1.08;
  const px = (x) => pad.l + ((x - x0) / (x1 - x0)) * (w - pad.l - pad.r);
  const py = (y) => h - pad.b - (y / yMax) * (h - pad.t - pad.b);

  // Energy-momentum certificate region.
  ctx.fillStyle = "rgba(80, 170, 90, 0.18)";
  for (let i = 1; i < data.length; i++) {
    if (data[i][3] > 0.5) {
      ctx.fillRect(px(xs[i - 1]), pad.t, px(xs[i]) - px(xs[i - 1]), h - pad.t - pad.b);
    }
  }

  // Axes.
  ctx.strokeStyle = "#444";
  ctx.lineWidth = 1;
  ctx.strokeRect(pad.l, pad.t, w - pad.l - pad.r, h - pad.t - pad.b);
  ctx.fillStyle = "#333";
  ctx.font = "12px system-ui";
  ctx.fillText(xlabel, w / 2 - 20, h - 8);
  ctx.save();
  ctx.translate(14, h / 2 + 30);
  ctx.rotate(-Math.PI / 2);
  ctx.fillText("max Re lambda (1/s)", 0, 0);
  ctx.restore();
  for (const t of [0, 0.25, 0.5, 0.75, 1]) {
    const x = x0 + t * (x1 - x0);
    ctx.fillText(x.toPrecision(3), px(x) - 14, h - pad.b + 14);
  }
  ctx.fillText(yMax.toExponential(1), 4, py(yMax) + 10);
  ctx.fillText("0", 4, py(0) + 4);

  // Curve.
  ctx.strokeStyle = "#16c";
  ctx.lineWidth = 1.6;
  ctx.beginPath();
  data.forEach((r, i) => (i ? ctx.lineTo(px(r[0]), py(r[2])) : ctx.moveTo(px(r[0]), py(r[2]))));
  ctx.stroke();

  // Condition boundaries: sign changes of each margin column.
  ctx.fillStyle = "#c22";
  for (const col of [4, 5, 6]) {
    for (let i = 1; i < data.length; i++) {
      const a = data[i - 1][col], b = data[i][col];
      if (!isFinite(a) || !isFinite(b) || (a > 0) === (b > 0)) continue;
      const t = a / (a - b);
      const xc = xs[i - 1] + t * (xs[i] - xs[i - 1]);
      ctx.beginPath();
      ctx.arc(px(xc), py(0), 4, 0, 2 * Math.PI);
      ctx.fill();
    }
  }
}

function drawOrbit(canvas, data, rOrbit) {
  const ctx = canvas.getContext("2d");
  const { width: w, height: h } = canvas;
  frame(ctx, w, h);
  const span = rOrbit * 1.4;
  const px = (x) => w / 2 + (x / span) * (w / 2 - 8);
  const py = (y) => h / 2 - (y / span) * (h / 2 - 8);

  // Reference circle.
  ctx.strokeStyle = "#bbb";
  ctx.setLineDash([4, 4]);
  ctx.beginPath();
  ctx.arc(px(0), py(0), px(rOrbit) - px(0), 0, 2 * Math.PI);
  ctx.stroke();
  ctx.setLineDash([]);

  // Pole axis marker.
  ctx.fillStyle = "#c22";
  ctx.beginPath();
  ctx.arc(px(0), py(0), 3, 0, 2 * Math.PI);
  ctx.fill();

  ctx.strokeStyle = "#16c";
  ctx.lineWidth = 1.2;
  ctx.beginPath();
  data.forEach((r, i) => (i ? ctx.lineTo(px(r[1]), py(r[2])) : ctx.moveTo(px(r[1]), py(r[2]))));
  ctx.stroke();
}

function recompute() {
  const p = params();
  const status = $("status");
  status.textContent = "";
  try {
    const rSpan = [Math.max(0.2 * p.h, 1e-4), 3.0 * p.h];
    const rData = rows(
      radius_sweep(p.mass, p.i1, p.i3, p.mu, p.q, p.h, p.xi2, true, rSpan[0], rSpan[1], 300),
      STRIDE
    );
    drawSweep($("rsweep"), rData, "orbit radius r (m)");

    const xData = rows(
      xi2_sweep(p.mass, p.i1, p.i3, p.mu, p.q, p.h, p.r, true, -600, 400, 300),
      STRIDE
    );
    drawSweep($("xsweep"), xData, "body spin xi2 (rad/s)");

    const orbit = rows(
      orbit_trace(p.mass, p.i1, p.i3, p.mu, p.q, p.h, p.r, p.xi2, p.nudge, 2.0, 2e-4, 25),
      6
    );
    drawOrbit($("orbit"), orbit, p.r);
    const last = orbit[orbit.length - 1];
    $("orbitNote").textContent =
      `relative energy drift ${last[4].toExponential(2)}, ` +
      `angular-momentum drift ${last[5].toExponential(2)} over two periods`;
  } catch (e) {
    status.textContent = String(e);
  }
}

await init();
$("recompute").addEventListener("click", recompute);
for (const input of document.querySelectorAll("#params input")) {
  input.addEventListener("change", recompute);
}
recompute();
