import init, { evolve_profile, weak_kam_pair, contact_orbit } from "./pkg/wkam_web.js";

const $ = (id) => document.getElementById(id);
const num = (id) => parseFloat($(id).value);
const canvas = $("plot");
const ctx = canvas.getContext("2d");
const COLORS = ["#1f77b4", "#d62728", "#2ca02c", "#9467bd"];

function model() {
  return { n: Math.round(num("n")), lambda: num("lambda"), c: num("c"), dt: num("dt") };
}

function report(err) {
  $("status").textContent = err ? String(err.message ?? err) : "";
}

// series: [{ label, xs, ys, dots? }]
function plot(series, xLabel) {
  const W = canvas.width, H = canvas.height, pad = 50;
  ctx.clearRect(0, 0, W, H);
  const all = series.flatMap((s) => s.ys.filter(Number.isFinite));
  const xsAll = series.flatMap((s) => s.xs);
  let [lo, hi] = [Math.min(...all), Math.max(...all)];
  if (hi - lo < 1e-9) { lo -= 0.5; hi += 0.5; }
  const [x0, x1] = [Math.min(...xsAll), Math.max(...xsAll)];
  const sx = (x) => pad + ((x - x0) / (x1 - x0 || 1)) * (W - 2 * pad);
  const sy = (y) => H - pad - ((y - lo) / (hi - lo)) * (H - 2 * pad);

  ctx.strokeStyle = "#999";
  ctx.fillStyle = "#444";
  ctx.font = "20px system-ui";
  ctx.strokeRect(pad, pad, W - 2 * pad, H - 2 * pad);
  ctx.fillText(hi.toPrecision(3), 4, pad + 6);
  ctx.fillText(lo.toPrecision(3), 4, H - pad);
  ctx.fillText(`${xLabel} ∈ [${x0.toPrecision(3)}, ${x1.toPrecision(3)}]`, W / 2 - 80, H - 12);

  series.forEach((s, k) => {
    ctx.strokeStyle = ctx.fillStyle = COLORS[k % COLORS.length];
    if (s.dots) {
      s.xs.forEach((x, i) => { if (s.ys[i]) ctx.fillRect(sx(x) - 2, H - pad - 10, 4, 8); });
      return;
    }
    ctx.lineWidth = 2;
    ctx.beginPath();
    s.xs.forEach((x, i) => (i ? ctx.lineTo(sx(x), sy(s.ys[i])) : ctx.moveTo(sx(x), sy(s.ys[i]))));
    ctx.stroke();
  });
  $("legend").innerHTML = series
    .map((s, k) => `<span style="color:${COLORS[k % COLORS.length]}">■ ${s.label}</span>`)
    .join("");
}

const nodes = (n) => Array.from({ length: n }, (_, i) => i / n);

function runEvolve() {
  const m = model();
  const t = num("t");
  $("tval").textContent = t.toFixed(2);
  try {
    const fwd = $("dir").value === "fwd";
    const init0 = evolve_profile(m.n, m.lambda, m.c, m.dt, 0, fwd, $("kind").value, num("level"));
    const out = evolve_profile(m.n, m.lambda, m.c, m.dt, t, fwd, $("kind").value, num("level"));
    const xs = nodes(m.n);
    plot([
      { label: "φ", xs, ys: Array.from(init0) },
      { label: `${fwd ? "T⁺" : "T⁻"}_t φ`, xs, ys: Array.from(out) },
    ], "x");
    report(null);
  } catch (e) { report(e); }
}

function runSolve() {
  const m = model();
  try {
    const v = weak_kam_pair(m.n, m.lambda, m.c, m.dt);
    const xs = nodes(m.n);
    plot([
      { label: "u₋", xs, ys: Array.from(v.subarray(0, m.n)) },
      { label: "u₊", xs, ys: Array.from(v.subarray(m.n, 2 * m.n)) },
      { label: "Aubry mask", xs, ys: Array.from(v.subarray(2 * m.n)), dots: true },
    ], "x");
    report(null);
  } catch (e) { report(e); }
}

function runOrbit() {
  const m = model();
  try {
    const rows = contact_orbit(m.lambda, m.c, num("x0"), num("u0"), num("p0"), num("horizon"), 600);
    const col = (j) => Array.from({ length: rows.length / 5 }, (_, i) => rows[5 * i + j]);
    const ts = col(0);
    plot([
      { label: "x(t)", xs: ts, ys: col(1) },
      { label: "u(t)", xs: ts, ys: col(2) },
      { label: "p(t)", xs: ts, ys: col(3) },
      { label: "H(t)", xs: ts, ys: col(4) },
    ], "t");
    report(null);
  } catch (e) { report(e); }
}

await init();
for (const id of ["t", "kind", "dir", "level"]) $(id).addEventListener("input", runEvolve);
$("solve").addEventListener("click", runSolve);
$("orbit").addEventListener("click", runOrbit);
runEvolve();
