import init, { spectrum, rabi, dragPopulations } from "./pkg/qpulse_wasm.js";

const COLORS = ["#1f77b4", "#d62728", "#2ca02c", "#9467bd"];

function plot(canvasId, legendId, x, series, { logY = false } = {}) {
  const canvas = document.getElementById(canvasId);
  const ctx = canvas.getContext("2d");
  const { width: w, height: h } = canvas;
  const pad = 40;
  ctx.clearRect(0, 0, w, h);
  const tf = logY ? (v) => Math.log10(Math.max(v, 1e-12)) : (v) => v;
  const ys = series.flatMap((s) => Array.from(s.values, tf));
  const [x0, x1] = [Math.min(...x), Math.max(...x)];
  const [y0, y1] = [Math.min(...ys), Math.max(...ys)];
  const sx = (v) => pad + ((v - x0) / (x1 - x0 || 1)) * (w - 2 * pad);
  const sy = (v) => h - pad - ((tf(v) - y0) / (y1 - y0 || 1)) * (h - 2 * pad);

  ctx.strokeStyle = "#999";
  ctx.strokeRect(pad, pad, w - 2 * pad, h - 2 * pad);
  ctx.fillStyle = "#333";
  ctx.font = "11px sans-serif";
  ctx.fillText(x0.toPrecision(3), pad, h - pad + 14);
  ctx.fillText(x1.toPrecision(3), w - pad - 30, h - pad + 14);
  const fmt = (v) => (logY ? `1e${v.toFixed(1)}` : v.toPrecision(3));
  ctx.fillText(fmt(y1), 2, pad + 4);
  ctx.fillText(fmt(y0), 2, h - pad);

  series.forEach((s, k) => {
    ctx.strokeStyle = COLORS[k % COLORS.length];
    ctx.setLineDash(s.dashed ? [6, 4] : []);
    ctx.beginPath();
    s.values.forEach((v, i) => (i ? ctx.lineTo(sx(x[i]), sy(v)) : ctx.moveTo(sx(x[i]), sy(v))));
    ctx.stroke();
  });
  ctx.setLineDash([]);
  document.getElementById(legendId).innerHTML = series
    .map((s, k) => `<span style="color:${COLORS[k % COLORS.length]}">&#9632; ${s.label}</span>`)
    .join("");
}

function read(formId) {
  const form = document.getElementById(formId);
  const get = (name) => form.querySelector(`[name=${name}]`);
  return { get, num: (name) => Number(get(name).value) };
}

function guarded(fn) {
  return () => {
    const status = document.getElementById("status");
    try {
      fn();
      status.textContent = "";
      status.className = "";
    } catch (e) {
      status.textContent = String(e.message ?? e);
      status.className = "error";
    }
  };
}

const drawSpectrum = guarded(() => {
  const f = read("spectrum-form");
  const s = spectrum(f.get("shape").value, f.num("duration"), f.num("fs"));
  plot("spectrum-plot", "spectrum-legend", s.x(), [{ label: "|spectrum| / peak (log scale)", values: s.column(0) }], {
    logY: true,
  });
});

const drawRabi = guarded(() => {
  const f = read("rabi-form");
  const s = rabi(f.get("shape").value, f.num("delta"), f.num("a0"), f.num("tmax"), 121);
  plot("rabi-plot", "rabi-legend", s.x(), [
    { label: "exact", values: s.column(0) },
    { label: "Magnus, second order", values: s.column(1), dashed: true },
  ]);
});

const drawDrag = guarded(() => {
  const f = read("drag-form");
  const s = dragPopulations(f.num("anharm"), f.num("a0"), f.num("sigma"), f.get("drag").checked, 400);
  plot("drag-plot", "drag-legend", s.x(), [0, 1, 2].map((k) => ({ label: `P${k}`, values: s.column(k) })));
});

await init();
for (const [form, draw] of [["spectrum-form", drawSpectrum], ["rabi-form", drawRabi], ["drag-form", drawDrag]]) {
  document.querySelector(`#${form} button`).addEventListener("click", draw);
  draw();
}
