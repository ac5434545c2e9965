import init, { distanceView, whitneyView, bmoView } from "./pkg/vbmo_wasm.js";

const SHAPES = {
  disk: { center: [0, 0], radius: 1 },
  annulus: { center: [0, 0], r_in: 0.4, r_out: 1 },
  square: { lo: [0, 0], side: 1 },
  l_shape: { lo: [-1, -1], side: 2 },
  cusp: { radius: 0.5 },
  perturbed_half_space: { extent: [-1, 1], height: 1, amplitude: 0.2, width: 0.5, center: 0 },
};

const $ = (id) => document.getElementById(id);

function spec() {
  const type = $("shape").value;
  return JSON.stringify({ type, params: SHAPES[type], resolution: { h: `1/${$("res").value}` } });
}

function guarded(fn) {
  return () => {
    $("status").textContent = "";
    $("status").className = "";
    const t = performance.now();
    try {
      fn();
      $("status").textContent = `done in ${(performance.now() - t).toFixed(0)} ms`;
    } catch (e) {
      $("status").textContent = String(e);
      $("status").className = "error";
    }
  };
}

function drawDistance() {
  const v = JSON.parse(distanceView(spec()));
  const c = $("distance");
  c.width = v.width;
  c.height = v.height;
  const ctx = c.getContext("2d");
  const img = ctx.createImageData(v.width, v.height);
  const max = Math.max(...v.signed.map(Math.abs).filter(Number.isFinite), 1e-12);
  v.signed.forEach((d, i) => {
    const t = Number.isFinite(d) ? Math.min(Math.abs(d) / max, 1) : 1;
    const inside = d > 0;
    img.data[4 * i] = inside ? 255 * (1 - t) : 255;
    img.data[4 * i + 1] = 255 * (1 - t * 0.8);
    img.data[4 * i + 2] = inside ? 255 : 255 * (1 - t);
    img.data[4 * i + 3] = 255;
  });
  ctx.putImageData(img, 0, 0);
  const { signed, ...info } = v;
  $("distance-info").textContent = JSON.stringify(info, null, 2);
}

function drawWhitney() {
  const v = JSON.parse(whitneyView(spec()));
  $("whitney").innerHTML = v.svg;
  const { svg, ...info } = v;
  $("whitney-info").textContent = JSON.stringify(info, null, 2);
}

function drawBmo() {
  const v = JSON.parse(bmoView(spec(), Number($("seed").value), Number($("mu").value)));
  $("bmo").innerHTML = v.svg;
  $("bmo-info").textContent = JSON.stringify(v.report, null, 2);
}

await init();
$("run-distance").onclick = guarded(drawDistance);
$("run-whitney").onclick = guarded(drawWhitney);
$("run-bmo").onclick = guarded(drawBmo);
guarded(drawDistance)();
