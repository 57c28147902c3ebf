import init, { randomExample, quantities, concaveRoof, bound } from "./pkg/fisher_roof_web.js";

const $ = (id) => document.getElementById(id);

function show(f) {
  const out = $("out");
  try {
    out.textContent = f();
    out.className = "";
  } catch (e) {
    out.textContent = String(e.message ?? e);
    out.className = "error";
  }
}

function fillRandom() {
  show(() => {
    const pair = JSON.parse(randomExample(+$("dim").value, +$("rank").value, +$("seed").value));
    $("rho").value = JSON.stringify(pair.rho);
    $("obs").value = JSON.stringify(pair.obs);
    return "";
  });
}

await init();
$("random").onclick = fillRandom;
$("quantities").onclick = () => show(() => quantities($("rho").value, $("obs").value));
$("roof").onclick = () => show(() => concaveRoof($("rho").value, $("obs").value));
$("bound").onclick = () => show(() => bound($("rho").value, $("obs").value, +$("parties").value));
fillRandom();
