/**
 * KWIC snippet rendering: the target-name tokens and the matched lexicon
 * terms get distinct highlight styles so an analyst can triage negations,
 * quotes and agency errors at a glance.
 */

import type { MentionHit } from "./types.js";

export function renderKwic(hit: MentionHit): HTMLElement {
  const line = document.createElement("div");
  line.className = "kwic-line";

  const termIndices = new Map<number, string>(); // snippet index -> category
  for (const [category, pairs] of Object.entries(hit.hits)) {
    for (const [index] of pairs ?? []) {
      termIndices.set(index - hit.kwic_start, category);
    }
  }
  const nameFrom = hit.start - hit.kwic_start;
  const nameTo = hit.end - hit.kwic_start; // exclusive

  hit.kwic_tokens.forEach((token, i) => {
    const span = document.createElement("span");
    span.textContent = token;
    if (i >= nameFrom && i < nameTo) {
      span.className = "kwic-name";
    } else if (termIndices.has(i)) {
      span.className = "kwic-term";
      span.title = termIndices.get(i)!;
    }
    line.appendChild(span);
    if (i < hit.kwic_tokens.length - 1) {
      line.appendChild(document.createTextNode(" "));
    }
  });
  return line;
}
