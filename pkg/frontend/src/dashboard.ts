/**
 * Report dashboard: target table with per-category actual / proportion /
 * deviation, two bar panels (raw counts and proportions), and a KWIC
 * drill-down per target with an optional category filter.
 *
 * Every number on screen is taken verbatim from the /api/report or
 * mentions payloads; the only client-side arithmetic is bar-width
 * scaling, which is presentation, not a displayed value.
 */

import { ApiClient, ApiError } from "./api.js";
import { renderKwic } from "./kwic.js";
import type { Category, MentionHit, ReportPayload, TargetRow } from "./types.js";
import { CATEGORIES } from "./types.js";

const KWIC_PAGE_SIZE = 25;

/** Render a payload number exactly as JSON.parse produced it; null -> em dash. */
export function verbatim(value: number | null): string {
  return value === null ? "—" : String(value);
}

export class DashboardView {
  private report: ReportPayload | null = null;
  private selectedTarget: string | null = null;
  private selectedCategory: Category | "" = "";

  constructor(
    private readonly container: HTMLElement,
    private readonly api: ApiClient,
  ) {}

  async load(): Promise<void> {
    this.container.replaceChildren();
    try {
      this.report = await this.api.getReport();
    } catch (err) {
      if (err instanceof ApiError && err.code === "no_report") {
        this.renderEmptyState();
        return;
      }
      throw err;
    }
    this.render();
  }

  private renderEmptyState(): void {
    const box = document.createElement("div");
    box.className = "empty-state";
    const head = document.createElement("h2");
    head.textContent = "No report yet";
    const hint = document.createElement("p");
    hint.textContent =
      "Run a scan first (hatescan scan ... or POST /api/scan), then reload.";
    box.append(head, hint);
    this.container.appendChild(box);
  }

  private render(): void {
    const report = this.report!;
    this.container.replaceChildren();

    const meta = document.createElement("p");
    meta.className = "report-meta";
    meta.textContent =
      `${report.corpus.doc_count} documents, ${report.corpus.total_tokens} tokens, ` +
      `window ${report.config.window}, lexicon v${report.config.lexicon_version}`;
    this.container.appendChild(meta);

    this.container.appendChild(this.renderTable(report.targets));
    this.container.appendChild(this.renderBars(report.targets, "counts"));
    this.container.appendChild(this.renderBars(report.targets, "proportions"));

    const drill = document.createElement("section");
    drill.className = "drilldown";
    this.container.appendChild(drill);
    if (this.selectedTarget) {
      void this.renderDrilldown(drill, this.selectedTarget);
    }
  }

  private renderTable(targets: TargetRow[]): HTMLTableElement {
    const table = document.createElement("table");
    table.className = "target-table";

    const thead = table.createTHead();
    const headRow = thead.insertRow();
    for (const label of ["Target", "Mentions"]) {
      const th = document.createElement("th");
      th.textContent = label;
      headRow.appendChild(th);
    }
    for (const category of CATEGORIES) {
      for (const metric of ["actual", "proportion", "deviation"]) {
        const th = document.createElement("th");
        th.textContent = `${category} ${metric}`;
        th.className = "metric-head";
        headRow.appendChild(th);
      }
    }

    const tbody = table.createTBody();
    // payload order is already mentions-descending; rendering must not re-sort
    for (const target of targets) {
      const row = tbody.insertRow();
      row.dataset.targetId = target.target_id;

      const nameCell = row.insertCell();
      const link = document.createElement("a");
      link.href = "#";
      link.textContent = target.display_name;
      link.addEventListener("click", (event) => {
        event.preventDefault();
        this.selectedTarget = target.target_id;
        this.render();
      });
      nameCell.appendChild(link);

      const mentionsCell = row.insertCell();
      mentionsCell.className = "num mentions";
      mentionsCell.textContent = verbatim(target.mentions);

      for (const category of CATEGORIES) {
        const cell = target.categories[category];
        const actual = row.insertCell();
        actual.className = `num actual ${category}`;
        actual.textContent = verbatim(cell.actual);

        const proportion = row.insertCell();
        proportion.className = `num proportion ${category}`;
        proportion.textContent = verbatim(cell.proportion);

        const deviation = row.insertCell();
        deviation.className = `num deviation ${category}`;
        if (cell.deviation > 0) {
          deviation.classList.add("positive");
        }
        deviation.textContent = verbatim(cell.deviation);
      }
    }
    return table;
  }

  private renderBars(targets: TargetRow[], panel: "counts" | "proportions"): HTMLElement {
    const section = document.createElement("section");
    section.className = `bars bars-${panel}`;
    const head = document.createElement("h3");
    head.textContent = panel === "counts"
      ? "Hit counts per category"
      : "Proportions of mentions per category";
    section.appendChild(head);

    const values = (t: TargetRow, c: Category) =>
      panel === "counts" ? t.categories[c].actual : (t.categories[c].proportion ?? 0);
    let max = 0;
    for (const t of targets) {
      for (const c of CATEGORIES) {
        max = Math.max(max, values(t, c));
      }
    }

    for (const target of targets) {
      const row = document.createElement("div");
      row.className = "bar-row";
      const label = document.createElement("span");
      label.className = "bar-label";
      label.textContent = target.display_name;
      row.appendChild(label);
      const track = document.createElement("span");
      track.className = "bar-track";
      for (const category of CATEGORIES) {
        const value = values(target, category);
        const seg = document.createElement("span");
        seg.className = `bar-seg ${category}`;
        seg.title = `${category}: ${verbatim(
          panel === "counts" ? target.categories[category].actual
            : target.categories[category].proportion)}`;
        seg.style.width = max > 0 ? `${(value / max) * 100}px` : "0px";
        track.appendChild(seg);
      }
      row.appendChild(track);
      section.appendChild(row);
    }
    return section;
  }

  private async renderDrilldown(host: HTMLElement, targetId: string): Promise<void> {
    host.replaceChildren();
    const head = document.createElement("h3");
    const target = this.report!.targets.find((t) => t.target_id === targetId);
    head.textContent = `Mentions of ${target ? target.display_name : targetId}`;
    host.appendChild(head);

    const filter = document.createElement("select");
    filter.className = "category-filter";
    const all = document.createElement("option");
    all.value = "";
    all.textContent = "all categories";
    filter.appendChild(all);
    for (const category of CATEGORIES) {
      const option = document.createElement("option");
      option.value = category;
      option.textContent = category;
      filter.appendChild(option);
    }
    filter.value = this.selectedCategory;
    filter.addEventListener("change", () => {
      this.selectedCategory = filter.value as Category | "";
      void this.renderDrilldown(host, targetId);
    });
    host.appendChild(filter);

    const page = await this.api.getMentions(targetId, {
      category: this.selectedCategory || undefined,
      limit: KWIC_PAGE_SIZE,
    });

    const total = document.createElement("p");
    total.className = "kwic-total";
    total.textContent = `${verbatim(page.total)} mention(s)`;
    host.appendChild(total);

    const list = document.createElement("div");
    list.className = "kwic-list";
    for (const hit of page.hits) {
      list.appendChild(this.renderHit(hit));
    }
    host.appendChild(list);
  }

  private renderHit(hit: MentionHit): HTMLElement {
    const item = document.createElement("div");
    item.className = "kwic-item";
    const origin = document.createElement("span");
    origin.className = "kwic-doc";
    origin.textContent = hit.doc_id;
    item.appendChild(origin);
    item.appendChild(renderKwic(hit));
    return item;
  }
}
