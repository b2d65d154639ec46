/**
 * Lexicon curation: review embedding-suggested terms card by card,
 * accept or reject each, and commit accepted terms to the lexicon.
 *
 * Decision clicks disable the card immediately and enter a local submit
 * queue that is flushed to the API one request at a time, so a decision
 * can never be double-submitted and none is lost while the API is
 * unreachable (a retry banner appears instead). A card disappears exactly
 * when the API acknowledges its decision; the tally always equals the
 * server-side ledger length.
 */

import { ApiClient, ApiError, OfflineError } from "./api.js";
import type { SessionPayload, Suggestion, Verdict } from "./types.js";
import { CATEGORIES } from "./types.js";

const CARD_BATCH = 10;

interface PendingDecision {
  term: string;
  verdict: Verdict;
}

export class CurationView {
  session: SessionPayload | null = null;
  private cards: Suggestion[] = [];
  private remaining = 0;
  private tally = 0;
  private lexiconVersion: number | null = null;
  private pending: PendingDecision[] = [];
  private flushing = false;
  private offline = false;
  private notice = "";

  constructor(
    private readonly container: HTMLElement,
    private readonly api: ApiClient,
  ) {}

  render(): void {
    this.container.replaceChildren();

    const controls = document.createElement("div");
    controls.className = "curation-controls";
    const select = document.createElement("select");
    select.className = "category-select";
    for (const category of CATEGORIES) {
      const option = document.createElement("option");
      option.value = category;
      option.textContent = category;
      select.appendChild(option);
    }
    const open = document.createElement("button");
    open.className = "open-session";
    open.textContent = "Open session";
    open.addEventListener("click", () => {
      void this.openSession(select.value);
    });
    controls.append(select, open);
    this.container.appendChild(controls);

    const status = document.createElement("p");
    status.className = "curation-status";
    if (this.lexiconVersion !== null) {
      const version = document.createElement("span");
      version.className = "lexicon-version";
      version.textContent = `lexicon v${this.lexiconVersion}`;
      status.appendChild(version);
    }
    if (this.session) {
      const tally = document.createElement("span");
      tally.className = "decision-tally";
      tally.textContent = ` decisions: ${this.tally}`;
      status.appendChild(tally);
    }
    this.container.appendChild(status);

    if (this.offline) {
      const banner = document.createElement("div");
      banner.className = "retry-banner";
      banner.textContent =
        `API unreachable; ${this.pending.length} decision(s) queued locally. `;
      const retry = document.createElement("button");
      retry.className = "retry";
      retry.textContent = "Retry";
      retry.addEventListener("click", () => {
        this.offline = false;
        this.render();
        void this.flush();
      });
      banner.appendChild(retry);
      this.container.appendChild(banner);
    }

    if (this.notice) {
      const note = document.createElement("p");
      note.className = "notice";
      note.textContent = this.notice;
      this.container.appendChild(note);
    }

    if (!this.session) {
      return;
    }

    const cardsHost = document.createElement("div");
    cardsHost.className = "cards";
    for (const suggestion of this.cards) {
      cardsHost.appendChild(this.renderCard(suggestion));
    }
    this.container.appendChild(cardsHost);

    if (this.session.status === "open" && this.cards.length === 0
        && this.pending.length === 0) {
      const exhausted = document.createElement("p");
      exhausted.className = "exhausted";
      exhausted.textContent = "Session exhausted: commit or reopen.";
      this.container.appendChild(exhausted);
    }

    if (this.session.status === "open") {
      const commit = document.createElement("button");
      commit.className = "commit";
      commit.textContent = "Commit session";
      commit.addEventListener("click", () => {
        void this.commit();
      });
      this.container.appendChild(commit);
    }
  }

  private renderCard(suggestion: Suggestion): HTMLElement {
    const card = document.createElement("div");
    card.className = "card";
    card.dataset.term = suggestion.term;

    const term = document.createElement("span");
    term.className = "card-term";
    term.textContent = suggestion.term;
    const score = document.createElement("span");
    score.className = "card-score";
    score.textContent = String(suggestion.score);
    const source = document.createElement("span");
    source.className = "card-source";
    source.textContent = `neighbor of ${suggestion.source_term}`;

    const accept = document.createElement("button");
    accept.className = "accept";
    accept.textContent = "Accept";
    const reject = document.createElement("button");
    reject.className = "reject";
    reject.textContent = "Reject";
    for (const [button, verdict] of [[accept, "accept"], [reject, "reject"]] as const) {
      button.addEventListener("click", () => {
        if (accept.disabled) {
          return; // already decided; wait for the acknowledgement
        }
        accept.disabled = true;
        reject.disabled = true;
        card.classList.add("deciding");
        this.pending.push({ term: suggestion.term, verdict });
        void this.flush();
      });
    }

    card.append(term, score, source, accept, reject);
    return card;
  }

  async openSession(category: string): Promise<void> {
    this.notice = "";
    try {
      this.session = await this.api.openSession(category);
    } catch (err) {
      this.notice = err instanceof Error ? err.message : String(err);
      this.render();
      return;
    }
    this.lexiconVersion = this.session.lexicon_version_at_open;
    this.tally = this.session.decisions.length;
    this.pending = [];
    await this.loadCards();
  }

  private async loadCards(): Promise<void> {
    if (!this.session) return;
    try {
      const next = await this.api.getNext(this.session.id, CARD_BATCH);
      this.cards = next.suggestions;
      this.remaining = next.remaining;
    } catch (err) {
      if (err instanceof OfflineError) {
        this.offline = true;
      } else {
        this.notice = err instanceof Error ? err.message : String(err);
      }
    }
    this.render();
  }

  /** Submit queued decisions strictly one at a time, in click order. */
  private async flush(): Promise<void> {
    if (this.flushing || !this.session) return;
    this.flushing = true;
    try {
      while (this.pending.length > 0) {
        const decision = this.pending[0];
        let ack;
        try {
          ack = await this.api.postDecision(
            this.session.id, decision.term, decision.verdict);
        } catch (err) {
          if (err instanceof OfflineError) {
            this.offline = true; // keep the decision queued
            this.render();
            return;
          }
          this.pending.shift();
          if (err instanceof ApiError && err.status === 422) {
            // duplicate or never-suggested: dismiss the card with a notice
            this.cards = this.cards.filter((c) => c.term !== decision.term);
            this.notice = `"${decision.term}": ${err.message}`;
            this.render();
            continue;
          }
          throw err;
        }
        this.pending.shift();
        this.tally = ack.decided;
        this.remaining = ack.remaining;
        this.cards = this.cards.filter((c) => c.term !== decision.term);
        this.render();
      }
      if (this.cards.length === 0 && this.remaining > 0) {
        await this.loadCards();
      }
    } finally {
      this.flushing = false;
    }
  }

  async commit(): Promise<void> {
    if (!this.session) return;
    try {
      const ack = await this.api.commitSession(this.session.id);
      this.session.status = "committed";
      this.lexiconVersion = ack.lexicon_version;
      this.cards = [];
      this.notice = `${ack.accepted} term(s) added; lexicon now v${ack.lexicon_version}`;
    } catch (err) {
      if (err instanceof ApiError && err.code === "stale_session") {
        this.renderStaleModal(err.message);
        return;
      }
      if (err instanceof OfflineError) {
        this.offline = true;
      } else {
        this.notice = err instanceof Error ? err.message : String(err);
      }
    }
    this.render();
  }

  private renderStaleModal(message: string): void {
    this.render();
    const modal = document.createElement("div");
    modal.className = "modal stale-modal";
    const text = document.createElement("p");
    text.textContent =
      `The lexicon changed since this session was opened (${message}). ` +
      "Reopen the session to continue.";
    const reopen = document.createElement("button");
    reopen.className = "reopen";
    reopen.textContent = "Reopen session";
    reopen.addEventListener("click", () => {
      const category = this.session ? this.session.category : CATEGORIES[0];
      modal.remove();
      void this.openSession(category);
    });
    modal.append(text, reopen);
    this.container.appendChild(modal);
  }
}
