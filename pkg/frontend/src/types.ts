/**
 * Payload shapes of the hatescan HTTP API. Field names mirror the JSON
 * exactly; the UI renders these values verbatim and never recomputes a
 * statistic from them.
 */

export const CATEGORIES = [
  "swearword",
  "anger",
  "naughtiness",
  "general_threat",
  "death_threat",
  "sexism",
] as const;

export type Category = (typeof CATEGORIES)[number];

export interface CategoryCell {
  actual: number;
  proportion: number | null;
  expected: number;
  deviation: number;
}

export interface TargetRow {
  target_id: string;
  display_name: string;
  mentions: number;
  categories: Record<Category, CategoryCell>;
}

export interface CategoryStats {
  category: Category;
  corpus_count: number;
  relative_frequency: number;
}

export interface ReportPayload {
  config: {
    window: number;
    lexicon_version: number;
    tokenizer: Record<string, boolean>;
    targets: string[];
    fingerprint: string;
  };
  corpus: {
    doc_count: number;
    total_tokens: number;
    per_site: Record<string, { docs: number; tokens: number }>;
  };
  categories: CategoryStats[];
  targets: TargetRow[];
}

export interface MentionHit {
  doc_id: string;
  target_id: string;
  start: number;
  end: number;
  window: number;
  lexicon_version: number;
  /** category -> [token index, term] pairs (document-absolute indices) */
  hits: Partial<Record<Category, [number, string][]>>;
  kwic_start: number;
  kwic_tokens: string[];
}

export interface MentionsPage {
  total: number;
  offset: number;
  limit: number;
  hits: MentionHit[];
}

export interface Suggestion {
  term: string;
  source_term: string;
  score: number;
}

export interface SessionPayload {
  id: string;
  category: string;
  lexicon_version_at_open: number;
  status: string;
  oov_seeds: string[];
  queue: Suggestion[];
  decisions: { term: string; verdict: string; decided_at: string; decider: string }[];
}

export interface NextSuggestions {
  session_id: string;
  remaining: number;
  suggestions: Suggestion[];
}

export interface DecisionAck {
  session_id: string;
  decided: number;
  remaining: number;
}

export interface CommitAck {
  session_id: string;
  lexicon_version: number;
  accepted: number;
  rejected: number;
}

export type Verdict = "accept" | "reject";
