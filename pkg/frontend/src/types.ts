export type EntityClass = "individual" | "organization";
export type EntryStatus = "proposed" | "accepted" | "rejected" | "added";
export type EntrySource = "baseline" | "llm" | "human";

export interface Article {
  id: string;
  title: string | null;
  body: string;
  case_label: string | null;
  language: string;
}

export interface DraftEntry {
  text: string;
  status: EntryStatus;
  source: EntrySource;
  note: string;
}

export interface Draft {
  article_id: string;
  entity_class: EntityClass;
  version: number;
  entries: DraftEntry[];
}

export interface Verdict {
  entry: string;
  verdict: "confirm" | "flag";
  note: string;
}

export interface GoldRecord {
  article_id: string;
  individuals: string[];
  organizations: string[];
}

export interface DatasetDocument {
  articles: Article[];
  gold: GoldRecord[];
}
