/** Wire types of the contractcheck HTTP API (report schema version 1). */

export interface BlockJson {
  ID: string;
  Text: string;
  Object?: string[];
  Assignment?: string[];
}

export type ContractDoc = BlockJson[];

export interface Finding {
  severity: "error" | "warning";
  code: string;
  message: string;
  block_ids: string[];
}

export interface TraceEventJson {
  day: number;
  claim: string;
  action: string;
  actor: string;
  counterparty: string;
  amount: number | null;
}

export interface TraceJson {
  participants: string[];
  events: TraceEventJson[];
  unperformed: { claim: string; party: string }[];
  satisfied: { claim: string; party: string }[];
}

export interface AnalysisOutcomeJson {
  kind: string;
  target: string | null;
  status: "pass" | "flag" | "unknown" | "error";
  verdict: string | null;
  vars: number;
  constraints: number;
  trace: TraceJson | null;
  message: string | null;
}

export interface RedFlagJson {
  kind: string;
  targets: string[];
  block_ids: string[];
  explanation: string;
}

export interface ReportJson {
  version: number;
  contract: string;
  findings: Finding[];
  analyses: AnalysisOutcomeJson[];
  flags: RedFlagJson[];
  blocks: Record<string, string>;
  summary: { flags: number; static_errors: number; analyses: number };
}

export interface TemplateParam {
  name: string;
  type: string;
  label: string;
  default?: string;
}

export interface BlockTemplate {
  id: string;
  title: string;
  description: string;
  params: TemplateParam[];
  block: BlockJson;
}

export interface TemplateLibrary {
  version: number;
  templates: BlockTemplate[];
}

export interface ProblemPayload {
  error: string;
  findings?: Finding[];
}
