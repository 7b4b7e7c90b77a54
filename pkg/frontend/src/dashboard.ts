/** Pure DOM builders for the results dashboard. */

import type { FlagDiff } from "./diff.js";
import type { RedFlagJson, ReportJson, AnalysisOutcomeJson } from "./types.js";

function el<K extends keyof HTMLElementTagNameMap>(
  tag: K,
  className?: string,
  text?: string,
): HTMLElementTagNameMap[K] {
  const node = document.createElement(tag);
  if (className) node.className = className;
  if (text !== undefined) node.textContent = text;
  return node;
}

export function outcomeLabel(outcome: AnalysisOutcomeJson): string {
  const target = outcome.target ? ` ${outcome.target}` : "";
  return `${outcome.kind}${target}`;
}

/** Per-analysis pass/flag list; flagged rows are buttons opening the panel. */
export function renderAnalysisList(
  report: ReportJson,
  onOpenFlag: (flag: RedFlagJson) => void,
  onOpenTrace: (outcome: AnalysisOutcomeJson) => void,
): HTMLUListElement {
  const list = el("ul", "analysis-list");
  for (const outcome of report.analyses) {
    const item = el("li", `analysis analysis-${outcome.status}`);
    const badge = el("span", "badge", outcome.status === "unknown" ? "unknown" : outcome.status);
    item.append(badge, el("span", "label", ` ${outcomeLabel(outcome)} `));
    if (outcome.status === "flag") {
      const flag = report.flags.find(
        (f) => f.kind === outcome.kind && (outcome.target === null || f.targets.includes(outcome.target)),
      );
      if (flag) {
        const open = el("button", "open-flag", "show conflict");
        open.dataset.kind = outcome.kind;
        open.dataset.target = outcome.target ?? "";
        open.addEventListener("click", () => onOpenFlag(flag));
        item.append(open);
      }
    }
    if (outcome.trace) {
      const open = el("button", "open-trace", "show execution");
      open.dataset.kind = outcome.kind;
      open.addEventListener("click", () => onOpenTrace(outcome));
      item.append(open);
    }
    list.append(item);
  }
  return list;
}

/** The implicated blocks of one red flag, side by side. */
export function renderFlagPanel(report: ReportJson, flag: RedFlagJson): HTMLElement {
  const panel = el("section", "flag-panel");
  panel.append(
    el("h3", "flag-title", `${flag.kind} on ${flag.targets.filter(Boolean).join(", ")}`),
  );
  const columns = el("div", "flag-blocks");
  for (const blockId of flag.block_ids) {
    const column = el("article", "flag-block");
    column.dataset.blockId = blockId;
    column.append(el("h4", "block-id", blockId));
    column.append(el("p", "block-text", report.blocks[blockId] ?? "(no text)"));
    columns.append(column);
  }
  panel.append(columns);
  panel.append(el("pre", "flag-explanation", flag.explanation));
  return panel;
}

/** The service's Mermaid text, shown verbatim (no client-side diagrams). */
export function renderTraceBlock(mermaidText: string): HTMLElement {
  const panel = el("section", "trace-panel");
  const pre = el("pre", "mermaid", mermaidText);
  panel.append(pre);
  return panel;
}

export function renderDiffPanel(diff: FlagDiff): HTMLElement {
  const panel = el("section", "diff-panel");
  const describe = (flag: RedFlagJson) =>
    `${flag.kind} on ${flag.targets.filter(Boolean).join(", ")}`;
  const group = (title: string, cls: string, flags: RedFlagJson[]) => {
    const box = el("div", `diff-group diff-${cls}`);
    box.append(el("h4", undefined, `${title} (${flags.length})`));
    const list = el("ul");
    for (const flag of flags) list.append(el("li", undefined, describe(flag)));
    box.append(list);
    return box;
  };
  panel.append(group("fixed since last run", "removed", diff.removed));
  panel.append(group("new", "added", diff.added));
  panel.append(group("still flagged", "unchanged", diff.unchanged));
  return panel;
}

export function renderFindings(findings: { severity: string; code: string; message: string }[]): HTMLElement {
  const box = el("div", "findings");
  for (const finding of findings) {
    box.append(el("p", `finding finding-${finding.severity}`,
                  `${finding.code}: ${finding.message}`));
  }
  return box;
}
