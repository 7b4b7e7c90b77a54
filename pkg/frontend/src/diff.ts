/** What-if support: diff the red-flag sets of two analysis runs. */

import type { RedFlagJson, ReportJson } from "./types.js";

export interface FlagDiff {
  added: RedFlagJson[];
  removed: RedFlagJson[];
  unchanged: RedFlagJson[];
}

export function flagKey(flag: RedFlagJson): string {
  return `${flag.kind}|${[...flag.targets].sort().join(",")}|${[...flag.block_ids]
    .sort()
    .join(",")}`;
}

export function diffFlags(
  previous: ReportJson | null,
  next: ReportJson,
): FlagDiff {
  const before = new Map((previous?.flags ?? []).map((f) => [flagKey(f), f]));
  const after = new Map(next.flags.map((f) => [flagKey(f), f]));
  const added = [...after.entries()]
    .filter(([key]) => !before.has(key))
    .map(([, flag]) => flag);
  const removed = [...before.entries()]
    .filter(([key]) => !after.has(key))
    .map(([, flag]) => flag);
  const unchanged = [...after.entries()]
    .filter(([key]) => before.has(key))
    .map(([, flag]) => flag);
  return { added, removed, unchanged };
}
