/** Pure document-editing operations behind the block composer.
 *
 * The composer works on the contract document itself (the same JSON the
 * service stores), so saving is a plain PUT and the server remains the only
 * source of semantic truth.
 */

import type { BlockJson, BlockTemplate, ContractDoc } from "./types.js";

/** Instantiate a template by substituting `{{param}}` placeholders. */
export function instantiateTemplate(
  template: BlockTemplate,
  values: Record<string, string>,
): BlockJson {
  const substitute = (text: string): string =>
    text.replace(/\{\{([A-Za-z_][A-Za-z0-9_]*)\}\}/g, (whole, name: string) => {
      const value = values[name] ?? template.params.find((p) => p.name === name)?.default;
      return value !== undefined ? value : whole;
    });
  return {
    ID: substitute(template.block.ID),
    Text: substitute(template.block.Text),
    Object: (template.block.Object ?? []).map(substitute),
    Assignment: (template.block.Assignment ?? []).map(substitute),
  };
}

export function addBlock(doc: ContractDoc, block: BlockJson): ContractDoc {
  if (doc.some((b) => b.ID === block.ID)) {
    throw new Error(`block id ${block.ID} already exists`);
  }
  return [...doc, block];
}

export function removeBlock(doc: ContractDoc, blockId: string): ContractDoc {
  return doc.filter((b) => b.ID !== blockId);
}

export function moveBlock(doc: ContractDoc, blockId: string, delta: -1 | 1): ContractDoc {
  const index = doc.findIndex((b) => b.ID === blockId);
  const target = index + delta;
  if (index < 0 || target < 0 || target >= doc.length) return doc;
  const next = [...doc];
  const [block] = next.splice(index, 1);
  next.splice(target, 0, block!);
  return next;
}

export function updateAssignment(
  doc: ContractDoc,
  blockId: string,
  index: number,
  assignment: string,
): ContractDoc {
  return doc.map((block) => {
    if (block.ID !== blockId) return block;
    const assignments = [...(block.Assignment ?? [])];
    assignments[index] = assignment;
    return { ...block, Assignment: assignments };
  });
}

export interface DeclaredObject {
  /** Cross-block reference token, e.g. `Block1_seller`. */
  token: string;
  blockId: string;
  name: string;
  typeName: string;
  isReference: boolean;
}

/** Every object declaration of the document, for the reference picker. */
export function declaredObjects(doc: ContractDoc): DeclaredObject[] {
  const out: DeclaredObject[] = [];
  for (const block of doc) {
    for (const entry of block.Object ?? []) {
      const separator = entry.indexOf(":");
      if (separator < 0) continue;
      const name = entry.slice(0, separator).trim();
      let typeName = entry.slice(separator + 1).trim();
      const isReference = typeName.startsWith("$");
      if (isReference) typeName = typeName.slice(1);
      out.push({
        token: `${block.ID}_${name}`,
        blockId: block.ID,
        name,
        typeName,
        isReference,
      });
    }
  }
  return out;
}

const CLAIM_CLASSES = new Set([
  "Claim", "PrimaryClaim", "SecondaryClaim", "WarrantyClaim",
  "PerformanceClaim", "RestitutionClaim", "CompensationClaim",
]);
const OBJECT_CLASSES = new Set(["Object", "Shares", "PurchasePrice"]);

/** Picker options matching the expected parameter type. */
export function referenceOptions(doc: ContractDoc, paramType: string): DeclaredObject[] {
  const declared = declaredObjects(doc).filter((d) => !d.isReference);
  switch (paramType) {
    case "ClaimRef":
      return declared.filter((d) => CLAIM_CLASSES.has(d.typeName));
    case "ObjectRef":
      return declared.filter((d) => OBJECT_CLASSES.has(d.typeName));
    case "PersonRef":
      return declared.filter((d) => d.typeName === "Person");
    case "BlockRef":
      return doc.map((b) => ({
        token: b.ID, blockId: b.ID, name: b.ID, typeName: "Block",
        isReference: false,
      }));
    default:
      return declared;
  }
}

/** Tokens referenced anywhere in the document ($x, $Block1_x, bare formula
 * names are left to the service). */
export function referencedTokens(doc: ContractDoc): Set<string> {
  const tokens = new Set<string>();
  const pattern = /\$([A-Za-z][A-Za-z0-9_]*)/g;
  for (const block of doc) {
    const haystacks = [block.Text, ...(block.Assignment ?? [])];
    for (const text of haystacks) {
      for (const match of text.matchAll(pattern)) {
        tokens.add(match[1]!);
      }
    }
  }
  return tokens;
}

/** Cross-block tokens that no longer resolve to a declaration — the picker
 * uses this to warn about renames before the service 422s. */
export function danglingCrossBlockTokens(doc: ContractDoc): string[] {
  const declared = new Set(declaredObjects(doc).map((d) => d.token));
  const blockIds = new Set(doc.map((b) => b.ID));
  const dangling: string[] = [];
  for (const token of referencedTokens(doc)) {
    if (blockIds.has(token)) continue; // a block reference
    let resolvable = false;
    for (const blockId of blockIds) {
      if (token.startsWith(`${blockId}_`) ) {
        resolvable = declared.has(token);
        break;
      }
    }
    if (!resolvable && token.includes("_") && [...blockIds].some((b) => token.startsWith(`${b}_`))) {
      dangling.push(token);
    }
  }
  return dangling.sort();
}
