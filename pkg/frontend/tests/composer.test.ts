import { describe, expect, it } from "vitest";

import {
  addBlock,
  danglingCrossBlockTokens,
  declaredObjects,
  instantiateTemplate,
  moveBlock,
  referenceOptions,
  removeBlock,
  updateAssignment,
} from "../src/composer.js";
import type { BlockTemplate, ContractDoc } from "../src/types.js";

const template: BlockTemplate = {
  id: "parties-and-transfer",
  title: "Parties",
  description: "",
  params: [
    { name: "block_id", type: "Identifier", label: "Block id", default: "Block1" },
    { name: "seller_name", type: "String", label: "Seller" },
  ],
  block: {
    ID: "{{block_id}}",
    Text: "The seller $seller.Name sells.",
    Object: ["seller:Person"],
    Assignment: ["seller.Name={{seller_name}}"],
  },
};

const doc: ContractDoc = [
  {
    ID: "Block1",
    Text: "The seller $seller.Name hereby sells shares of $shares.Name.",
    Object: ["spa:SPA", "seller:Person", "shares:Shares", "transfer:PrimaryClaim"],
    Assignment: ["seller.Name=Eva", "shares.Name=Bakery"],
  },
  {
    ID: "Block11",
    Text: "The $object is transferred by way of security to $owner.Name.",
    Object: ["owner:Person", "object:$Object", "prop:PropertyRight"],
    Assignment: ["owner.Name=Bank", "object=$Block1_shares"],
  },
];

describe("instantiateTemplate", () => {
  it("fills the seller name into text block fields", () => {
    const block = instantiateTemplate(template, {
      block_id: "BlockX",
      seller_name: "Eva",
    });
    expect(block.ID).toBe("BlockX");
    expect(block.Assignment).toEqual(["seller.Name=Eva"]);
  });

  it("falls back to parameter defaults", () => {
    const block = instantiateTemplate(template, { seller_name: "Eva" });
    expect(block.ID).toBe("Block1");
  });
});

describe("document editing", () => {
  it("adds, reorders and removes blocks", () => {
    const block = instantiateTemplate(template, {
      block_id: "BlockX",
      seller_name: "Ada",
    });
    let next = addBlock(doc, block);
    expect(next.map((b) => b.ID)).toEqual(["Block1", "Block11", "BlockX"]);
    next = moveBlock(next, "BlockX", -1);
    expect(next.map((b) => b.ID)).toEqual(["Block1", "BlockX", "Block11"]);
    next = removeBlock(next, "BlockX");
    expect(next.map((b) => b.ID)).toEqual(["Block1", "Block11"]);
  });

  it("refuses duplicate block ids", () => {
    const clone = instantiateTemplate(template, {
      block_id: "Block1",
      seller_name: "Ada",
    });
    expect(() => addBlock(doc, clone)).toThrow(/already exists/);
  });

  it("rewrites one assignment", () => {
    const next = updateAssignment(doc, "Block11", 0, "owner.Name=Eva");
    expect(next[1]!.Assignment![0]).toBe("owner.Name=Eva");
    expect(doc[1]!.Assignment![0]).toBe("owner.Name=Bank"); // immutable
  });
});

describe("reference picker", () => {
  it("lists declared objects with cross-block tokens", () => {
    const declared = declaredObjects(doc);
    expect(declared.map((d) => d.token)).toContain("Block1_seller");
    expect(declared.find((d) => d.token === "Block11_object")?.isReference).toBe(true);
  });

  it("filters options by the expected class", () => {
    expect(referenceOptions(doc, "ClaimRef").map((d) => d.token)).toEqual([
      "Block1_transfer",
    ]);
    expect(referenceOptions(doc, "ObjectRef").map((d) => d.token)).toEqual([
      "Block1_shares",
    ]);
    expect(referenceOptions(doc, "PersonRef").map((d) => d.token)).toEqual([
      "Block1_seller",
      "Block11_owner",
    ]);
    expect(referenceOptions(doc, "BlockRef").map((d) => d.token)).toEqual([
      "Block1",
      "Block11",
    ]);
  });

  it("flags dangling cross-block tokens after a rename", () => {
    const renamed = doc.map((block) =>
      block.ID === "Block1"
        ? { ...block, Object: ["spa:SPA", "seller:Person", "stock:Shares",
                              "transfer:PrimaryClaim"] }
        : block,
    );
    expect(danglingCrossBlockTokens(renamed)).toEqual(["Block1_shares"]);
    expect(danglingCrossBlockTokens(doc)).toEqual([]);
  });
});
