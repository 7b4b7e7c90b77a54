/** Application shell: wires the composer and the dashboard to the service.
 *
 * All state shown to the user derives from service responses (the stored
 * document, the last report); reloading the page therefore reproduces the
 * same dashboard for the same stored contract.
 */

import { ApiClient, ApiError } from "./api.js";
import {
  addBlock,
  danglingCrossBlockTokens,
  instantiateTemplate,
  moveBlock,
  referenceOptions,
  removeBlock,
  updateAssignment,
} from "./composer.js";
import {
  renderAnalysisList,
  renderDiffPanel,
  renderFindings,
  renderFlagPanel,
  renderTraceBlock,
} from "./dashboard.js";
import { diffFlags } from "./diff.js";
import { validateParams } from "./validate.js";
import type {
  AnalysisOutcomeJson,
  BlockTemplate,
  ContractDoc,
  Finding,
  RedFlagJson,
  ReportJson,
} from "./types.js";

const ANALYSIS_KINDS = ["I", "II", "unsat", "defense", "limitation"];

export class App {
  doc: ContractDoc = [];
  contractId = "draft";
  report: ReportJson | null = null;
  previousReport: ReportJson | null = null;
  /** document as it was when the report was computed, for staleness */
  analyzedDoc = "";
  running = false;
  findings: Finding[] = [];
  templates: BlockTemplate[] = [];

  constructor(
    readonly root: HTMLElement,
    readonly api: ApiClient,
  ) {
    root.innerHTML = `
      <header><h1>contractcheck</h1></header>
      <section id="library">
        <select id="library-contracts"></select>
        <button id="load-contract">Load contract</button>
        <select id="template-picker"></select>
        <button id="pick-template">Add block…</button>
        <form id="template-form" hidden></form>
      </section>
      <section id="composer"></section>
      <section id="validation"></section>
      <section id="toolbar">
        <span id="kind-boxes"></span>
        <button id="run-analyses">Run analyses</button>
        <div id="stale-banner" hidden>
          The contract changed since this report was computed — re-run the analyses.
        </div>
      </section>
      <section id="dashboard">
        <div id="analysis-list"></div>
        <div id="flag-panel"></div>
        <div id="trace-panel"></div>
        <div id="diff-panel"></div>
      </section>`;
    this.part("#run-analyses").addEventListener("click", () => {
      void this.runAnalyses();
    });
    this.part("#load-contract").addEventListener("click", () => {
      const select = this.part<HTMLSelectElement>("#library-contracts");
      if (select.value) void this.loadLibraryContract(select.value);
    });
    this.part("#pick-template").addEventListener("click", () => {
      const select = this.part<HTMLSelectElement>("#template-picker");
      const template = this.templates.find((t) => t.id === select.value);
      if (template) this.showTemplateForm(template);
    });
    const boxes = this.part("#kind-boxes");
    for (const kind of ANALYSIS_KINDS) {
      const label = document.createElement("label");
      const box = document.createElement("input");
      box.type = "checkbox";
      box.value = kind;
      box.checked = true;
      box.className = "kind-box";
      label.append(box, ` ${kind} `);
      boxes.append(label);
    }
  }

  part<T extends HTMLElement = HTMLElement>(selector: string): T {
    const node = this.root.querySelector<T>(selector);
    if (!node) throw new Error(`missing element ${selector}`);
    return node;
  }

  async boot(): Promise<void> {
    const [names, library] = await Promise.all([
      this.api.libraryContracts(),
      this.api.libraryBlocks(),
    ]);
    const contracts = this.part<HTMLSelectElement>("#library-contracts");
    contracts.innerHTML = "";
    for (const name of names) {
      const option = document.createElement("option");
      option.value = name;
      option.textContent = name;
      contracts.append(option);
    }
    this.templates = library.templates;
    const picker = this.part<HTMLSelectElement>("#template-picker");
    picker.innerHTML = "";
    for (const template of this.templates) {
      const option = document.createElement("option");
      option.value = template.id;
      option.textContent = template.title;
      picker.append(option);
    }
    // restore the dashboard for an already-stored contract, if any
    const stored = await this.api.getReport(this.contractId).catch(() => null);
    const doc = await this.api.getContract(this.contractId).catch(() => null);
    if (doc) {
      this.doc = doc;
      if (stored) {
        this.report = stored;
        this.analyzedDoc = JSON.stringify(doc);
      }
    }
    this.render();
  }

  async loadLibraryContract(name: string): Promise<void> {
    this.doc = await this.api.libraryContract(name);
    this.contractId = name;
    this.report = null;
    this.previousReport = null;
    this.findings = [];
    await this.save();
    this.render();
  }

  /** PUT the document; 422 findings surface inline instead of throwing. */
  async save(): Promise<boolean> {
    try {
      await this.api.putContract(this.contractId, this.doc);
      this.findings = [];
      return true;
    } catch (err) {
      if (err instanceof ApiError && err.payload?.findings) {
        this.findings = err.payload.findings;
        this.render();
        return false;
      }
      throw err;
    }
  }

  selectedKinds(): string[] {
    const boxes = [...this.root.querySelectorAll<HTMLInputElement>(".kind-box")];
    const picked = boxes.filter((b) => b.checked).map((b) => b.value);
    return picked.length === boxes.length ? [] : picked;
  }

  async runAnalyses(): Promise<void> {
    if (this.running) return;
    this.running = true;
    this.part<HTMLButtonElement>("#run-analyses").disabled = true;
    try {
      if (!(await this.save())) return;
      const report = await this.api.analyze(this.contractId, this.selectedKinds());
      this.previousReport = this.report;
      this.report = report;
      this.analyzedDoc = JSON.stringify(this.doc);
      this.findings = [];
    } catch (err) {
      if (err instanceof ApiError && err.payload?.findings) {
        this.findings = err.payload.findings;
      } else {
        throw err;
      }
    } finally {
      this.running = false;
      this.part<HTMLButtonElement>("#run-analyses").disabled = false;
      this.render();
    }
  }

  get stale(): boolean {
    return this.report !== null && JSON.stringify(this.doc) !== this.analyzedDoc;
  }

  // -- composer -------------------------------------------------------------

  showTemplateForm(template: BlockTemplate): void {
    const form = this.part<HTMLFormElement>("#template-form");
    form.hidden = false;
    form.innerHTML = "";
    form.dataset.templateId = template.id;
    for (const param of template.params) {
      const label = document.createElement("label");
      label.textContent = `${param.label} (${param.type}) `;
      let field: HTMLElement;
      const options = param.type.endsWith("Ref")
        ? referenceOptions(this.doc, param.type)
        : [];
      if (options.length) {
        const select = document.createElement("select");
        select.name = param.name;
        for (const option of options) {
          const node = document.createElement("option");
          node.value = option.token;
          node.textContent = `${option.token} (${option.typeName})`;
          select.append(node);
        }
        if (param.default) select.value = param.default;
        field = select;
      } else {
        const input = document.createElement("input");
        input.name = param.name;
        input.value = param.default ?? "";
        field = input;
      }
      field.classList.add("param-field");
      label.append(field);
      form.append(label);
    }
    const errors = document.createElement("div");
    errors.className = "param-errors";
    const submit = document.createElement("button");
    submit.type = "submit";
    submit.textContent = "Insert block";
    form.append(errors, submit);
    form.onsubmit = (event) => {
      event.preventDefault();
      const values: Record<string, string> = {};
      for (const field of form.querySelectorAll<HTMLInputElement | HTMLSelectElement>(
        ".param-field",
      )) {
        values[(field as HTMLInputElement).name] = (field as HTMLInputElement).value;
      }
      const problems = validateParams(template.params, values);
      errors.innerHTML = "";
      if (Object.keys(problems).length) {
        for (const [name, problem] of Object.entries(problems)) {
          const p = document.createElement("p");
          p.className = "param-error";
          p.textContent = `${name}: ${problem}`;
          errors.append(p);
        }
        return;
      }
      this.doc = addBlock(this.doc, instantiateTemplate(template, values));
      form.hidden = true;
      this.render();
    };
  }

  renderComposer(): void {
    const composer = this.part("#composer");
    composer.innerHTML = "";
    this.doc.forEach((block, index) => {
      const article = document.createElement("article");
      article.className = "block";
      article.dataset.blockId = block.ID;
      const head = document.createElement("h3");
      head.textContent = block.ID;
      const up = document.createElement("button");
      up.textContent = "up";
      up.className = "move-up";
      up.addEventListener("click", () => {
        this.doc = moveBlock(this.doc, block.ID, -1);
        this.render();
      });
      const down = document.createElement("button");
      down.textContent = "down";
      down.className = "move-down";
      down.addEventListener("click", () => {
        this.doc = moveBlock(this.doc, block.ID, 1);
        this.render();
      });
      const remove = document.createElement("button");
      remove.textContent = "remove";
      remove.className = "remove-block";
      remove.addEventListener("click", () => {
        this.doc = removeBlock(this.doc, block.ID);
        this.render();
      });
      head.append(" ", up, down, remove);
      article.append(head);
      const text = document.createElement("p");
      text.className = "block-text";
      text.textContent = block.Text;
      article.append(text);
      (block.Assignment ?? []).forEach((assignment, i) => {
        const input = document.createElement("input");
        input.className = "assignment";
        input.dataset.blockId = block.ID;
        input.dataset.index = String(i);
        input.value = assignment;
        input.addEventListener("change", () => {
          this.doc = updateAssignment(this.doc, block.ID, i, input.value);
          this.render();
        });
        article.append(input);
      });
      composer.append(article);
      void index;
    });
    const dangling = danglingCrossBlockTokens(this.doc);
    if (dangling.length) {
      const warning = document.createElement("p");
      warning.className = "dangling-warning";
      warning.textContent = `unresolved references: ${dangling.join(", ")}`;
      composer.append(warning);
    }
  }

  // -- dashboard -------------------------------------------------------------

  openFlag(flag: RedFlagJson): void {
    const panel = this.part("#flag-panel");
    panel.innerHTML = "";
    if (this.report) panel.append(renderFlagPanel(this.report, flag));
  }

  async openTrace(outcome: AnalysisOutcomeJson): Promise<void> {
    const text = await this.api.diagram(
      this.contractId,
      outcome.kind,
      outcome.target ?? undefined,
    );
    const panel = this.part("#trace-panel");
    panel.innerHTML = "";
    panel.append(renderTraceBlock(text));
  }

  render(): void {
    this.renderComposer();
    const validation = this.part("#validation");
    validation.innerHTML = "";
    if (this.findings.length) validation.append(renderFindings(this.findings));
    this.part("#stale-banner").hidden = !this.stale;
    const list = this.part("#analysis-list");
    list.innerHTML = "";
    const flagPanel = this.part("#flag-panel");
    const diffPanel = this.part("#diff-panel");
    diffPanel.innerHTML = "";
    if (this.report) {
      list.append(
        renderAnalysisList(
          this.report,
          (flag) => this.openFlag(flag),
          (outcome) => void this.openTrace(outcome),
        ),
      );
      if (this.previousReport) {
        diffPanel.append(renderDiffPanel(diffFlags(this.previousReport, this.report)));
      }
    } else {
      flagPanel.innerHTML = "";
    }
  }
}

export function createApp(root: HTMLElement, baseUrl: string): App {
  return new App(root, new ApiClient(baseUrl));
}
