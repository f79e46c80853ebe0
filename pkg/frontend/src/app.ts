/** Application shell: class browser, entity list with a Time Vault tab,
 * the editing view (form + duplicates banner + drag ordering), the Time
 * Machine, and the merge wizard. */

import { ApiClient, ApiError, LockSession } from "./api.js";
import { FormController, localName, type SchemaResolver } from "./form.js";
import { TimeMachineController, TimeVaultController } from "./history.js";
import { MergeWizardController } from "./merge.js";
import { ReorderController } from "./reorder.js";
import { renderForm, renderHistory } from "./render.js";
import type { FormSchema, Term } from "./types.js";

interface AppConfig {
  baseUrl: string;
  authToken?: string;
}

export class App {
  private api: ApiClient;
  private locks: LockSession;
  private schemas = new Map<string, FormSchema>();
  private root: HTMLElement;
  private status: HTMLElement;

  constructor(root: HTMLElement, config: AppConfig) {
    this.api = new ApiClient({ baseUrl: config.baseUrl, authToken: config.authToken });
    this.locks = new LockSession(this.api);
    this.root = root;
    this.status = document.createElement("div");
    this.status.className = "status-bar";
    this.locks.bindUnload(window);
  }

  private say(message: string, isError = false): void {
    this.status.textContent = message;
    this.status.className = isError ? "status-bar error" : "status-bar";
  }

  /** Nested forms need schemas synchronously; prefetch the closure. */
  private async resolverFor(shape: string): Promise<SchemaResolver> {
    const queue = [shape];
    while (queue.length) {
      const next = queue.pop()!;
      if (this.schemas.has(next)) continue;
      const schema = await this.api.getSchema(next);
      this.schemas.set(next, schema);
      for (const field of schema.fields) {
        if (field.nestedShape) queue.push(field.nestedShape);
      }
      for (const virtual of schema.virtualProperties) {
        queue.push(virtual.targetShape);
      }
    }
    return (s: string) => {
      const found = this.schemas.get(s);
      if (!found) throw new Error(`schema ${s} was not prefetched`);
      return found;
    };
  }

  async start(): Promise<void> {
    this.root.textContent = "";
    this.root.appendChild(this.status);
    const main = document.createElement("div");
    main.className = "browser";
    this.root.appendChild(main);
    await this.showBrowser(main);
  }

  private async showBrowser(container: HTMLElement, tab: "entities" | "vault" = "entities"): Promise<void> {
    container.textContent = "";
    const tabs = document.createElement("div");
    tabs.className = "tabs";
    for (const [name, key] of [
      ["Entities", "entities"],
      ["Time Vault", "vault"],
    ] as const) {
      const button = document.createElement("button");
      button.textContent = name;
      button.className = tab === key ? "tab active" : "tab";
      button.addEventListener("click", () => void this.showBrowser(container, key));
      tabs.appendChild(button);
    }
    container.appendChild(tabs);

    const body = document.createElement("div");
    body.className = "browser-body";
    container.appendChild(body);
    if (tab === "vault") {
      await this.showVault(body);
    } else {
      await this.showEntityList(body, container);
    }
  }

  private async showEntityList(body: HTMLElement, container: HTMLElement): Promise<void> {
    const { classes } = await this.api.getClasses();
    const sidebar = document.createElement("ul");
    sidebar.className = "class-list";
    const listPane = document.createElement("div");
    listPane.className = "entity-list";
    body.append(sidebar, listPane);

    const showClass = async (classIri: string) => {
      listPane.textContent = "";
      const page = await this.api.listEntities({ classIri, pageSize: 50 });
      for (const item of page.entities) {
        const row = document.createElement("div");
        row.className = "entity-row";
        const link = document.createElement("a");
        link.href = "#";
        link.textContent = item.label;
        link.addEventListener("click", (event) => {
          event.preventDefault();
          void this.showEditor(container, item.iri);
        });
        row.appendChild(link);
        listPane.appendChild(row);
      }
    };

    for (const info of classes) {
      const item = document.createElement("li");
      const link = document.createElement("a");
      link.href = "#";
      link.textContent = `${localName(info.iri)} (${info.count})`;
      link.addEventListener("click", (event) => {
        event.preventDefault();
        void showClass(info.iri);
      });
      item.appendChild(link);
      sidebar.appendChild(item);
    }
    if (classes.length) await showClass(classes[0].iri);
  }

  private async showVault(body: HTMLElement): Promise<void> {
    const vault = new TimeVaultController(this.api);
    await vault.load();
    const render = () => {
      body.textContent = "";
      if (vault.error) {
        const banner = document.createElement("div");
        banner.className = "error-banner";
        banner.textContent = vault.error;
        body.appendChild(banner);
      }
      for (const entry of vault.entries) {
        const row = document.createElement("div");
        row.className = "vault-row";
        row.textContent = `${localName(entry.entity)} — deleted ${entry.deletedAt} (${entry.description})`;
        const restore = document.createElement("button");
        restore.textContent = "Restore";
        restore.addEventListener("click", () =>
          void (async () => {
            const token = await this.locks.acquire(entry.entity);
            if (await vault.restore(entry.entity, token)) {
              this.say(`restored ${localName(entry.entity)}`);
            }
            render();
          })(),
        );
        row.appendChild(restore);
        body.appendChild(row);
      }
      if (!vault.entries.length) {
        body.appendChild(document.createTextNode("No deleted entities."));
      }
    };
    render();
  }

  private async showEditor(container: HTMLElement, iri: string): Promise<void> {
    const detail = await this.api.getEntity(iri);
    if (!detail.shape || !detail.schema) {
      this.say("entity has no shape; free-form editing not supported in this client", true);
      return;
    }
    const resolver = await this.resolverFor(detail.shape);
    const controller = new FormController(this.schemas.get(detail.shape)!, resolver, detail.state);
    const token = await this.locks.acquire(iri).catch((err: unknown) => {
      if (err instanceof ApiError && err.code === "lock-held") {
        this.say(`read-only: locked by ${err.body.holder}`, true);
        return null;
      }
      throw err;
    });

    container.textContent = "";
    const back = document.createElement("button");
    back.textContent = "← Back";
    back.addEventListener("click", () =>
      void this.locks.releaseAll().then(() => this.showBrowser(container)),
    );
    container.appendChild(back);
    container.appendChild(Object.assign(document.createElement("h2"), { textContent: detail.label }));

    const formPane = document.createElement("div");
    const historyPane = document.createElement("div");
    container.append(formPane, historyPane);

    const timeMachine = new TimeMachineController(this.api, iri);
    await timeMachine.load().catch(() => undefined);

    const rerender = () => {
      renderForm(formPane, controller, {
        onChanged: rerender,
        onSubmit: () =>
          void (async () => {
            if (!token) return;
            try {
              await this.api.updateEntity(iri, controller.buildSubmission(), token);
              this.say("saved");
              await timeMachine.load();
              rerenderHistory();
            } catch (err) {
              if (err instanceof ApiError) this.say(`${err.code}: ${err.message}`, true);
              else throw err;
            }
          })(),
        onAutocomplete: (field, q, apply) =>
          void (async () => {
            if (!field.nestedShape) return;
            const hits = await this.api.autocomplete(field.nestedShape, field.path, q);
            if (hits.results.length === 1) {
              apply(hits.results[0].iri, hits.results[0].label);
            }
          })(),
      });
      void this.updateDuplicatesBanner(formPane, controller, iri);
      this.wireDragHandles(formPane, controller, iri, token);
    };
    const rerenderHistory = () => {
      renderHistory(historyPane, timeMachine, {
        onSelect: (index) => void timeMachine.select(index).then(rerenderHistory),
        onRestore: (index) =>
          void (async () => {
            if (!token) return;
            await timeMachine.restore(index, token);
            rerenderHistory();
            const refreshed = await this.api.getEntity(iri);
            const fresh = new FormController(this.schemas.get(detail.shape!)!, resolver, refreshed.state);
            Object.assign(controller, fresh); // replace edit state with the restored head
            rerender();
          })(),
      });
    };
    rerender();
    rerenderHistory();
  }

  private async updateDuplicatesBanner(
    pane: HTMLElement,
    controller: FormController,
    selfIri: string,
  ): Promise<void> {
    const values: Record<string, Term[]> = {};
    for (const field of controller.visibleFields()) {
      const terms: Term[] = [];
      for (const value of controller.valuesFor(field.path)) {
        if (value.kind === "literal" && value.text) terms.push({ type: "literal", value: value.text });
        if (value.kind === "reference" && value.iri) terms.push({ type: "uri", value: value.iri });
      }
      if (terms.length) values[field.path] = terms;
    }
    try {
      const { duplicates } = await this.api.duplicates(controller.schema.shape, values, selfIri);
      pane.querySelector(".duplicates-banner")?.remove();
      if (duplicates.length) {
        const banner = document.createElement("div");
        banner.className = "duplicates-banner";
        banner.textContent = `possible duplicates: ${duplicates.map((d) => d.label).join(", ")}`;
        const wizard = document.createElement("button");
        wizard.textContent = "Merge…";
        wizard.addEventListener("click", () =>
          void this.launchMergeWizard(selfIri, duplicates[0].iri),
        );
        banner.appendChild(wizard);
        pane.prepend(banner);
      }
    } catch {
      // shapes without duplicate rules simply have no banner
    }
  }

  private wireDragHandles(
    pane: HTMLElement,
    controller: FormController,
    iri: string,
    token: string | null,
  ): void {
    const ordering = controller.schema.ordering;
    if (!ordering || !token) return;
    const proxies = controller
      .valuesFor(ordering.orderedPath)
      .flatMap((v) => (v.kind === "reference" ? [v.iri] : []));
    if (proxies.length < 2) return;
    const reorder = new ReorderController(proxies);
    const fieldWrap = pane.querySelector<HTMLElement>(`[data-path="${ordering.orderedPath}"]`);
    if (!fieldWrap) return;
    fieldWrap.querySelectorAll<HTMLElement>(".value-row").forEach((row, index) => {
      row.draggable = true;
      row.addEventListener("dragstart", () => reorder.begin(index));
      row.addEventListener("dragover", (event) => {
        event.preventDefault();
        reorder.hoverAt(index);
      });
      row.addEventListener("drop", () =>
        void (async () => {
          const result = await reorder.drop(this.api, iri, ordering.orderedPath, token);
          if (reorder.error) this.say(reorder.error, true);
          else if (result) this.say("order saved");
        })(),
      );
    });
  }

  private async launchMergeWizard(leftIri: string, rightIri: string): Promise<void> {
    const wizard = new MergeWizardController(this.api);
    await wizard.load(leftIri, rightIri);
    const overlay = document.createElement("div");
    overlay.className = "merge-overlay";
    const render = () => {
      overlay.textContent = "";
      const panel = document.createElement("div");
      panel.className = "merge-panel";
      panel.appendChild(
        Object.assign(document.createElement("h3"), { textContent: "Merge entities" }),
      );
      const table = document.createElement("table");
      const head = document.createElement("tr");
      for (const text of ["Property", wizard.left?.label ?? "", wizard.right?.label ?? ""]) {
        head.appendChild(Object.assign(document.createElement("th"), { textContent: text }));
      }
      table.appendChild(head);
      for (const row of wizard.comparison()) {
        const tr = document.createElement("tr");
        tr.appendChild(Object.assign(document.createElement("td"), { textContent: row.label }));
        tr.appendChild(Object.assign(document.createElement("td"), { textContent: row.left.join("; ") }));
        tr.appendChild(Object.assign(document.createElement("td"), { textContent: row.right.join("; ") }));
        table.appendChild(tr);
      }
      panel.appendChild(table);
      for (const side of ["left", "right"] as const) {
        const pick = document.createElement("button");
        pick.textContent = `Keep ${side === "left" ? wizard.left?.label : wizard.right?.label}`;
        pick.className = wizard.survivorSide === side ? "survivor active" : "survivor";
        pick.addEventListener("click", () => {
          wizard.chooseSurvivor(side);
          render();
        });
        panel.appendChild(pick);
      }
      const preview = document.createElement("ul");
      preview.className = "merge-preview";
      for (const row of wizard.preview()) {
        preview.appendChild(
          Object.assign(document.createElement("li"), {
            textContent: `${row.label}: ${row.right.join("; ")}`,
          }),
        );
      }
      panel.appendChild(preview);
      const confirm = document.createElement("button");
      confirm.textContent = "Merge";
      confirm.disabled = !wizard.canConfirm;
      confirm.addEventListener("click", () =>
        void (async () => {
          const survivor = wizard.survivor!.entity;
          const absorbed = wizard.absorbed!.entity;
          await this.locks.acquire(survivor);
          await this.locks.acquire(absorbed);
          const result = await wizard.confirm(this.locks.tokensFor([survivor, absorbed]));
          if (result) {
            this.say(`merged ${localName(absorbed)} into ${localName(survivor)}`);
            overlay.remove();
          } else if (wizard.error) {
            this.say(wizard.error, true);
          }
        })(),
      );
      panel.appendChild(confirm);
      const cancel = document.createElement("button");
      cancel.textContent = "Cancel";
      cancel.addEventListener("click", () => overlay.remove());
      panel.appendChild(cancel);
      overlay.appendChild(panel);
    };
    render();
    document.body.appendChild(overlay);
  }
}

export function boot(): void {
  const root = document.getElementById("app");
  if (!root) return;
  const token = window.localStorage.getItem("provcurate-token") ?? undefined;
  const app = new App(root, { baseUrl: "", authToken: token });
  void app.start();
}

if (typeof document !== "undefined" && document.getElementById("app")) {
  boot();
}
