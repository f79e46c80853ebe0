/** DOM projection of the controllers. Rendering is stateless: every
 * change re-renders from the model, which keeps the logic in the
 * controllers and the DOM layer trivial. */

import type { FormController } from "./form.js";
import { localName } from "./form.js";
import type { TimeMachineController } from "./history.js";
import type { FormField, Term, TripleOut } from "./types.js";

export interface FormHandlers {
  onChanged(): void;
  onSubmit(): void;
  onAutocomplete?(field: FormField, q: string, apply: (iri: string, label: string) => void): void;
}

function termLabel(term: Term): string {
  return term.type === "uri" ? localName(term.value) : term.value;
}

function el<K extends keyof HTMLElementTagNameMap>(
  doc: Document,
  tag: K,
  className?: string,
  text?: string,
): HTMLElementTagNameMap[K] {
  const node = doc.createElement(tag);
  if (className) node.className = className;
  if (text !== undefined) node.textContent = text;
  return node;
}

export function renderForm(
  container: HTMLElement,
  controller: FormController,
  handlers: FormHandlers,
): void {
  const doc = container.ownerDocument;
  container.textContent = "";
  container.classList.add("entity-form");

  const crumb = el(doc, "div", "breadcrumb", controller.breadcrumb().join(" › "));
  container.appendChild(crumb);

  const violations = controller.validate();
  if (violations.length) {
    const list = el(doc, "ul", "violations");
    for (const violation of violations) {
      list.appendChild(el(doc, "li", `violation violation-${violation.kind}`, violation.message));
    }
    container.appendChild(list);
  }

  for (const field of controller.visibleFields()) {
    container.appendChild(renderField(doc, controller, field, handlers));
  }
  for (const virtual of controller.virtualProperties()) {
    container.appendChild(renderVirtual(doc, controller, virtual.label, handlers));
  }

  const submit = el(doc, "button", "submit", "Save");
  submit.type = "button";
  submit.disabled = !controller.isSubmittable();
  submit.addEventListener("click", () => handlers.onSubmit());
  container.appendChild(submit);
}

function renderField(
  doc: Document,
  controller: FormController,
  field: FormField,
  handlers: FormHandlers,
): HTMLElement {
  const wrap = el(doc, "div", "field");
  wrap.dataset.path = field.path;
  wrap.dataset.widget = field.widget;

  const label = el(doc, "label", "field-label", field.displayName);
  if (field.required) label.appendChild(el(doc, "span", "required-marker", " *"));
  wrap.appendChild(label);

  const values = controller.valuesFor(field.path);
  const isNested = field.widget === "nested-entity";
  const count = Math.max(values.length, isNested ? 0 : 1);

  for (let index = 0; index < count; index += 1) {
    wrap.appendChild(renderValue(doc, controller, field, index, handlers));
  }

  if (field.repeatable || (isNested && values.length === 0)) {
    const add = el(doc, "button", "add-value", `Add ${field.displayName}`);
    add.type = "button";
    add.addEventListener("click", () => {
      if (isNested) controller.addNested(field.path);
      else controller.addValue(field.path, { kind: "literal", text: "" });
      handlers.onChanged();
    });
    wrap.appendChild(add);
  }
  return wrap;
}

function renderValue(
  doc: Document,
  controller: FormController,
  field: FormField,
  index: number,
  handlers: FormHandlers,
): HTMLElement {
  const value = controller.valuesFor(field.path)[index];
  const row = el(doc, "div", "value-row");
  row.dataset.index = String(index);

  if (value?.kind === "nested") {
    return renderSection(doc, controller, field, index, handlers);
  }

  if (field.widget === "dropdown" && field.options) {
    const select = el(doc, "select", "widget-dropdown");
    select.appendChild(el(doc, "option", undefined, ""));
    for (const option of field.options) {
      const node = el(doc, "option", undefined, termLabel(option));
      node.value = option.value;
      if (value && "iri" in value && value.iri === option.value) {
        node.selected = true;
      }
      if (value?.kind === "literal" && value.text === option.value) node.selected = true;
      select.appendChild(node);
    }
    select.addEventListener("change", () => {
      controller.setReference(field.path, index, select.value);
      handlers.onChanged();
    });
    row.appendChild(select);
  } else if (field.widget === "reference") {
    const input = el(doc, "input", "widget-reference");
    input.type = "text";
    input.placeholder = "type to search…";
    input.value = value?.kind === "reference" ? (value.label ?? value.iri) : "";
    if (handlers.onAutocomplete) {
      input.addEventListener("input", () => {
        handlers.onAutocomplete?.(field, input.value, (iri, label) => {
          controller.setReference(field.path, index, iri, label);
          handlers.onChanged();
        });
      });
    }
    row.appendChild(input);
  } else if (field.widget === "textarea") {
    const area = el(doc, "textarea", "widget-textarea");
    area.value = value?.kind === "literal" ? value.text : "";
    area.addEventListener("input", () => {
      controller.setLiteral(field.path, index, area.value);
    });
    area.addEventListener("blur", () => handlers.onChanged());
    row.appendChild(area);
  } else {
    const input = el(doc, "input", `widget-${field.widget}`);
    input.type =
      field.widget === "date"
        ? "date"
        : field.widget === "datetime"
          ? "datetime-local"
          : field.widget === "number" || field.widget === "year"
            ? "number"
            : "text";
    input.value = value?.kind === "literal" ? value.text : value?.kind === "reference" ? value.iri : "";
    input.addEventListener("input", () => {
      controller.setLiteral(field.path, index, input.value);
    });
    // conditional patterns are checked before submit and shown on blur
    input.addEventListener("blur", () => handlers.onChanged());
    row.appendChild(input);
  }

  if (field.repeatable && controller.valuesFor(field.path).length > 1) {
    const remove = el(doc, "button", "remove-value", "✕");
    remove.type = "button";
    remove.addEventListener("click", () => {
      controller.removeValue(field.path, index);
      handlers.onChanged();
    });
    row.appendChild(remove);
  }
  return row;
}

function renderSection(
  doc: Document,
  controller: FormController,
  field: FormField,
  index: number,
  handlers: FormHandlers,
): HTMLElement {
  const open = controller.isOpen(field.path, index);
  const section = el(doc, "div", `nested-section ${open ? "open" : "collapsed"}`);
  section.dataset.path = field.path;
  section.dataset.index = String(index);

  const header = el(doc, "div", "section-header");
  const toggle = el(doc, "button", "section-toggle", `${open ? "▾" : "▸"} ${field.displayName} ${index + 1}`);
  toggle.type = "button";
  toggle.addEventListener("click", () => {
    controller.toggleSection(field.path, index);
    handlers.onChanged();
  });
  header.appendChild(toggle);
  // the summary stays in the DOM while collapsed so entered values
  // remain visible without reopening the section
  header.appendChild(el(doc, "span", "section-summary", controller.summary(field.path, index)));
  const remove = el(doc, "button", "remove-value", "✕");
  remove.type = "button";
  remove.addEventListener("click", () => {
    controller.removeValue(field.path, index);
    handlers.onChanged();
  });
  header.appendChild(remove);
  section.appendChild(header);

  if (open) {
    const body = el(doc, "div", "section-body");
    const entry = controller.valuesFor(field.path)[index];
    if (entry?.kind === "nested") {
      renderForm(body, entry.form, {
        ...handlers,
        onSubmit: () => handlers.onSubmit(),
      });
      body.querySelector("button.submit")?.remove(); // nested entities save with the parent
    }
    section.appendChild(body);
  }
  return section;
}

function renderVirtual(
  doc: Document,
  controller: FormController,
  label: string,
  handlers: FormHandlers,
): HTMLElement {
  const wrap = el(doc, "div", "field virtual-field");
  wrap.dataset.virtual = label;
  wrap.appendChild(el(doc, "label", "field-label", label));
  controller.valuesFor(label).forEach((value, index) => {
    if (value.kind !== "target") return;
    const row = el(doc, "div", "value-row", value.label ?? localName(value.iri));
    const remove = el(doc, "button", "remove-value", "✕");
    remove.type = "button";
    remove.addEventListener("click", () => {
      controller.removeValue(label, index);
      handlers.onChanged();
    });
    row.appendChild(remove);
    wrap.appendChild(row);
  });
  return wrap;
}

// --- history -----------------------------------------------------------------

export interface HistoryHandlers {
  onSelect(index: number): void;
  onRestore(index: number): void;
}

export function renderHistory(
  container: HTMLElement,
  controller: TimeMachineController,
  handlers: HistoryHandlers,
): void {
  const doc = container.ownerDocument;
  container.textContent = "";
  container.classList.add("time-machine");
  if (controller.error) {
    container.appendChild(el(doc, "div", "error-banner", controller.error));
  }
  const table = el(doc, "table", "history-table");
  const head = el(doc, "tr");
  for (const column of ["#", "When", "Agent", "Source", "Description", ""]) {
    head.appendChild(el(doc, "th", undefined, column));
  }
  table.appendChild(head);
  for (const row of controller.rows()) {
    const tr = el(doc, "tr", row.index === controller.selected ? "selected" : undefined);
    tr.dataset.index = String(row.index);
    tr.appendChild(el(doc, "td", undefined, String(row.index)));
    tr.appendChild(el(doc, "td", undefined, row.time));
    tr.appendChild(el(doc, "td", undefined, localName(row.agent)));
    tr.appendChild(el(doc, "td", undefined, row.source));
    tr.appendChild(el(doc, "td", undefined, row.description));
    const actions = el(doc, "td");
    const view = el(doc, "button", "view-version", "View");
    view.type = "button";
    view.addEventListener("click", () => handlers.onSelect(row.index));
    actions.appendChild(view);
    if (row.index !== controller.headIndex) {
      const restore = el(doc, "button", "restore-version", "Restore");
      restore.type = "button";
      restore.addEventListener("click", () => handlers.onRestore(row.index));
      actions.appendChild(restore);
    }
    tr.appendChild(actions);
    table.appendChild(tr);
  }
  container.appendChild(table);

  if (controller.selected !== null) {
    const panel = el(doc, "div", "version-panel");
    panel.appendChild(el(doc, "h3", undefined, `Version ${controller.selected}`));
    const stateList = el(doc, "ul", "version-state");
    for (const triple of controller.selectedState) {
      stateList.appendChild(
        el(doc, "li", undefined, `${localName(triple.predicate)}: ${termLabel(triple.object)}`),
      );
    }
    panel.appendChild(stateList);
    const diff = controller.diffView(controller.selected);
    const diffList = el(doc, "div", "version-diff");
    for (const triple of diff.deletions) {
      diffList.appendChild(
        el(doc, "div", "diff-deletion", `− ${localName(triple.predicate)}: ${termLabel(triple.object)}`),
      );
    }
    for (const triple of diff.insertions) {
      diffList.appendChild(
        el(doc, "div", "diff-insertion", `+ ${localName(triple.predicate)}: ${termLabel(triple.object)}`),
      );
    }
    panel.appendChild(diffList);
    container.appendChild(panel);
  }
}

export function renderStateList(container: HTMLElement, state: TripleOut[]): void {
  const doc = container.ownerDocument;
  container.textContent = "";
  const list = el(doc, "ul", "state-list");
  for (const triple of state) {
    list.appendChild(
      el(doc, "li", undefined, `${localName(triple.predicate)}: ${termLabel(triple.object)}`),
    );
  }
  container.appendChild(list);
}
