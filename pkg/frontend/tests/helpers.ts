/** Shared schema fixtures mirroring the server's composed-schema JSON. */

import type { FormSchema, Term } from "../src/types.js";
import type { SchemaResolver } from "../src/form.js";

export const NS = {
  shapes: "https://w3id.org/example/shape/",
  datacite: "http://purl.org/spar/datacite/",
  literal: "http://www.essepuntato.it/2010/06/literalreification/",
  dcterms: "http://purl.org/dc/terms/",
  pro: "http://purl.org/spar/pro/",
  cito: "http://purl.org/spar/cito/",
  foaf: "http://xmlns.com/foaf/0.1/",
  oco: "https://w3id.org/oc/ontology/",
};

export const DOI: Term = { type: "uri", value: NS.datacite + "doi" };
export const DOI_PATTERN = "^10\\.\\d{4,9}/[-._;()/:A-Z0-9]+$";

export function identifierSchema(): FormSchema {
  return {
    shape: NS.shapes + "IdentifierShape",
    targetClass: NS.datacite + "Identifier",
    fields: [
      {
        path: NS.datacite + "usesIdentifierScheme",
        displayName: "Scheme",
        widget: "dropdown",
        required: true,
        repeatable: false,
        minCount: 1,
        maxCount: 1,
        options: [DOI],
        nestedShape: null,
        visible: true,
        order: 1,
        autocomplete: null,
        rules: [{ kind: "in", condition: null, values: [DOI] }],
      },
      {
        path: NS.literal + "hasLiteralValue",
        displayName: "Value",
        widget: "text",
        required: true,
        repeatable: false,
        minCount: 1,
        maxCount: 1,
        options: null,
        nestedShape: null,
        visible: true,
        order: 2,
        autocomplete: { minChars: 4, target: "parent" },
        rules: [
          {
            kind: "datatype",
            condition: null,
            datatypes: ["http://www.w3.org/2001/XMLSchema#string"],
          },
          {
            kind: "pattern",
            condition: {
              path: NS.datacite + "usesIdentifierScheme",
              hasValue: DOI,
            },
            pattern: DOI_PATTERN,
          },
        ],
      },
    ],
    virtualProperties: [],
    ordering: null,
  };
}

export function articleSchema(): FormSchema {
  return {
    shape: NS.shapes + "ArticleShape",
    targetClass: "http://purl.org/spar/fabio/JournalArticle",
    fields: [
      {
        path: NS.dcterms + "title",
        displayName: "Title",
        widget: "text",
        required: true,
        repeatable: false,
        minCount: 1,
        maxCount: 1,
        options: null,
        nestedShape: null,
        visible: true,
        order: 1,
        autocomplete: null,
        rules: [],
      },
      {
        path: NS.datacite + "hasIdentifier",
        displayName: "Identifiers",
        widget: "nested-entity",
        required: false,
        repeatable: true,
        minCount: null,
        maxCount: null,
        options: null,
        nestedShape: NS.shapes + "IdentifierShape",
        visible: true,
        order: 2,
        autocomplete: null,
        rules: [],
      },
      {
        path: NS.pro + "isDocumentContextFor",
        displayName: "Authors",
        widget: "nested-entity",
        required: false,
        repeatable: true,
        minCount: null,
        maxCount: null,
        options: null,
        nestedShape: NS.shapes + "RoleShape",
        visible: true,
        order: 3,
        autocomplete: null,
        rules: [],
      },
    ],
    virtualProperties: [
      {
        label: "cites",
        targetShape: NS.shapes + "CitationShape",
        intermediateClass: NS.cito + "Citation",
        linkFrom: NS.cito + "hasCitingEntity",
        linkTo: NS.cito + "hasCitedEntity",
      },
    ],
    ordering: {
      orderedPath: NS.pro + "isDocumentContextFor",
      chainPredicate: NS.oco + "hasNext",
    },
  };
}

export function roleSchema(): FormSchema {
  return {
    shape: NS.shapes + "RoleShape",
    targetClass: NS.pro + "RoleInTime",
    fields: [
      {
        path: NS.pro + "withRole",
        displayName: "Role",
        widget: "dropdown",
        required: true,
        repeatable: false,
        minCount: 1,
        maxCount: 1,
        options: [
          { type: "uri", value: NS.pro + "author" },
          { type: "uri", value: NS.pro + "editor" },
        ],
        nestedShape: null,
        visible: true,
        order: 1,
        autocomplete: null,
        rules: [],
      },
      {
        path: NS.pro + "isHeldBy",
        displayName: "Person",
        widget: "nested-entity",
        required: true,
        repeatable: false,
        minCount: 1,
        maxCount: 1,
        options: null,
        nestedShape: NS.shapes + "PersonShape",
        visible: true,
        order: 2,
        autocomplete: null,
        rules: [],
      },
    ],
    virtualProperties: [],
    ordering: null,
  };
}

export function personSchema(): FormSchema {
  return {
    shape: NS.shapes + "PersonShape",
    targetClass: NS.foaf + "Person",
    fields: [
      {
        path: NS.foaf + "name",
        displayName: "Name",
        widget: "text",
        required: false,
        repeatable: false,
        minCount: null,
        maxCount: 1,
        options: null,
        nestedShape: null,
        visible: true,
        order: 1,
        autocomplete: null,
        rules: [],
      },
    ],
    virtualProperties: [],
    ordering: null,
  };
}

const ALL = [identifierSchema(), articleSchema(), roleSchema(), personSchema()];

export const resolver: SchemaResolver = (shape: string) => {
  const found = ALL.find((s) => s.shape === shape);
  if (!found) throw new Error(`unknown fixture schema ${shape}`);
  return found;
};

/** Minimal fetch stub driven by a route table of `METHOD path` keys. */
export function stubFetch(
  routes: Record<string, (body?: unknown) => { status?: number; body?: unknown }>,
): { fetch: typeof fetch; calls: { method: string; path: string; body?: unknown }[] } {
  const calls: { method: string; path: string; body?: unknown }[] = [];
  const impl = (async (input: RequestInfo | URL, init?: RequestInit) => {
    const url = String(input);
    const path = url.replace(/^https?:\/\/[^/]+/, "");
    const method = init?.method ?? "GET";
    const body = init?.body ? JSON.parse(String(init.body)) : undefined;
    calls.push({ method, path, body });
    const handler = routes[`${method} ${path}`] ?? routes[`${method} *`];
    if (!handler) {
      return new Response(JSON.stringify({ error: { code: "not-found", message: path } }), {
        status: 404,
        headers: { "Content-Type": "application/json" },
      });
    }
    const result = handler(body);
    return new Response(JSON.stringify(result.body ?? {}), {
      status: result.status ?? 200,
      headers: { "Content-Type": "application/json" },
    });
  }) as typeof fetch;
  return { fetch: impl, calls };
}
