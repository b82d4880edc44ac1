/** Render the /quality response as a nested definition tree. Leaf values
 * are JSON-serialized verbatim so the panel can never drift from the API. */

function esc(text: string): string {
  return text
    .replace(/&/g, "&amp;")
    .replace(/</g, "&lt;")
    .replace(/>/g, "&gt;")
    .replace(/"/g, "&quot;");
}

function isLeaf(value: unknown): boolean {
  if (value === null || typeof value !== "object") return true;
  if (Array.isArray(value)) {
    return value.every((v) => v === null || typeof v !== "object");
  }
  return false;
}

function renderNode(value: unknown, path: string): string {
  if (isLeaf(value)) {
    return `<span class="q-leaf" data-path="${esc(path)}">${esc(JSON.stringify(value))}</span>`;
  }
  const entries: [string, unknown][] = Array.isArray(value)
    ? value.map((v, i) => [String(i), v])
    : Object.entries(value as Record<string, unknown>);
  const items = entries
    .map(([key, child]) => {
      const childPath = path ? `${path}.${key}` : key;
      return `<dt>${esc(key)}</dt><dd>${renderNode(child, childPath)}</dd>`;
    })
    .join("");
  return `<dl class="q-branch">${items}</dl>`;
}

export function qualityPanelHtml(tree: Record<string, unknown>): string {
  return renderNode(tree, "");
}

/** Flatten a quality tree into path -> JSON-string leaves (used by tests
 * to check the panel against the response, and by the panel search). */
export function qualityLeaves(
  value: unknown,
  path = "",
  out: Map<string, string> = new Map(),
): Map<string, string> {
  if (isLeaf(value)) {
    out.set(path, JSON.stringify(value));
    return out;
  }
  const entries: [string, unknown][] = Array.isArray(value)
    ? value.map((v, i) => [String(i), v])
    : Object.entries(value as Record<string, unknown>);
  for (const [key, child] of entries) {
    qualityLeaves(child, path ? `${path}.${key}` : key, out);
  }
  return out;
}
