/** Shared test utilities: polling, JSON responses, fixture loading. */

import fs from "node:fs";
import path from "node:path";
import { fileURLToPath } from "node:url";

const here = path.dirname(fileURLToPath(import.meta.url));

/** Repo-level tests/data directory of the backend package. */
export const BACKEND_DATA = path.resolve(here, "../../tests/data");

export function loadGoldenReport(): unknown {
  const raw = fs.readFileSync(path.join(BACKEND_DATA, "golden", "report.json"), "utf-8");
  return JSON.parse(raw);
}

export function jsonResponse(body: unknown, status = 200): Response {
  return new Response(JSON.stringify(body), {
    status,
    headers: { "Content-Type": "application/json" },
  });
}

export function errorResponse(status: number, code: string, message = ""): Response {
  return jsonResponse({ status, code, message }, status);
}

/** Poll until fn() stops throwing / returns truthy. */
export async function until<T>(
  fn: () => T | Promise<T>,
  { timeout = 10_000, interval = 25 } = {},
): Promise<T> {
  const deadline = Date.now() + timeout;
  let lastError: unknown = new Error("timeout");
  while (Date.now() < deadline) {
    try {
      const value = await fn();
      if (value) return value;
      lastError = new Error(`condition stayed falsy: ${fn}`);
    } catch (err) {
      lastError = err;
    }
    await new Promise((resolve) => setTimeout(resolve, interval));
  }
  throw lastError;
}

export function textOf(element: Element | null): string {
  if (!element) throw new Error("element not found");
  return element.textContent ?? "";
}
