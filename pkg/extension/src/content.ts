/** Content script: attach a DraftSession to every PR comment editor.
 *
 * Matches the new-comment and review-reply textareas on GitHub PR pages,
 * including ones added later (review dialogs, inline reply editors).
 * Nothing is ever submitted or replaced automatically; the panel only
 * offers actions.
 */
import { ServiceClient } from "./client";
import { DraftSession } from "./session";
import { ensurePanel, renderState } from "./panel";
import { loadSettings } from "./settings";

const EDITOR_SELECTOR = [
  'textarea[name="comment[body]"]',
  'textarea[name="pull_request_review[body]"]',
  'textarea[name="pull_request_review_comment[body]"]',
  "textarea.js-comment-field",
].join(", ");

const sessions = new WeakMap<HTMLTextAreaElement, DraftSession>();

function attach(textarea: HTMLTextAreaElement, client: ServiceClient, debounceMs: number): void {
  if (sessions.has(textarea)) return;
  const session = new DraftSession(textarea, client, {
    debounceMs,
    onState: (state, s) => {
      const panel = ensurePanel(textarea);
      renderState(panel, state, s.lastVerdict, {
        onApply: () => {
          s.applyRewrite();
        },
        onDismiss: () => {
          s.dismiss();
        },
        onUndo: () => {
          s.undo();
        },
      }, s.canUndo);
    },
  });
  sessions.set(textarea, session);
}

function scan(root: ParentNode, client: ServiceClient, debounceMs: number): void {
  root.querySelectorAll<HTMLTextAreaElement>(EDITOR_SELECTOR).forEach((textarea) => {
    attach(textarea, client, debounceMs);
  });
}

export async function start(doc: Document = document): Promise<void> {
  const settings = await loadSettings();
  if (!settings.enabled) return;
  const client = new ServiceClient(settings.serviceOrigin);

  scan(doc, client, settings.debounceMs);

  const observer = new MutationObserver((mutations) => {
    for (const mutation of mutations) {
      mutation.addedNodes.forEach((node) => {
        if (node instanceof HTMLElement) {
          scan(node, client, settings.debounceMs);
        }
      });
    }
  });
  observer.observe(doc.documentElement, { childList: true, subtree: true });
}

// auto-start only when actually running as an extension content script
const runtime = (globalThis as { chrome?: { runtime?: { id?: string } } }).chrome;
if (runtime?.runtime?.id) {
  void start();
}
