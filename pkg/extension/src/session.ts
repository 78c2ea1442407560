/** Per-textarea analysis session.
 *
 * Watches one comment editor: after a quiet period following the last
 * keystroke it sends the draft to the local service and reports a UI
 * state transition. At most one analyze request is in flight per
 * textarea; responses for text the user has since edited (hash mismatch)
 * are discarded. The session never mutates the draft on its own — only
 * the explicit applyRewrite/undo calls do, and undo restores the exact
 * prior text.
 */
import { ServiceClient, ServiceUnreachable } from "./client";
import type { AnalyzeVerdict, UiState } from "./types";

/** FNV-1a over UTF-16 code units; cheap identity for draft snapshots. */
export function textHash(text: string): string {
  let hash = 0x811c9dc5;
  for (let i = 0; i < text.length; i++) {
    hash ^= text.charCodeAt(i);
    hash = Math.imul(hash, 0x01000193);
  }
  return (hash >>> 0).toString(16);
}

export interface SessionOptions {
  debounceMs?: number;
  onState?: (state: UiState, session: DraftSession) => void;
}

let sessionCounter = 0;

export class DraftSession {
  readonly textarea: HTMLTextAreaElement;
  readonly id: string;
  state: UiState = "idle";
  lastVerdict: AnalyzeVerdict | null = null;
  /** number of analyze requests issued; tests assert this never exceeds pauses */
  requestCount = 0;

  private readonly client: ServiceClient;
  private readonly debounceMs: number;
  private readonly onState: (state: UiState, session: DraftSession) => void;
  private timer: ReturnType<typeof setTimeout> | null = null;
  private inFlight = false;
  private analyzedHash: string | null = null;
  private rerunWanted = false;
  private undoText: string | null = null;
  private disposed = false;
  private readonly inputListener: () => void;

  constructor(textarea: HTMLTextAreaElement, client: ServiceClient, options: SessionOptions = {}) {
    this.textarea = textarea;
    this.client = client;
    this.debounceMs = options.debounceMs ?? 500;
    this.onState = options.onState ?? (() => undefined);
    this.id = `draft-${++sessionCounter}`;
    this.inputListener = () => this.handleInput();
    textarea.addEventListener("input", this.inputListener);
  }

  /** Reset the quiet-period timer; called on every keystroke. */
  handleInput(): void {
    if (this.disposed) return;
    if (this.timer !== null) {
      clearTimeout(this.timer);
    }
    this.timer = setTimeout(() => {
      this.timer = null;
      void this.analyzeNow();
    }, this.debounceMs);
  }

  /** Analyze the current draft immediately (timer expiry path). */
  async analyzeNow(): Promise<void> {
    if (this.disposed) return;
    const text = this.textarea.value;
    if (!text.trim()) {
      this.setState("idle");
      return;
    }
    const hash = textHash(text);
    if (this.inFlight) {
      // serialize: remember that the draft moved on and re-analyze after
      this.rerunWanted = true;
      return;
    }
    this.inFlight = true;
    this.analyzedHash = hash;
    this.requestCount++;
    this.setState("scanning");
    try {
      const verdict = await this.client.analyze(text, this.id);
      if (this.disposed) return;
      const current = textHash(this.textarea.value);
      if (current !== hash) {
        // stale: the user kept typing while we were waiting
        return;
      }
      this.lastVerdict = verdict;
      this.setState(verdict.label === "toxic" ? "flagged" : "clean");
    } catch (error) {
      if (this.disposed) return;
      if (error instanceof ServiceUnreachable) {
        this.setState("offline");
      } else {
        throw error;
      }
    } finally {
      this.inFlight = false;
      if (this.rerunWanted && !this.disposed) {
        this.rerunWanted = false;
        if (textHash(this.textarea.value) !== this.analyzedHash) {
          void this.analyzeNow();
        }
      }
    }
  }

  /** Replace the draft with the suggested rewrite. Returns false when
   * there is nothing to apply or the textarea left the document. */
  applyRewrite(): boolean {
    const detox = this.lastVerdict?.detox;
    if (this.state !== "flagged" || !detox) return false;
    if (!this.textarea.isConnected) return false;
    this.undoText = this.textarea.value;
    this.textarea.value = detox.detoxified;
    this.notifyPage();
    return true;
  }

  /** Restore the exact draft text from before applyRewrite. */
  undo(): boolean {
    if (this.undoText === null) return false;
    if (!this.textarea.isConnected) return false;
    this.textarea.value = this.undoText;
    this.undoText = null;
    this.notifyPage();
    return true;
  }

  get canUndo(): boolean {
    return this.undoText !== null;
  }

  dismiss(): void {
    this.setState("idle");
  }

  dispose(): void {
    this.disposed = true;
    if (this.timer !== null) {
      clearTimeout(this.timer);
      this.timer = null;
    }
    this.textarea.removeEventListener("input", this.inputListener);
  }

  private setState(state: UiState): void {
    this.state = state;
    this.onState(state, this);
  }

  /** Fire an input event so the page's own draft handling (and our
   * debounce, triggering re-analysis) both see the programmatic edit. */
  private notifyPage(): void {
    this.textarea.dispatchEvent(new Event("input", { bubbles: true }));
  }
}
