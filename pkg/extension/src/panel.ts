/** Inline feedback panel rendered under a comment editor.
 *
 * Flagged drafts get the category labels with the analysis rationale and
 * the suggested rewrite with its explanation; degraded stages render a
 * partial panel. Clean drafts collapse to an unobtrusive badge; an
 * unreachable service shows a passive offline badge and never blocks
 * typing or submission.
 */
import type { AnalyzeVerdict, UiState } from "./types";

export interface PanelActions {
  onApply(): void;
  onDismiss(): void;
  onUndo(): void;
}

const PANEL_CLASS = "toxishield-panel";
const BADGE_CLASS = "toxishield-badge";

export function ensurePanel(anchor: HTMLElement): HTMLElement {
  const next = anchor.nextElementSibling;
  if (next instanceof HTMLElement && next.classList.contains(PANEL_CLASS)) {
    return next;
  }
  const panel = anchor.ownerDocument.createElement("div");
  panel.className = PANEL_CLASS;
  anchor.insertAdjacentElement("afterend", panel);
  return panel;
}

function badge(doc: Document, text: string, variant: string): HTMLElement {
  const span = doc.createElement("span");
  span.className = `${BADGE_CLASS} ${BADGE_CLASS}--${variant}`;
  span.textContent = text;
  return span;
}

export function renderState(
  panel: HTMLElement,
  state: UiState,
  verdict: AnalyzeVerdict | null,
  actions: PanelActions,
  canUndo: boolean,
): void {
  const doc = panel.ownerDocument;
  panel.textContent = "";
  panel.dataset.state = state;

  if (state === "idle") {
    return;
  }
  if (state === "scanning") {
    panel.appendChild(badge(doc, "checking tone…", "scanning"));
    return;
  }
  if (state === "offline") {
    panel.appendChild(badge(doc, "tone check offline", "offline"));
    return;
  }
  if (state === "clean") {
    panel.appendChild(badge(doc, "tone ok", "clean"));
    if (canUndo) {
      panel.appendChild(actionButton(doc, "Undo", "undo", actions.onUndo));
    }
    return;
  }

  // flagged
  panel.appendChild(badge(doc, "may read as toxic", "flagged"));

  if (verdict?.classification) {
    const labels = doc.createElement("div");
    labels.className = "toxishield-labels";
    labels.textContent = verdict.classification.labels.join(", ");
    panel.appendChild(labels);

    const why = doc.createElement("p");
    why.className = "toxishield-rationale";
    why.textContent = verdict.classification.rationale;
    panel.appendChild(why);
  } else if (verdict?.degraded.coach) {
    const note = doc.createElement("p");
    note.className = "toxishield-degraded";
    note.textContent = "explanation unavailable right now";
    panel.appendChild(note);
  }

  if (verdict?.detox) {
    const rewrite = doc.createElement("blockquote");
    rewrite.className = "toxishield-rewrite";
    rewrite.textContent = verdict.detox.detoxified;
    panel.appendChild(rewrite);

    const changes = doc.createElement("p");
    changes.className = "toxishield-rewrite-rationale";
    changes.textContent = verdict.detox.rationale;
    panel.appendChild(changes);

    panel.appendChild(actionButton(doc, "Apply", "apply", actions.onApply));
  } else if (verdict?.degraded.reframer) {
    const note = doc.createElement("p");
    note.className = "toxishield-degraded";
    note.textContent = "no rewrite available right now";
    panel.appendChild(note);
  }

  if (canUndo) {
    panel.appendChild(actionButton(doc, "Undo", "undo", actions.onUndo));
  }
  panel.appendChild(actionButton(doc, "Dismiss", "dismiss", actions.onDismiss));
}

function actionButton(
  doc: Document,
  label: string,
  role: string,
  onClick: () => void,
): HTMLButtonElement {
  const button = doc.createElement("button");
  button.type = "button";
  button.className = `toxishield-action toxishield-action--${role}`;
  button.dataset.action = role;
  button.textContent = label;
  button.addEventListener("click", onClick);
  return button;
}
