import { ApiClient, ApiError } from "./api.js";
import type { BoosterDebug, TurnDebug } from "./types.js";

const KIND_LABELS: Record<string, string> = {
  autocorrect: "auto-correct",
  out_of_scope: "out-of-scope",
  disambiguation: "disambiguation",
  rephrase: "rephrase",
  closed_qa: "closed-QA",
  summarize: "summarize",
};

const OUTCOME_LABELS: Record<string, string> = {
  passed: "passed",
  rejected: "rejected",
  substituted_default: "default substituted",
};

export function boosterBadgeLabel(booster: BoosterDebug): string {
  const kind = KIND_LABELS[booster.kind] ?? booster.kind;
  const outcome = OUTCOME_LABELS[booster.guard_outcome] ?? booster.guard_outcome;
  return `${kind}: ${outcome}`;
}

function el<K extends keyof HTMLElementTagNameMap>(
  tag: K, className?: string, text?: string,
): HTMLElementTagNameMap[K] {
  const node = document.createElement(tag);
  if (className) node.className = className;
  if (text !== undefined) node.textContent = text;
  return node;
}

export class ChatApp {
  client: ApiClient;
  root: HTMLElement;
  sessionId: string | null = null;
  userTurns = 0;
  inFlight = false;
  handedOff = false;

  private messageList!: HTMLElement;
  private input!: HTMLInputElement;
  private sendButton!: HTMLButtonElement;
  private handoffButton!: HTMLButtonElement;
  private errorBanner!: HTMLElement;
  private inspector!: HTMLElement;
  private inspectorBody!: HTMLElement;
  private handoffPanel!: HTMLElement;

  constructor(root: HTMLElement, client: ApiClient, operatorMode = false) {
    this.root = root;
    this.client = client;
    this.buildDom(operatorMode);
  }

  private buildDom(operatorMode: boolean): void {
    this.root.innerHTML = "";

    this.errorBanner = el("div", "error-banner hidden");
    this.messageList = el("div", "message-list");

    const inputRow = el("div", "input-row");
    this.input = el("input", "chat-input");
    this.input.type = "text";
    this.input.placeholder = "Type a message…";
    this.input.addEventListener("keydown", (event) => {
      if (event.key === "Enter") void this.send();
    });
    this.sendButton = el("button", "send-button", "Send");
    this.sendButton.addEventListener("click", () => void this.send());
    this.handoffButton = el("button", "handoff-button", "Hand off to agent");
    this.handoffButton.disabled = true;
    this.handoffButton.addEventListener("click", () => void this.handoff());
    inputRow.append(this.input, this.sendButton, this.handoffButton);

    this.inspector = el("details", "inspector");
    if (operatorMode) this.inspector.setAttribute("open", "");
    this.inspector.append(el("summary", undefined, "Debug inspector"));
    this.inspectorBody = el("div", "inspector-body");
    this.inspector.append(this.inspectorBody);

    this.handoffPanel = el("div", "handoff-panel hidden");

    this.root.append(
      this.errorBanner, this.messageList, inputRow,
      this.inspector, this.handoffPanel);
  }

  async start(existingSessionId?: string): Promise<void> {
    if (existingSessionId) {
      // refresh: re-fetch the transcript so local state equals the server's
      this.sessionId = existingSessionId;
      const transcript = await this.client.getTranscript(existingSessionId);
      for (const turn of transcript.turns) {
        this.appendMessage(turn.speaker, turn.text);
        if (turn.speaker === "user") this.userTurns += 1;
      }
      if (transcript.handed_off) this.lockInput();
    } else {
      const session = await this.client.createSession();
      this.sessionId = session.session_id;
    }
    this.handoffButton.disabled = this.handedOff || this.userTurns === 0;
  }

  async send(): Promise<void> {
    const text = this.input.value.trim();
    if (!text || !this.sessionId || this.inFlight || this.handedOff) {
      return; // empty input is blocked client-side: no request is made
    }
    this.setInFlight(true);
    this.hideError();
    try {
      const response = await this.client.sendMessage(this.sessionId, text);
      this.input.value = "";
      this.userTurns += 1;
      this.appendMessage("user", text);
      for (const reply of response.replies) {
        this.appendMessage("bot", reply, response.debug.boosters);
      }
      this.renderInspector(response.debug);
    } catch (error) {
      // keep the input so the user can retry after a failure
      this.showError(error);
    } finally {
      this.setInFlight(false);
      this.handoffButton.disabled = this.handedOff || this.userTurns === 0;
    }
  }

  async handoff(): Promise<void> {
    if (!this.sessionId || this.inFlight || this.userTurns === 0) return;
    this.setInFlight(true);
    this.hideError();
    try {
      const summary = await this.client.requestHandoff(this.sessionId);
      this.handedOff = true;
      this.renderHandoff(summary.action_required, summary.summary);
      this.lockInput();
    } catch (error) {
      this.showError(error);
    } finally {
      this.setInFlight(false);
    }
  }

  private appendMessage(
    speaker: string, text: string, boosters: BoosterDebug[] = [],
  ): void {
    const item = el("div", `message message-${speaker}`);
    item.append(el("span", "speaker", speaker === "user" ? "you" : "bot"));
    item.append(el("span", "text", text));
    if (speaker === "bot") {
      for (const booster of boosters) {
        item.append(el("span", "booster-badge", boosterBadgeLabel(booster)));
      }
    }
    this.messageList.append(item);
    this.messageList.scrollTop = this.messageList.scrollHeight;
  }

  private renderInspector(debug: TurnDebug): void {
    this.inspectorBody.innerHTML = "";

    const intent = el("div", "inspector-intent");
    if (debug.intent && debug.intent.intent) {
      intent.textContent =
        `intent: ${debug.intent.intent} (${debug.intent.confidence.toFixed(3)})`;
    } else {
      intent.textContent = "intent: none";
    }
    this.inspectorBody.append(intent);

    const entities = el("div", "inspector-entities");
    entities.textContent = debug.entities.length
      ? "entities: " + debug.entities
          .map((e) => `${e.entity}=${e.value}`).join(", ")
      : "entities: none";
    this.inspectorBody.append(entities);

    const frames = el("div", "inspector-frames");
    frames.dataset.depth = String(debug.frames.length);
    frames.append(el("span", undefined,
      `frame stack (depth ${debug.frames.length})`));
    const stack = el("ol", "frame-stack");
    for (const frame of debug.frames) {
      stack.append(el("li", "frame",
        `${frame.form} — pending: ${frame.pending.join(", ") || "none"}`));
    }
    frames.append(stack);
    this.inspectorBody.append(frames);

    const boosters = el("div", "inspector-boosters");
    for (const booster of debug.boosters) {
      boosters.append(el("span", "booster-badge", boosterBadgeLabel(booster)));
    }
    if (!debug.boosters.length) boosters.textContent = "boosters: none";
    this.inspectorBody.append(boosters);

    this.inspectorBody.append(el("div", "inspector-fallbacks",
      `fallbacks: ${debug.fallback_count}` +
      (debug.awaiting_confirmation ? " · awaiting confirmation" : "")));
  }

  private renderHandoff(actionRequired: string, summary: string): void {
    this.handoffPanel.classList.remove("hidden");
    this.handoffPanel.innerHTML = "";
    const action = el("div", "handoff-action");
    action.append(el("span", "handoff-label", "Agent Action Required"));
    action.append(el("span", "handoff-value", actionRequired));
    const summaryRow = el("div", "handoff-summary");
    summaryRow.append(el("span", "handoff-label", "Summary"));
    summaryRow.append(el("span", "handoff-value", summary));
    this.handoffPanel.append(action, summaryRow);
  }

  private lockInput(): void {
    this.handedOff = true;
    this.input.disabled = true;
    this.sendButton.disabled = true;
    this.handoffButton.disabled = true;
  }

  private setInFlight(value: boolean): void {
    this.inFlight = value;
    // one request per session in flight at a time
    this.sendButton.disabled = value || this.handedOff;
    this.handoffButton.disabled =
      value || this.handedOff || this.userTurns === 0;
  }

  private showError(error: unknown): void {
    this.errorBanner.classList.remove("hidden");
    if (error instanceof ApiError) {
      this.errorBanner.textContent = `HTTP ${error.status}: ${error.detail}`;
    } else {
      this.errorBanner.textContent =
        `Could not reach the service: ${String(error)}`;
    }
  }

  private hideError(): void {
    this.errorBanner.classList.add("hidden");
    this.errorBanner.textContent = "";
  }
}
