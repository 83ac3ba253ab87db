// Shapes of the chat-service JSON responses. The UI never interprets
// utterances itself; every annotation shown comes from these payloads.

export interface IntentDebug {
  intent: string | null;
  confidence: number;
  ranked: [string, number][];
}

export interface EntityDebug {
  entity: string;
  raw: string;
  start: number;
  end: number;
  value: string;
  extractor: string;
}

export interface FrameDebug {
  form: string;
  filled: Record<string, string>;
  pending: string[];
}

export interface BoosterDebug {
  kind: string;
  input: string;
  output: string;
  guard_outcome: string;
}

export interface TurnDebug {
  intent: IntentDebug | null;
  entities: EntityDebug[];
  frames: FrameDebug[];
  boosters: BoosterDebug[];
  templates: string[];
  fallback_count: number;
  awaiting_confirmation: boolean;
}

export interface MessageResponse {
  replies: string[];
  debug: TurnDebug;
}

export interface SessionResponse {
  session_id: string;
}

export interface TranscriptTurn {
  speaker: "user" | "bot";
  text: string;
  annotations?: Record<string, unknown>;
}

export interface TranscriptResponse {
  session_id: string;
  handed_off: boolean;
  turns: TranscriptTurn[];
}

export interface HandoffResponse {
  session_id: string;
  action_required: string;
  summary: string;
}
