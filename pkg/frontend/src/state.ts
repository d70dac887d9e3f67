/**
 * Chat view state and its transitions.
 *
 * The state is a plain object; the controller mutates it through the API and
 * notifies the renderer. One in-flight request per session is enforced by the
 * `pending` flag, and the message list mirrors the server transcript exactly:
 * agent bubbles are appended verbatim from responses, user bubbles are
 * appended optimistically and marked failed if the server rejects them.
 */

import { Api, ApiError } from './api';
import type {
  ClientProfile,
  FactorLabel,
  HardwareSpec,
  QuantizationLevel,
  SatisfactionPoint,
  Scenario,
} from './types';

export interface ChatMessage {
  role: 'agent' | 'user';
  text: string;
  timestamp: number;
  failed?: boolean;
}

export interface Assignment {
  round: number;
  level: QuantizationLevel;
}

export interface ChatViewState {
  clientId: string | null;
  sessionId: string | null;
  messages: ChatMessage[];
  pending: boolean;
  done: boolean;
  profile: ClientProfile | null;
  assignment: Assignment | null;
  satisfactionSeries: SatisfactionPoint[];
  error: string | null;
}

export function initialState(): ChatViewState {
  return {
    clientId: null,
    sessionId: null,
    messages: [],
    pending: false,
    done: false,
    profile: null,
    assignment: null,
    satisfactionSeries: [],
    error: null,
  };
}

export type Listener = (state: ChatViewState) => void;

export class ChatController {
  readonly state: ChatViewState = initialState();

  constructor(
    private readonly api: Api,
    private readonly listener: Listener = () => undefined,
    private readonly now: () => number = Date.now,
  ) {}

  private notify(): void {
    this.listener(this.state);
  }

  private fail(error: unknown): void {
    this.state.error = error instanceof Error ? error.message : String(error);
    this.state.pending = false;
    this.notify();
  }

  async register(hardware: HardwareSpec): Promise<void> {
    if (this.state.pending) return;
    this.state.pending = true;
    this.state.error = null;
    this.notify();
    try {
      const { client_id } = await this.api.register(hardware);
      this.state.clientId = client_id;
      this.state.pending = false;
      this.notify();
    } catch (error) {
      this.fail(error);
    }
  }

  async startSession(scenario: Scenario): Promise<void> {
    if (this.state.pending || !this.state.clientId) return;
    this.state.pending = true;
    this.state.error = null;
    this.notify();
    try {
      const response = await this.api.startInterview(this.state.clientId, scenario);
      this.state.sessionId = response.session_id;
      this.state.done = false;
      this.state.messages = [{ role: 'agent', text: response.agent_message, timestamp: this.now() }];
      this.state.pending = false;
      this.notify();
    } catch (error) {
      this.fail(error);
    }
  }

  async sendReply(text: string): Promise<void> {
    if (this.state.pending || !this.state.sessionId || this.state.done) return;
    if (!text.trim()) return;
    const bubble: ChatMessage = { role: 'user', text, timestamp: this.now() };
    this.state.messages.push(bubble);
    this.state.pending = true;
    this.state.error = null;
    this.notify();
    try {
      const response = await this.api.sendMessage(this.state.sessionId, text);
      this.state.messages.push({ role: 'agent', text: response.agent_message, timestamp: this.now() });
      this.state.done = response.done;
      this.state.pending = false;
      this.notify();
      if (response.done && this.state.clientId) {
        await this.refreshProfileAndAssignment();
      }
    } catch (error) {
      bubble.failed = true;
      if (error instanceof ApiError && error.status === 409) {
        this.state.done = true;
      }
      this.fail(error);
    }
  }

  async submitFeedback(ratings: Record<FactorLabel, number>, freeText: string): Promise<void> {
    if (this.state.pending || !this.state.clientId || !this.state.profile) return;
    const level = this.state.assignment?.level ?? this.state.profile.hardware.available_levels[0];
    const round = this.state.assignment?.round ?? 0;
    this.state.pending = true;
    this.state.error = null;
    this.notify();
    try {
      await this.api.submitFeedback(this.state.clientId, {
        round,
        level,
        ratings,
        free_text: freeText,
      });
      this.state.pending = false;
      await this.refreshMetrics();
    } catch (error) {
      this.fail(error);
    }
  }

  async refreshProfileAndAssignment(): Promise<void> {
    if (!this.state.clientId) return;
    try {
      this.state.profile = await this.api.getProfile(this.state.clientId);
      this.notify();
      await this.refreshMetrics();
    } catch (error) {
      this.fail(error);
    }
  }

  async refreshMetrics(): Promise<void> {
    try {
      const metrics = await this.api.getMetrics();
      this.state.satisfactionSeries = metrics.satisfaction.series;
      const plan = metrics.last_plan;
      if (plan && this.state.clientId && plan.assignments[this.state.clientId]) {
        this.state.assignment = {
          round: plan.round,
          level: plan.assignments[this.state.clientId],
        };
      }
      this.notify();
    } catch (error) {
      this.fail(error);
    }
  }
}
