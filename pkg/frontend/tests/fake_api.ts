/** Scriptable in-memory Api double mirroring the server's interview flow. */

import { Api, ApiError } from '../src/api';
import type {
  ClientProfile,
  FeedbackRequest,
  FeedbackResponse,
  HardwareSpec,
  InterviewStartResponse,
  MessageResponse,
  MetricsResponse,
  RegisterResponse,
  SatisfactionPoint,
  Scenario,
} from '../src/types';

export const QUESTIONS = [
  'Where does the device live?',
  'When do you mostly interact with it?',
  'How often do you expect to use it?',
  'What will you mostly use it for?',
  'Rank what matters most to you.',
];

export const CLOSING = "Thanks, that's everything I need for now.";

export const PROFILE: ClientProfile = {
  client_id: 'c0001',
  hardware: {
    processor_class: 't4-premium',
    ram_mb: 4096,
    power_state: 'mains',
    available_levels: ['INT4', 'INT8', 'FP16', 'FP32'],
  },
  context: {
    device_location: 'bedroom',
    interaction_time: 'nighttime',
    interaction_frequency: 'low',
    task_type_mix: { entertainment: 0.6, smart_home: 0, general_query: 0.4, personal_request: 0 },
  },
  inferred: {
    noise_level: 'low',
    data_quantity: 'low',
    data_distribution: { entertainment: 0.6, smart_home: 0, general_query: 0.4, personal_request: 0 },
  },
  estimated_weights: { weights: { accuracy: 0.5, energy: 0.3, latency: 0.2 } },
  contribution_estimate: { INT4: 1, INT8: 1, FP16: 1, FP32: 1 },
};

export class FakeApi implements Api {
  answered = 0;
  feedbacks: FeedbackRequest[] = [];
  series: SatisfactionPoint[] = [];
  failNextMessage = false;
  planned = true;

  async register(_hardware: HardwareSpec): Promise<RegisterResponse> {
    return { client_id: 'c0001' };
  }

  async startInterview(_clientId: string, _scenario: Scenario): Promise<InterviewStartResponse> {
    this.answered = 0;
    return { session_id: 's000001', agent_message: QUESTIONS[0] };
  }

  async sendMessage(_sessionId: string, _text: string): Promise<MessageResponse> {
    if (this.failNextMessage) {
      this.failNextMessage = false;
      throw new ApiError(422, 'invalid reply');
    }
    if (this.answered >= QUESTIONS.length) {
      throw new ApiError(409, 'session finished');
    }
    this.answered += 1;
    if (this.answered === QUESTIONS.length) {
      return { agent_message: CLOSING, done: true };
    }
    return { agent_message: QUESTIONS[this.answered], done: false };
  }

  async getProfile(_clientId: string): Promise<ClientProfile> {
    return PROFILE;
  }

  async submitFeedback(_clientId: string, body: FeedbackRequest): Promise<FeedbackResponse> {
    this.feedbacks.push(body);
    this.series.push({ round: body.round, score: 0.4 + 0.01 * this.series.length });
    return { case_id: this.feedbacks.length };
  }

  async getMetrics(): Promise<MetricsResponse> {
    return {
      global_model: {
        round: 0,
        class_mass: { entertainment: 0, smart_home: 0, general_query: 0, personal_request: 0 },
        accuracy: { entertainment: 0, smart_home: 0, general_query: 0, personal_request: 0 },
      },
      satisfaction: {
        count: this.series.length,
        mean: this.series.length ? this.series[this.series.length - 1].score : null,
        series: [...this.series],
      },
      case_count: this.feedbacks.length,
      last_plan: this.planned
        ? { round: 0, assignments: { c0001: 'INT8' }, slot_usage: { INT4: 0, INT8: 1, FP16: 0, FP32: 0 }, utilization: 0.25 }
        : null,
    };
  }
}
