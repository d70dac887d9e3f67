/**
 * Thin REST client for the planning server. Every displayed number comes
 * from these calls; the frontend never recomputes planning results.
 */

import type {
  FeedbackRequest,
  FeedbackResponse,
  HardwareSpec,
  InterviewStartResponse,
  MessageResponse,
  MetricsResponse,
  ClientProfile,
  RegisterResponse,
  Scenario,
} from './types';

export class ApiError extends Error {
  constructor(
    public readonly status: number,
    message: string,
  ) {
    super(message);
    this.name = 'ApiError';
  }
}

export interface Api {
  register(hardware: HardwareSpec): Promise<RegisterResponse>;
  startInterview(clientId: string, scenario: Scenario): Promise<InterviewStartResponse>;
  sendMessage(sessionId: string, text: string): Promise<MessageResponse>;
  getProfile(clientId: string): Promise<ClientProfile>;
  submitFeedback(clientId: string, body: FeedbackRequest): Promise<FeedbackResponse>;
  getMetrics(): Promise<MetricsResponse>;
}

async function request<T>(baseUrl: string, method: string, path: string, body?: unknown): Promise<T> {
  const response = await fetch(baseUrl + path, {
    method,
    headers: body === undefined ? undefined : { 'Content-Type': 'application/json' },
    body: body === undefined ? undefined : JSON.stringify(body),
  });
  if (!response.ok) {
    let detail = response.statusText;
    try {
      const parsed = await response.json();
      detail = typeof parsed.detail === 'string' ? parsed.detail : JSON.stringify(parsed.detail);
    } catch {
      // keep the status text
    }
    throw new ApiError(response.status, detail);
  }
  return (await response.json()) as T;
}

export class HttpApi implements Api {
  constructor(private readonly baseUrl: string) {}

  register(hardware: HardwareSpec): Promise<RegisterResponse> {
    return request(this.baseUrl, 'POST', '/clients', { hardware });
  }

  startInterview(clientId: string, scenario: Scenario): Promise<InterviewStartResponse> {
    return request(this.baseUrl, 'POST', `/clients/${clientId}/interview`, { scenario });
  }

  sendMessage(sessionId: string, text: string): Promise<MessageResponse> {
    return request(this.baseUrl, 'POST', `/interview/${sessionId}/message`, { text });
  }

  getProfile(clientId: string): Promise<ClientProfile> {
    return request(this.baseUrl, 'GET', `/clients/${clientId}/profile`);
  }

  submitFeedback(clientId: string, body: FeedbackRequest): Promise<FeedbackResponse> {
    return request(this.baseUrl, 'POST', `/clients/${clientId}/feedback`, body);
  }

  getMetrics(): Promise<MetricsResponse> {
    return request(this.baseUrl, 'GET', '/metrics');
  }
}
