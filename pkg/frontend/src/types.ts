/**
 * Typed schemas for the planning server's canonical JSON forms.
 * Field names mirror the wire format exactly (snake_case).
 */

export type QuantizationLevel = 'INT4' | 'INT8' | 'FP16' | 'FP32';
export type FactorLabel = 'accuracy' | 'energy' | 'latency';
export type TaskCategoryLabel = 'entertainment' | 'smart_home' | 'general_query' | 'personal_request';
export type Scenario = 'initialization' | 'pre_aggregation' | 'hardware_change';

export interface HardwareSpec {
  processor_class: string;
  ram_mb: number;
  power_state: 'mains' | 'battery_high' | 'battery_low';
  available_levels: QuantizationLevel[];
}

export interface ContextualFactors {
  device_location: string;
  interaction_time: string;
  interaction_frequency: string;
  task_type_mix: Record<TaskCategoryLabel, number>;
}

export interface InferredFactors {
  noise_level: 'low' | 'high';
  data_quantity: 'low' | 'high';
  data_distribution: Record<TaskCategoryLabel, number>;
}

export interface SensitivityWeights {
  weights: Record<FactorLabel, number>;
}

export interface ClientProfile {
  client_id: string;
  hardware: HardwareSpec;
  context: ContextualFactors;
  inferred: InferredFactors;
  estimated_weights: SensitivityWeights;
  contribution_estimate: Partial<Record<QuantizationLevel, number>>;
}

export interface RoundPlan {
  round: number;
  assignments: Record<string, QuantizationLevel>;
  slot_usage: Record<QuantizationLevel, number>;
  utilization: number;
}

export interface RegisterResponse {
  client_id: string;
}

export interface InterviewStartResponse {
  session_id: string;
  agent_message: string;
}

export interface MessageResponse {
  agent_message: string;
  done: boolean;
}

export interface FeedbackRequest {
  round: number;
  level: QuantizationLevel;
  ratings: Record<FactorLabel, number>;
  free_text: string;
}

export interface FeedbackResponse {
  case_id: number;
}

export interface SatisfactionPoint {
  round: number;
  score: number;
}

export interface MetricsResponse {
  global_model: {
    round: number;
    class_mass: Record<TaskCategoryLabel, number>;
    accuracy: Record<TaskCategoryLabel, number>;
  };
  satisfaction: {
    count: number;
    mean: number | null;
    series: SatisfactionPoint[];
  };
  case_count: number;
  last_plan: RoundPlan | null;
}
