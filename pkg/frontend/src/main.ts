/** Bootstrap: wire the controller to the page. */

import { HttpApi } from './api';
import { ChatController } from './state';
import { Panels, renderAll } from './render';
import type { FactorLabel, HardwareSpec } from './types';

declare global {
  interface Window {
    QUANTPLAN_BASE_URL?: string;
  }
}

const DEFAULT_HARDWARE: HardwareSpec = {
  processor_class: 't4-premium',
  ram_mb: 4096,
  power_state: 'mains',
  available_levels: ['INT4', 'INT8', 'FP16', 'FP32'],
};

function mustGet<T extends HTMLElement>(id: string): T {
  const node = document.getElementById(id);
  if (!node) throw new Error(`missing element #${id}`);
  return node as T;
}

function main(): void {
  const baseUrl = window.QUANTPLAN_BASE_URL ?? 'http://127.0.0.1:8000';
  const panels: Panels = {
    messages: mustGet('messages'),
    profile: mustGet('profile'),
    assignment: mustGet('assignment'),
    trend: mustGet('trend'),
    error: mustGet('error'),
    sendButton: mustGet<HTMLButtonElement>('send'),
    startButton: mustGet<HTMLButtonElement>('start'),
    feedbackSection: mustGet('feedback'),
  };
  const controller = new ChatController(new HttpApi(baseUrl), (state) => renderAll(state, panels));

  const input = mustGet<HTMLInputElement>('reply');
  panels.startButton.addEventListener('click', async () => {
    if (!controller.state.clientId) {
      await controller.register(DEFAULT_HARDWARE);
    }
    await controller.startSession('initialization');
  });
  const send = async () => {
    const text = input.value;
    input.value = '';
    await controller.sendReply(text);
  };
  panels.sendButton.addEventListener('click', send);
  input.addEventListener('keydown', (event) => {
    if (event.key === 'Enter' && !panels.sendButton.disabled) void send();
  });

  mustGet<HTMLButtonElement>('submit-feedback').addEventListener('click', async () => {
    const ratings = {} as Record<FactorLabel, number>;
    for (const factor of ['accuracy', 'energy', 'latency'] as FactorLabel[]) {
      ratings[factor] = Number(mustGet<HTMLInputElement>(`rate-${factor}`).value);
    }
    const comment = mustGet<HTMLTextAreaElement>('comment').value;
    await controller.submitFeedback(ratings, comment);
  });

  renderAll(controller.state, panels);
}

document.addEventListener('DOMContentLoaded', main);
