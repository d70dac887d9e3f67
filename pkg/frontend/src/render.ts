/**
 * DOM rendering. Pure projection of ChatViewState; no numbers are computed
 * here beyond percentage formatting of server-provided weights.
 */

import type { ChatViewState } from './state';
import type { FactorLabel } from './types';

const FACTORS: FactorLabel[] = ['accuracy', 'energy', 'latency'];

function el<K extends keyof HTMLElementTagNameMap>(
  doc: Document,
  tag: K,
  className?: string,
  text?: string,
): HTMLElementTagNameMap[K] {
  const node = doc.createElement(tag);
  if (className) node.className = className;
  if (text !== undefined) node.textContent = text;
  return node;
}

export function renderMessages(state: ChatViewState, container: HTMLElement): void {
  const doc = container.ownerDocument;
  container.replaceChildren();
  for (const message of state.messages) {
    const bubble = el(doc, 'div', `bubble ${message.role}${message.failed ? ' failed' : ''}`);
    bubble.dataset.role = message.role;
    bubble.textContent = message.text;
    container.appendChild(bubble);
  }
}

export function renderProfile(state: ChatViewState, container: HTMLElement): void {
  const doc = container.ownerDocument;
  container.replaceChildren();
  if (!state.profile) {
    container.appendChild(el(doc, 'p', 'placeholder', 'No profile yet - finish the interview first.'));
    return;
  }
  const card = el(doc, 'div', 'profile-card');
  const context = state.profile.context;
  card.appendChild(
    el(doc, 'p', 'context',
       `${context.device_location} / ${context.interaction_time} / ${context.interaction_frequency}`),
  );
  const weights = state.profile.estimated_weights.weights;
  for (const factor of FACTORS) {
    const row = el(doc, 'div', 'weight-row');
    const percent = weights[factor] * 100;
    row.appendChild(el(doc, 'span', 'weight-label', factor));
    const bar = el(doc, 'div', 'weight-bar');
    bar.dataset.factor = factor;
    bar.dataset.percent = String(percent);
    bar.style.width = `${percent.toFixed(1)}%`;
    row.appendChild(bar);
    row.appendChild(el(doc, 'span', 'weight-value', `${percent.toFixed(1)}%`));
    card.appendChild(row);
  }
  container.appendChild(card);
}

export function renderAssignment(state: ChatViewState, container: HTMLElement): void {
  const doc = container.ownerDocument;
  container.replaceChildren();
  if (!state.assignment) {
    container.appendChild(el(doc, 'p', 'placeholder', 'No assignment yet.'));
    return;
  }
  const badge = el(doc, 'span', 'assignment-badge',
                   `Round ${state.assignment.round + 1}: ${state.assignment.level}`);
  badge.dataset.level = state.assignment.level;
  container.appendChild(badge);
}

export function renderSatisfactionTrend(state: ChatViewState, container: HTMLElement): void {
  const doc = container.ownerDocument;
  container.replaceChildren();
  const list = el(doc, 'ul', 'trend');
  for (const point of state.satisfactionSeries) {
    const item = el(doc, 'li', 'trend-point', `r${point.round}: ${point.score.toFixed(3)}`);
    item.dataset.round = String(point.round);
    item.dataset.score = String(point.score);
    list.appendChild(item);
  }
  container.appendChild(list);
}

export function renderError(state: ChatViewState, container: HTMLElement): void {
  container.textContent = state.error ?? '';
  container.classList.toggle('visible', state.error !== null);
}

export interface Panels {
  messages: HTMLElement;
  profile: HTMLElement;
  assignment: HTMLElement;
  trend: HTMLElement;
  error: HTMLElement;
  sendButton: HTMLButtonElement;
  startButton: HTMLButtonElement;
  feedbackSection: HTMLElement;
}

export function renderAll(state: ChatViewState, panels: Panels): void {
  renderMessages(state, panels.messages);
  renderProfile(state, panels.profile);
  renderAssignment(state, panels.assignment);
  renderSatisfactionTrend(state, panels.trend);
  renderError(state, panels.error);
  panels.sendButton.disabled = state.pending || state.done || state.sessionId === null;
  panels.startButton.disabled = state.pending || state.clientId === null;
  panels.feedbackSection.hidden = state.profile === null;
}
