// Display formatting. All numbers come from server payloads; nothing is
// rescored client-side.

import type { TopFeature } from './types.js';

export function scoreBadge(threatScore: number | null): string {
  if (threatScore === null) return 'N/A';
  return threatScore.toFixed(1);
}

export function badgeClass(threatScore: number | null): string {
  if (threatScore === null) return 'badge-unscored';
  if (threatScore >= 7) return 'badge-high';
  if (threatScore >= 3) return 'badge-medium';
  return 'badge-low';
}

export function formatAge(createdAt: number, nowSeconds: number): string {
  const age = Math.max(0, nowSeconds - createdAt);
  if (age < 60) return `${Math.floor(age)}s`;
  if (age < 3600) return `${Math.floor(age / 60)}m`;
  if (age < 86400) return `${Math.floor(age / 3600)}h`;
  return `${Math.floor(age / 86400)}d`;
}

export interface ImpactBar {
  name: string;
  contribution: number;
  direction: 'increases' | 'decreases';
  widthPercent: number; // relative to the largest |contribution|
}

export function impactBars(features: TopFeature[], topK = 5): ImpactBar[] {
  const sorted = [...features].sort(
    (a, b) => Math.abs(b.contribution) - Math.abs(a.contribution),
  );
  const top = sorted.slice(0, topK);
  const maxAbs = Math.max(...top.map((f) => Math.abs(f.contribution)), 0);
  if (maxAbs === 0) return [];
  return top.map((f) => ({
    name: f.name,
    contribution: f.contribution,
    direction: f.direction,
    widthPercent: (Math.abs(f.contribution) / maxAbs) * 100,
  }));
}
