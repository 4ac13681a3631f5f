import { describe, expect, it } from 'vitest';

import { badgeClass, formatAge, impactBars, scoreBadge } from './format.js';
import type { TopFeature } from './types.js';

describe('scoreBadge', () => {
  it('renders a raw probability of 0.92 (threat score 9.2) as "9.2"', () => {
    // the server computes threat_score = round(raw_probability * 10, 1)
    expect(scoreBadge(9.2)).toBe('9.2');
  });

  it('always shows one decimal', () => {
    expect(scoreBadge(10)).toBe('10.0');
    expect(scoreBadge(0)).toBe('0.0');
    expect(scoreBadge(3.25)).toBe('3.3');
  });

  it('marks unscored entries', () => {
    expect(scoreBadge(null)).toBe('N/A');
    expect(badgeClass(null)).toBe('badge-unscored');
  });

  it('classes by severity band', () => {
    expect(badgeClass(9.2)).toBe('badge-high');
    expect(badgeClass(5)).toBe('badge-medium');
    expect(badgeClass(1.1)).toBe('badge-low');
  });
});

describe('formatAge', () => {
  it('picks sensible units', () => {
    expect(formatAge(1000, 1030)).toBe('30s');
    expect(formatAge(1000, 1000 + 5 * 60)).toBe('5m');
    expect(formatAge(1000, 1000 + 3 * 3600)).toBe('3h');
    expect(formatAge(1000, 1000 + 2 * 86400)).toBe('2d');
  });
});

describe('impactBars', () => {
  const feature = (name: string, contribution: number): TopFeature => ({
    name,
    contribution,
    direction: contribution >= 0 ? 'increases' : 'decreases',
  });

  it('sorts by absolute contribution and limits to top k', () => {
    const bars = impactBars(
      [feature('a', 0.1), feature('b', -0.5), feature('c', 0.3)],
      2,
    );
    expect(bars.map((b) => b.name)).toEqual(['b', 'c']);
    expect(bars[0]?.widthPercent).toBe(100);
    expect(bars[1]?.widthPercent).toBeCloseTo(60);
  });

  it('keeps direction for negative contributions', () => {
    const bars = impactBars([feature('x', -0.2)]);
    expect(bars[0]?.direction).toBe('decreases');
  });

  it('returns nothing when every contribution is zero', () => {
    expect(impactBars([feature('a', 0), feature('b', 0)])).toEqual([]);
  });

  it('shows all features when k exceeds availability', () => {
    const bars = impactBars([feature('a', 0.1)], 5);
    expect(bars).toHaveLength(1);
  });
});
