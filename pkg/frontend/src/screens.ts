// Screen state mirrors the engine's session state: the UI never decides
// on its own which screen a learner should see.

import type { SessionSnapshot } from './types.js';

export type Screen =
  | { kind: 'level_select' }
  | { kind: 'lesson'; level: number; step: string }
  | { kind: 'creation' };

export function screenFor(snapshot: SessionSnapshot): Screen {
  if (snapshot.mode === 'learning' && snapshot.level_id && snapshot.step) {
    return { kind: 'lesson', level: snapshot.level_id, step: snapshot.step };
  }
  if (snapshot.mode === 'creation') {
    return { kind: 'creation' };
  }
  return { kind: 'level_select' };
}

export function sameScreen(a: Screen, b: Screen): boolean {
  if (a.kind !== b.kind) return false;
  if (a.kind === 'lesson' && b.kind === 'lesson') {
    return a.level === b.level && a.step === b.step;
  }
  return true;
}

export class ScreenState {
  current: Screen = { kind: 'level_select' };

  /** Apply an engine snapshot; returns true when the screen changed. */
  apply(snapshot: SessionSnapshot): boolean {
    const next = screenFor(snapshot);
    if (sameScreen(this.current, next)) return false;
    this.current = next;
    return true;
  }
}
