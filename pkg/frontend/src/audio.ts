// Sound: the snap click and tick-scheduled chord playback. All WebAudio
// use is wrapped so a missing AudioContext degrades to visual-only
// playback (highlights still run on timers).

import type { PlaybackEventRecord } from './types.js';

type ContextFactory = () => AudioContext | null;

function defaultFactory(): AudioContext | null {
  try {
    const Ctor =
      (globalThis as { AudioContext?: typeof AudioContext }).AudioContext ??
      (globalThis as { webkitAudioContext?: typeof AudioContext }).webkitAudioContext;
    return Ctor ? new Ctor() : null;
  } catch {
    return null;
  }
}

export class ClickSound {
  private ctx: AudioContext | null = null;

  constructor(private readonly factory: ContextFactory = defaultFactory) {}

  private context(): AudioContext | null {
    if (!this.ctx) this.ctx = this.factory();
    return this.ctx;
  }

  /** Short percussive tick for a successful snap. */
  play(): void {
    const ctx = this.context();
    if (!ctx) return;
    const osc = ctx.createOscillator();
    const gain = ctx.createGain();
    osc.type = 'square';
    osc.frequency.value = 1800;
    gain.gain.setValueAtTime(0.3, ctx.currentTime);
    gain.gain.exponentialRampToValueAtTime(0.001, ctx.currentTime + 0.06);
    osc.connect(gain).connect(ctx.destination);
    osc.start();
    osc.stop(ctx.currentTime + 0.07);
  }
}

export interface PlaybackHooks {
  onChordStart?: (slotIndex: number, atSeconds: number) => void;
  onFinished?: () => void;
}

/**
 * Schedules engine playback events at tick-accurate times. Chord
 * highlights fire on timers either way; notes sound only when audio is
 * available.
 */
export class ChordPlayer {
  private ctx: AudioContext | null = null;
  private timers: ReturnType<typeof setTimeout>[] = [];
  private nodes: OscillatorNode[] = [];

  constructor(private readonly factory: ContextFactory = defaultFactory) {}

  stop(): void {
    for (const timer of this.timers) clearTimeout(timer);
    this.timers = [];
    for (const osc of this.nodes) {
      try {
        osc.stop();
      } catch {
        // already stopped
      }
    }
    this.nodes = [];
  }

  play(
    events: PlaybackEventRecord[],
    tempoBpm: number,
    ticksPerQuarter: number,
    hooks: PlaybackHooks = {},
  ): void {
    this.stop();
    if (!this.ctx) this.ctx = this.factory();
    const secondsPerTick = 60 / (tempoBpm * ticksPerQuarter);
    const t0 = this.ctx ? this.ctx.currentTime + 0.05 : 0;

    const onTicks = [...new Set(
      events.filter((e) => e.kind === 'note_on').map((e) => e.tick),
    )].sort((a, b) => a - b);
    onTicks.forEach((tick, slotIndex) => {
      const at = tick * secondsPerTick;
      this.timers.push(
        setTimeout(() => hooks.onChordStart?.(slotIndex, at), at * 1000),
      );
    });
    const end = Math.max(0, ...events.map((e) => e.tick)) * secondsPerTick;
    this.timers.push(setTimeout(() => hooks.onFinished?.(), end * 1000));

    if (!this.ctx) return; // visual-only fallback
    const offs = new Map<string, PlaybackEventRecord[]>();
    for (const e of events) {
      if (e.kind !== 'note_off') continue;
      const queue = offs.get(String(e.note)) ?? [];
      queue.push(e);
      offs.set(String(e.note), queue);
    }
    for (const e of events) {
      if (e.kind !== 'note_on') continue;
      const queue = offs.get(String(e.note)) ?? [];
      const off = queue.find((candidate) => candidate.tick > e.tick);
      if (off) queue.splice(queue.indexOf(off), 1);
      const osc = this.ctx.createOscillator();
      const gain = this.ctx.createGain();
      osc.type = 'triangle';
      osc.frequency.value = 440 * Math.pow(2, (e.note - 69) / 12);
      gain.gain.value = (e.velocity / 127) * 0.25;
      osc.connect(gain).connect(this.ctx.destination);
      osc.start(t0 + e.tick * secondsPerTick);
      osc.stop(t0 + (off ? off.tick : e.tick + ticksPerQuarter) * secondsPerTick);
      this.nodes.push(osc);
    }
  }
}
