// The drag loop. Every pointer move is probed against the engine; the
// controller never judges compatibility itself. When the engine answers
// "attract" the blocks snap together immediately (attach + click), when
// it answers "repel" the feedback sink animates the push-back, and
// anything else just follows the pointer.

import type { Side, SnapRecord } from './types.js';

export interface ProbeEngine {
  probe(blockId: string, x: number, y: number): Promise<SnapRecord>;
  attach(
    blockId: string,
    targetId: string,
    side: Side,
  ): Promise<{ ok: boolean; error?: string }>;
}

export interface FeedbackSink {
  /** Free-follow the pointer (no nearby slot). */
  follow(blockId: string, x: number, y: number): void;
  /** Incompatible slot nearby: animate repulsion. */
  repel(blockId: string, targetId: string): void;
  /** Blocks snapped: play the click and run the snap animation. */
  snapped(blockId: string, targetId: string, side: Side): void;
  /** The engine refused an attach the probe had allowed (stale state). */
  rejected(blockId: string, error: string): void;
  /** Drag ended without a snap; the block stays detached. */
  dropped(blockId: string): void;
}

interface DragState {
  blockId: string;
  lastRepelTarget: string | null;
  settled: boolean;
}

export class DragController {
  private state: DragState | null = null;

  constructor(
    private readonly engine: ProbeEngine,
    private readonly feedback: FeedbackSink,
  ) {}

  get dragging(): boolean {
    return this.state !== null && !this.state.settled;
  }

  pointerDown(blockId: string): void {
    this.state = { blockId, lastRepelTarget: null, settled: false };
  }

  async pointerMove(x: number, y: number): Promise<SnapRecord | null> {
    if (!this.state || this.state.settled) return null;
    const { blockId } = this.state;
    const snap = await this.engine.probe(blockId, x, y);
    if (snap.kind === 'attract' && snap.target_id && snap.side) {
      const outcome = await this.engine.attach(blockId, snap.target_id, snap.side);
      if (outcome.ok) {
        this.state.settled = true;
        this.feedback.snapped(blockId, snap.target_id, snap.side);
      } else {
        this.feedback.rejected(blockId, outcome.error ?? 'attach failed');
      }
    } else if (snap.kind === 'repel' && snap.target_id) {
      if (this.state.lastRepelTarget !== snap.target_id) {
        this.state.lastRepelTarget = snap.target_id;
        this.feedback.repel(blockId, snap.target_id);
      }
      this.feedback.follow(blockId, x, y);
    } else {
      this.state.lastRepelTarget = null;
      this.feedback.follow(blockId, x, y);
    }
    return snap;
  }

  pointerUp(): void {
    if (!this.state) return;
    if (!this.state.settled) {
      this.feedback.dropped(this.state.blockId);
    }
    this.state = null;
  }
}
