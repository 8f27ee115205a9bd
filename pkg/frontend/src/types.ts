// Wire types for the engine protocol. The UI never re-derives any of
// this: whatever the engine says is what gets shown.

export type Arrangement = 'single' | 'doubled' | 'overlap';
export type ShapeKind = 'square' | 'triangle' | 'circle';
export type Side = 'left' | 'right' | 'above' | 'gap';
export type SnapKind = 'attract' | 'repel' | 'none';

export interface SymbolRecord {
  arrangement: Arrangement;
  shapes: ShapeKind[];
}

export interface DegreeSymbol {
  degree: string;
  symbol: SymbolRecord;
  functions: string[];
  strength: 'normal' | 'strong';
  tenon: string[];
  mortise: string[];
}

export interface SnapRecord {
  kind: SnapKind;
  target_id: string | null;
  side: Side | null;
  click_sound: boolean;
}

export interface BlockRecord {
  id: string;
  degree: string;
  tenon: string[];
  mortise: string[];
  symbol?: SymbolRecord;
}

export interface BuildingDoc {
  key: string;
  base: { degree: string; tenon: string[]; mortise: string[] }[];
  prolongations: { kind: string; anchor: number; inner: string[] }[];
}

export interface LevelRecord {
  id: number;
  teaches: string;
  key: string;
  intro_text: string;
  includes_basics: boolean;
  steps: string[];
  demo_building: BuildingDoc;
  surface: string[];
  scale_circle: string[];
  puzzle_seed: number;
  tempo_bpm: number;
  chord_beats: number;
}

export interface PuzzleSlotRecord {
  index: number;
  role: 'base' | 'neighbor' | 'passing';
  anchor: number;
  inner_index: number | null;
}

export interface WorkspaceState {
  key: string;
  blocks: BlockRecord[];
  row: string[];
  row_origin: number;
  neighbors: Record<string, string[]>;
  passings: Record<string, string[]>;
}

export interface SessionSnapshot {
  id: string;
  mode: 'idle' | 'learning' | 'creation';
  level_id: number | null;
  step: string | null;
  progress: { completed_levels: number[]; stats: Record<string, unknown> };
  unlocks: Record<string, 'locked' | 'unlocked' | 'completed'>;
  palette: { degree: string; symbol: SymbolRecord; tenon_options: string[]; mortise: string[] }[];
  events: number;
  puzzle?: {
    slots: PuzzleSlotRecord[];
    blocks: BlockRecord[];
    arrangement: Record<string, string>;
  };
  workspace?: WorkspaceState;
  demo_building?: BuildingDoc;
}

export interface PlaybackEventRecord {
  tick: number;
  kind: 'note_on' | 'note_off';
  note: number;
  velocity: number;
}

export interface EventRecord {
  seq: number;
  type: string;
  at: number | null;
  data: Record<string, unknown>;
}

export interface ActionResponse {
  ok: boolean;
  error?: string;
  message?: string;
  result?: Record<string, unknown>;
  session?: SessionSnapshot;
}
