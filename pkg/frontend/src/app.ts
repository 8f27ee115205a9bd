// Browser studio: level select, the guided lesson flow, and the free
// creation workspace. All rules come from the engine over HTTP/SSE;
// this file is display and pointer plumbing only.

import { EngineClient } from './api.js';
import { ChordPlayer, ClickSound } from './audio.js';
import { DragController, type FeedbackSink, type ProbeEngine } from './drag.js';
import { blockView, mount, symbolView } from './shapes.js';
import { ScreenState } from './screens.js';
import type {
  BlockRecord,
  LevelRecord,
  PlaybackEventRecord,
  SessionSnapshot,
  Side,
  SnapRecord,
} from './types.js';

const CELL = 56;        // pixels per block-width unit
const ORIGIN_X = 60;    // pixel x of grid 0
const ROW0_Y = 170;     // pixel y of the base row
const ROW_H = 64;       // pixel distance between rows

const engine = new EngineClient('');
const click = new ClickSound();
const player = new ChordPlayer();
const screens = new ScreenState();

let session: SessionSnapshot | null = null;
let levels: LevelRecord[] = [];
let pickedTrayBlock: string | null = null;

const app = document.getElementById('app')!;
const statusBar = document.getElementById('status')!;
const eventLog = document.getElementById('events')!;

function setStatus(text: string, tone: 'info' | 'bad' | 'good' = 'info'): void {
  statusBar.textContent = text;
  statusBar.className = `status ${tone}`;
}

function logEvent(text: string): void {
  const line = document.createElement('div');
  line.textContent = text;
  eventLog.prepend(line);
  while (eventLog.childElementCount > 40) eventLog.lastElementChild!.remove();
}

async function act(action: Record<string, unknown>): Promise<boolean> {
  if (!session) return false;
  const response = await engine.act(session.id, action);
  if (!response.ok) {
    setStatus(`${response.error}: ${response.message ?? ''}`, 'bad');
  } else if (response.session) {
    session = response.session;
    render();
  }
  return response.ok;
}

async function refresh(): Promise<void> {
  if (!session) return;
  session = await engine.snapshot(session.id);
  render();
}

// ---------------------------------------------------------------------------
// Workspace geometry and dragging
// ---------------------------------------------------------------------------

function toGrid(px: number, py: number): { x: number; y: number } {
  const x = (px - ORIGIN_X) / CELL;
  const y = py < ROW0_Y - ROW_H / 2 ? 1 : 0;
  return { x, y };
}

function gridToPx(x: number, y: number): { left: number; top: number } {
  return { left: ORIGIN_X + x * CELL, top: ROW0_Y - y * ROW_H };
}

const probeEngine: ProbeEngine = {
  async probe(blockId, x, y): Promise<SnapRecord> {
    const response = await engine.act(session!.id, {
      action: 'probe', block: blockId, x, y,
    });
    if (!response.ok || !response.result) {
      return { kind: 'none', target_id: null, side: null, click_sound: false };
    }
    if (response.session) session = response.session;
    return response.result as unknown as SnapRecord;
  },
  async attach(blockId, targetId, side) {
    const response = await engine.act(session!.id, {
      action: 'attach', block: blockId, target: targetId, side,
    });
    if (response.ok && response.session) session = response.session;
    return { ok: response.ok, error: response.error };
  },
};

const feedback: FeedbackSink = {
  follow(blockId, x, y) {
    const el = document.querySelector<HTMLElement>(`[data-drag-id="${blockId}"]`);
    if (el) {
      const { left, top } = gridToPx(x, y);
      el.style.left = `${left}px`;
      el.style.top = `${top}px`;
      el.classList.remove('repelling');
    }
  },
  repel(blockId, targetId) {
    const el = document.querySelector<HTMLElement>(`[data-drag-id="${blockId}"]`);
    el?.classList.add('repelling');
    setStatus(`those connectors do not fit ${targetId}`, 'bad');
  },
  snapped(blockId, targetId, side: Side) {
    click.play();
    setStatus(`snapped ${blockId} ${side} of ${targetId}`, 'good');
    void refresh();
  },
  rejected(_blockId, error) {
    setStatus(error, 'bad');
    void refresh();
  },
  dropped() {
    void refresh();
  },
};

const drag = new DragController(probeEngine, feedback);

function wireDrag(el: HTMLElement, blockId: string): void {
  el.dataset.dragId = blockId;
  el.addEventListener('pointerdown', (downEvent) => {
    downEvent.preventDefault();
    if (!session?.workspace) return;
    const rowEmpty = session.workspace.row.length === 0;
    drag.pointerDown(blockId);
    el.setPointerCapture(downEvent.pointerId);
    el.classList.add('dragging');
    let lastGrid = { x: 0, y: 0 };
    let moving = false;

    const onMove = (moveEvent: PointerEvent) => {
      const rect = canvasRect();
      lastGrid = toGrid(moveEvent.clientX - rect.left, moveEvent.clientY - rect.top);
      if (!moving) {
        moving = true;
        void drag.pointerMove(lastGrid.x, lastGrid.y).finally(() => {
          moving = false;
        });
      }
      feedback.follow(blockId, lastGrid.x, lastGrid.y);
    };
    const onUp = async () => {
      el.removeEventListener('pointermove', onMove);
      el.removeEventListener('pointerup', onUp);
      el.classList.remove('dragging');
      const wasDragging = drag.dragging;
      drag.pointerUp();
      if (wasDragging && rowEmpty) {
        await act({ action: 'place_seed', block: blockId, x: Math.round(lastGrid.x) });
      } else {
        void refresh();
      }
    };
    el.addEventListener('pointermove', onMove);
    el.addEventListener('pointerup', onUp);
  });
}

function canvasRect(): DOMRect {
  return document.getElementById('canvas')!.getBoundingClientRect();
}

// ---------------------------------------------------------------------------
// Rendering
// ---------------------------------------------------------------------------

function el(tag: string, cls = '', text = ''): HTMLElement {
  const out = document.createElement(tag);
  if (cls) out.className = cls;
  if (text) out.textContent = text;
  return out;
}

function blockElement(block: BlockRecord, draggable: boolean): HTMLElement {
  const wrap = el('div', 'block-wrap');
  wrap.appendChild(mount(blockView(block), document));
  const label = el('div', 'block-label', block.degree);
  wrap.appendChild(label);
  if (draggable) wireDrag(wrap, block.id);
  return wrap;
}

function renderLevelSelect(root: HTMLElement): void {
  root.appendChild(el('h2', '', 'Pick a level'));
  const grid = el('div', 'level-grid');
  for (const level of levels) {
    const state = session!.unlocks[String(level.id)] ?? 'locked';
    const card = el('button', `level-card ${state}`);
    card.appendChild(el('div', 'level-number', String(level.id)));
    card.appendChild(el('div', 'level-teaches', level.teaches));
    card.appendChild(el('div', 'level-state', state));
    if (state !== 'locked') {
      card.addEventListener('click', () => void act({ action: 'start_level', level: level.id }));
    } else {
      (card as HTMLButtonElement).disabled = true;
    }
    grid.appendChild(card);
  }
  root.appendChild(grid);
  if (session!.palette.length > 0) {
    const create = el('button', 'primary', 'Creation mode');
    create.addEventListener('click', () => void act({ action: 'enter_creation' }));
    root.appendChild(create);
  }
}

function currentLevel(): LevelRecord | null {
  return session?.level_id ? levels[session.level_id - 1] ?? null : null;
}

function renderScaleCircle(root: HTMLElement, level: LevelRecord): void {
  const size = 180;
  const svg = document.createElementNS('http://www.w3.org/2000/svg', 'svg');
  svg.setAttribute('viewBox', `0 0 ${size} ${size}`);
  svg.setAttribute('class', 'scale-circle');
  svg.setAttribute('width', String(size));
  svg.setAttribute('height', String(size));
  level.scale_circle.forEach((name, i) => {
    const angle = (i / 7) * 2 * Math.PI - Math.PI / 2;
    const cx = size / 2 + Math.cos(angle) * 64;
    const cy = size / 2 + Math.sin(angle) * 64;
    const dot = document.createElementNS('http://www.w3.org/2000/svg', 'circle');
    dot.setAttribute('cx', String(cx));
    dot.setAttribute('cy', String(cy));
    dot.setAttribute('r', '16');
    dot.setAttribute('class', i === 0 ? 'circle-note tonic' : 'circle-note');
    svg.appendChild(dot);
    const text = document.createElementNS('http://www.w3.org/2000/svg', 'text');
    text.setAttribute('x', String(cx));
    text.setAttribute('y', String(cy + 4));
    text.setAttribute('text-anchor', 'middle');
    text.textContent = name;
    svg.appendChild(text);
  });
  root.appendChild(svg);
}

function renderWorkspaceCanvas(root: HTMLElement): void {
  const canvas = el('div', 'canvas');
  canvas.id = 'canvas';
  const ws = session!.workspace;
  if (ws) {
    const blockById = new Map(ws.blocks.map((b) => [b.id, b] as const));
    const placed = (id: string, x: number, y: number) => {
      const block = blockById.get(id);
      if (!block) return;
      const wrap = blockElement(block, false);
      wrap.classList.add('placed');
      const { left, top } = gridToPx(x, y);
      wrap.style.left = `${left}px`;
      wrap.style.top = `${top}px`;
      canvas.appendChild(wrap);
    };
    ws.row.forEach((id, i) => placed(id, ws.row_origin + i, 0));
    for (const [anchor, chain] of Object.entries(ws.neighbors)) {
      const ax = ws.row_origin + ws.row.indexOf(anchor);
      chain.forEach((id, j) => placed(id, ax + j, 1));
    }
    for (const [left, chain] of Object.entries(ws.passings)) {
      const lx = ws.row_origin + ws.row.indexOf(left);
      chain.forEach((id, j) => placed(id, lx + 0.5 + j, 1));
    }
    const tray = el('div', 'tray');
    for (const block of ws.blocks) {
      const isPlaced =
        ws.row.includes(block.id) ||
        Object.values(ws.neighbors).some((c) => c.includes(block.id)) ||
        Object.values(ws.passings).some((c) => c.includes(block.id));
      if (!isPlaced) {
        const wrap = blockElement(block, true);
        wrap.classList.add('detached');
        tray.appendChild(wrap);
      }
    }
    root.appendChild(canvas);
    root.appendChild(el('div', 'tray-label', 'loose blocks'));
    root.appendChild(tray);
  } else {
    root.appendChild(canvas);
  }
}

function renderPuzzle(root: HTMLElement): void {
  const puzzle = session!.puzzle;
  if (!puzzle) return;
  const board = el('div', 'puzzle-board');
  for (const slot of puzzle.slots) {
    const cell = el('button', `slot slot-${slot.role}`);
    cell.appendChild(el('div', 'slot-role', `${slot.role} ${slot.anchor}`));
    const blockId = puzzle.arrangement[String(slot.index)];
    if (blockId) {
      const block = puzzle.blocks.find((b) => b.id === blockId);
      if (block) cell.appendChild(mount(blockView(block), document));
    }
    cell.addEventListener('click', () => {
      if (pickedTrayBlock) {
        void act({ action: 'puzzle_place', slot: slot.index, block: pickedTrayBlock });
        pickedTrayBlock = null;
      } else if (blockId) {
        void act({ action: 'puzzle_clear', slot: slot.index });
      }
    });
    board.appendChild(cell);
  }
  root.appendChild(board);
  const tray = el('div', 'tray');
  const used = new Set(Object.values(puzzle.arrangement));
  for (const block of puzzle.blocks) {
    if (used.has(block.id)) continue;
    const wrap = blockElement(block, false);
    wrap.classList.add(pickedTrayBlock === block.id ? 'picked' : 'detached');
    wrap.addEventListener('click', () => {
      pickedTrayBlock = block.id;
      render();
    });
    tray.appendChild(wrap);
  }
  root.appendChild(el('div', 'tray-label', 'shuffled blocks (click one, then a slot)'));
  root.appendChild(tray);
  const submit = el('button', 'primary', 'Submit reconstruction');
  submit.addEventListener('click', () => void act({ action: 'advance', to: 'submit' }));
  root.appendChild(submit);
}

function renderLesson(root: HTMLElement): void {
  const level = currentLevel();
  if (!level || !session) return;
  const step = session.step!;
  root.appendChild(el('h2', '', `Level ${level.id}: the ${level.teaches} chord`));
  root.appendChild(el('div', 'step-name', `step: ${step}`));

  if (step === 'intro' || step === 'chord_basics') {
    root.appendChild(el('p', 'intro', level.intro_text));
    if (step === 'chord_basics') {
      root.appendChild(el('p', 'intro',
        'Squares feel stable, triangles feel tense, circles feel smooth. ' +
        'A block connects to the next one when its right-edge tenon matches ' +
        'a function in the next block’s left-edge mortise.'));
    }
  } else if (step === 'new_chord') {
    renderScaleCircle(root, level);
    const symbols = session.palette.find((p) => p.degree === level.teaches);
    void symbols;
  } else if (step === 'demo_build') {
    root.appendChild(el('p', 'intro',
      'This is the demo building. Drag the loose blocks to rebuild it, or just listen.'));
    renderWorkspaceCanvas(root);
    const play = el('button', '', 'Play the building');
    play.addEventListener('click', () => void playCurrent());
    root.appendChild(play);
  } else if (step === 'reconstruct') {
    renderPuzzle(root);
  } else if (step === 'complete') {
    root.appendChild(el('p', 'intro', 'Level complete.'));
    const back = el('button', 'primary', 'Back to levels');
    back.addEventListener('click', () => {
      session!.mode = 'idle';
      render();
      void refresh();
    });
    root.appendChild(back);
  }
  if (step !== 'reconstruct' && step !== 'complete') {
    const next = el('button', 'primary', 'Next');
    next.addEventListener('click', () => void act({ action: 'advance', to: 'next' }));
    root.appendChild(next);
  }
}

function renderCreation(root: HTMLElement): void {
  root.appendChild(el('h2', '', 'Creation mode'));
  const paletteBar = el('div', 'palette');
  for (const entry of session!.palette) {
    const button = el('button', 'palette-entry');
    button.appendChild(mount(symbolView(entry.symbol), document));
    button.appendChild(el('div', 'block-label', entry.degree));
    button.addEventListener('click', () =>
      void act({ action: 'assemble', degree: entry.degree }));
    paletteBar.appendChild(button);
  }
  root.appendChild(paletteBar);
  renderWorkspaceCanvas(root);
  const controls = el('div', 'controls');
  const play = el('button', '', 'Play');
  play.addEventListener('click', () => void playCurrent());
  const finalize = el('button', 'primary', 'Finalize composition');
  finalize.addEventListener('click', async () => {
    const name = prompt('Name this composition:') ?? 'untitled';
    await act({ action: 'finalize', name });
  });
  const back = el('button', '', 'Back to levels');
  back.addEventListener('click', () => {
    session!.mode = 'idle';
    render();
    void refresh();
  });
  controls.append(play, finalize, back);
  root.appendChild(controls);
}

async function playCurrent(): Promise<void> {
  if (!session) return;
  const response = await engine.act(session.id, { action: 'play' });
  if (!response.ok || !response.result) {
    setStatus(`${response.error}: ${response.message ?? ''}`, 'bad');
    return;
  }
  const events = response.result.events as PlaybackEventRecord[];
  const level = currentLevel();
  player.play(events, level?.tempo_bpm ?? 90, 480, {
    onChordStart: (slot) => setStatus(`playing chord ${slot + 1}`, 'good'),
    onFinished: () => setStatus('playback finished'),
  });
}

function render(): void {
  if (!session) return;
  screens.apply(session);
  app.replaceChildren();
  const screen = screens.current;
  if (screen.kind === 'level_select') renderLevelSelect(app);
  else if (screen.kind === 'lesson') renderLesson(app);
  else renderCreation(app);
}

async function main(): Promise<void> {
  levels = await engine.levels();
  session = await engine.createSession();
  engine.subscribeEvents(session.id, (event) => {
    logEvent(`#${event.seq} ${event.type}`);
    if (event.type === 'hint') {
      setStatus(String(event.data.text ?? 'hint'), 'info');
    }
  });
  setInterval(() => {
    if (session && (session.step === 'demo_build' || session.step === 'reconstruct')) {
      void engine.act(session.id, { action: 'hint_check' });
    }
  }, 5000);
  render();
  setStatus('connected');
}

void main();
