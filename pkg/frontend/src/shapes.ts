// Block rendering as a structural node tree. The tree derives solely
// from engine symbol data, which keeps it testable without a DOM and
// guarantees the UI draws exactly what the engine says a chord looks
// like. `mount` turns a tree into real (SVG) elements in the browser.

import type { BlockRecord, ShapeKind, SymbolRecord } from './types.js';

export interface VNode {
  tag: string;
  attrs: Record<string, string>;
  children: VNode[];
}

const SVG_NS = 'http://www.w3.org/2000/svg';

function node(tag: string, attrs: Record<string, string>, children: VNode[] = []): VNode {
  return { tag, attrs, children };
}

/** One shape outline centered at (cx, cy) with "radius" r. */
export function shapeNode(kind: ShapeKind, cx: number, cy: number, r: number): VNode {
  const cls = `shape shape-${kind}`;
  if (kind === 'square') {
    return node('rect', {
      class: cls,
      x: String(cx - r),
      y: String(cy - r),
      width: String(2 * r),
      height: String(2 * r),
    });
  }
  if (kind === 'circle') {
    return node('circle', { class: cls, cx: String(cx), cy: String(cy), r: String(r) });
  }
  const points = [
    `${cx},${cy - r}`,
    `${cx - r},${cy + r}`,
    `${cx + r},${cy + r}`,
  ].join(' ');
  return node('polygon', { class: cls, points });
}

/**
 * The symbol composition of one chord: a single shape, two copies of a
 * shape (strong chords), or two distinct overlapping shapes
 * (dual-function chords).
 */
export function symbolView(symbol: SymbolRecord, size = 48): VNode {
  const mid = size / 2;
  const r = size * 0.3;
  let children: VNode[];
  if (symbol.arrangement === 'single') {
    children = [shapeNode(symbol.shapes[0]!, mid, mid, r)];
  } else if (symbol.arrangement === 'doubled') {
    const offset = size * 0.12;
    children = [
      shapeNode(symbol.shapes[0]!, mid - offset, mid, r * 0.92),
      shapeNode(symbol.shapes[1]!, mid + offset, mid, r * 0.92),
    ];
  } else {
    const offset = size * 0.14;
    children = [
      shapeNode(symbol.shapes[0]!, mid - offset, mid - offset * 0.4, r * 0.95),
      shapeNode(symbol.shapes[1]!, mid + offset, mid + offset * 0.4, r * 0.95),
    ];
  }
  return node(
    'svg',
    {
      class: `symbol symbol-${symbol.arrangement}`,
      viewBox: `0 0 ${size} ${size}`,
      width: String(size),
      height: String(size),
    },
    children,
  );
}

/**
 * A full block view: body, symbol, and the connector profile (tenon
 * teeth on the right edge, mortise notches on the left), one mark per
 * harmonic function the engine reports.
 */
export function blockView(block: BlockRecord, size = 48): VNode {
  const children: VNode[] = [
    node('rect', {
      class: 'block-body',
      x: '1', y: '1',
      width: String(size - 2),
      height: String(size - 2),
      rx: '6',
    }),
  ];
  if (block.symbol) {
    children.push(symbolView(block.symbol, size));
  }
  block.mortise.forEach((fn, i) => {
    children.push(
      node('rect', {
        class: `mortise mortise-${fn}`,
        x: '0',
        y: String(8 + i * 12),
        width: '4',
        height: '8',
      }),
    );
  });
  block.tenon.forEach((fn, i) => {
    children.push(
      node('rect', {
        class: `tenon tenon-${fn}`,
        x: String(size - 4),
        y: String(8 + i * 12),
        width: '4',
        height: '8',
      }),
    );
  });
  return node(
    'svg',
    {
      class: 'block',
      'data-block-id': block.id,
      'data-degree': block.degree,
      viewBox: `0 0 ${size} ${size}`,
      width: String(size),
      height: String(size),
    },
    children,
  );
}

export function mount(vnode: VNode, doc: Document): Element {
  const el = doc.createElementNS(SVG_NS, vnode.tag);
  for (const [name, value] of Object.entries(vnode.attrs)) {
    el.setAttribute(name, value);
  }
  for (const child of vnode.children) {
    el.appendChild(mount(child, doc));
  }
  return el;
}

/** Flatten a node tree to `tag.class` strings, for structural assertions. */
export function structure(vnode: VNode): string[] {
  const here = vnode.attrs.class ? `${vnode.tag}.${vnode.attrs.class}` : vnode.tag;
  return [here, ...vnode.children.flatMap(structure)];
}
