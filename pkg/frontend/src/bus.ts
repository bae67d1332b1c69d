// Event bus wiring the panels together. Cursor traffic is debounced at the
// store, not here; the bus itself is a dumb fan-out.

export type BusEvent =
  | { kind: "VERSION_CHANGED"; versionId: string | null }
  | { kind: "CURSOR_CHANGED"; fabula: number; syuzhet: number }
  | { kind: "TAB_CHANGED"; tab: string };

type Handler = (event: BusEvent) => void;

export class Bus {
  private handlers = new Map<BusEvent["kind"], Set<Handler>>();

  on(kind: BusEvent["kind"], handler: Handler): () => void {
    let set = this.handlers.get(kind);
    if (!set) {
      set = new Set();
      this.handlers.set(kind, set);
    }
    set.add(handler);
    return () => set!.delete(handler);
  }

  emit(event: BusEvent): void {
    const set = this.handlers.get(event.kind);
    if (set) for (const handler of [...set]) handler(event);
  }
}
