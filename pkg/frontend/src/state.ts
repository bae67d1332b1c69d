import { Bus } from "./bus.js";
import { debounce } from "./debounce.js";

export const CURSOR_DEBOUNCE_MS = 120;

export type Tab = "graph" | "dashboard" | "console";

export interface UiState {
  project: string;
  activeVersionId: string | null;
  fabulaCursor: number;
  syuzhetCursor: number;
  activeTab: Tab;
}

const FRESH_TAB_STATE = { fabulaCursor: 0, syuzhetCursor: 0 };

/**
 * Holds the workspace state and turns writes into bus traffic.
 *
 * Cursor writes land in the state immediately (sliders feel live) but the
 * CURSOR_CHANGED event -- the thing that triggers refetches -- fires only
 * after a 120 ms quiet window. Selecting a version resets the per-tab state
 * and fires VERSION_CHANGED at once.
 */
export class Store {
  readonly state: UiState;
  private emitCursor: ReturnType<typeof debounce<[]>>;

  constructor(
    private bus: Bus,
    project = "default",
  ) {
    this.state = {
      project,
      activeVersionId: null,
      ...FRESH_TAB_STATE,
      activeTab: "graph",
    };
    this.emitCursor = debounce(() => {
      this.bus.emit({
        kind: "CURSOR_CHANGED",
        fabula: this.state.fabulaCursor,
        syuzhet: this.state.syuzhetCursor,
      });
    }, CURSOR_DEBOUNCE_MS);
  }

  setVersion(versionId: string | null): void {
    this.emitCursor.cancel();
    this.state.activeVersionId = versionId;
    Object.assign(this.state, FRESH_TAB_STATE);
    this.bus.emit({ kind: "VERSION_CHANGED", versionId });
  }

  setFabulaCursor(value: number): void {
    this.state.fabulaCursor = value;
    this.emitCursor();
  }

  setSyuzhetCursor(value: number): void {
    this.state.syuzhetCursor = value;
    this.emitCursor();
  }

  setTab(tab: Tab): void {
    this.state.activeTab = tab;
    this.bus.emit({ kind: "TAB_CHANGED", tab });
  }
}
