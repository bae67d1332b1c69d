"""Version tree over world snapshots: one root, content-addressed blobs, JSONL rows.

Every saved world is a `VersionRow` pointing at its ancestor row and at a
content-addressed blob (sha256 of the canonical world JSON), so identical
states deduplicate.  Rows form a tree: exactly one root per project, no
cycles.  Mutations (create/promote/reparent/delete) run behind a single
lock and are flushed to ``versions.jsonl`` + ``blobs/`` when the store is
directory-backed.
"""

from __future__ import annotations

import hashlib
import json
import threading
from datetime import datetime, timezone
from pathlib import Path
from typing import Literal, Optional

from pydantic import BaseModel, Field

from .errors import InvalidWorldError, UnknownNodeError, VersionGraphError
from .world_model import WorldState, canonical_world_json, validate_world

__all__ = ["VersionRow", "VersionStore", "WorldDiff", "TraitChange", "check_tree"]

Source = Literal["ingestion", "manual_edit", "pipeline_run", "promotion"]
BranchPolicy = Literal["auto", "mainline", "shadow"]


class VersionRow(BaseModel):
    id: str
    ancestor_id: Optional[str] = None
    world_id: Literal["factual", "shadow"] = "factual"
    source: Source = "manual_edit"
    created_at: str = ""
    world_ref: str = ""


class TraitChange(BaseModel):
    entity_id: str
    trait: str
    old: Optional[float] = None
    new: Optional[float] = None


class WorldDiff(BaseModel):
    nodes_added: dict[str, list[str]] = Field(default_factory=dict)
    nodes_removed: dict[str, list[str]] = Field(default_factory=dict)
    nodes_changed: dict[str, list[str]] = Field(default_factory=dict)
    edges_added: dict[str, list[str]] = Field(default_factory=dict)
    edges_removed: dict[str, list[str]] = Field(default_factory=dict)
    trait_changes: list[TraitChange] = Field(default_factory=list)
    world_id_change: Optional[list[str]] = None

    @property
    def is_empty(self) -> bool:
        return not (self.nodes_added or self.nodes_removed or self.nodes_changed
                    or self.edges_added or self.edges_removed or self.trait_changes
                    or self.world_id_change)


def _families(world: WorldState) -> dict[str, dict[str, object]]:
    return {
        "entities": {n.id: n for n in world.entities},
        "events": {n.id: n for n in world.events},
        "locations": {n.id: n for n in world.locations},
        "objects": {n.id: n for n in world.objects},
        "channels": {n.id: n for n in world.channels},
        "world_traits": {n.id: n for n in world.world_traits},
    }


def _edge_keys(world: WorldState) -> dict[str, set[str]]:
    causal = {f"{e.source_id}|{e.target_id}|{e.causality_type}|{e.trait_target or ''}"
              for e in world.causal_topology}
    social = {f"{e.source_id}|{e.target_id}" for e in world.social_topology}
    spatial = {f"{e.source_id}|{e.target_id}" for e in world.spatial_topology}
    return {"causal": causal, "social": social, "spatial": spatial}


def diff_worlds(a: WorldState, b: WorldState) -> WorldDiff:
    """Structural diff from a to b: id-set changes per family, edge-key
    changes per topology, and per-trait baseline value changes."""
    diff = WorldDiff()
    fam_a, fam_b = _families(a), _families(b)
    for family in fam_a:
        ids_a, ids_b = set(fam_a[family]), set(fam_b[family])
        added = sorted(ids_b - ids_a)
        removed = sorted(ids_a - ids_b)
        changed = sorted(
            nid for nid in ids_a & ids_b
            if fam_a[family][nid].model_dump(mode="json") != fam_b[family][nid].model_dump(mode="json")
        )
        if added:
            diff.nodes_added[family] = added
        if removed:
            diff.nodes_removed[family] = removed
        if changed:
            diff.nodes_changed[family] = changed

    edges_a, edges_b = _edge_keys(a), _edge_keys(b)
    for topology in edges_a:
        added = sorted(edges_b[topology] - edges_a[topology])
        removed = sorted(edges_a[topology] - edges_b[topology])
        if added:
            diff.edges_added[topology] = added
        if removed:
            diff.edges_removed[topology] = removed

    for eid in sorted(set(fam_a["entities"]) & set(fam_b["entities"])):
        ent_a, ent_b = fam_a["entities"][eid], fam_b["entities"][eid]
        names = sorted(set(ent_a.traits) | set(ent_b.traits))
        for name in names:
            old = ent_a.traits[name].value if name in ent_a.traits else None
            new = ent_b.traits[name].value if name in ent_b.traits else None
            if old != new:
                diff.trait_changes.append(TraitChange(entity_id=eid, trait=name, old=old, new=new))

    if a.world_id != b.world_id:
        diff.world_id_change = [a.world_id, b.world_id]
    return diff


def check_tree(rows: dict[str, VersionRow]) -> None:
    """Raise VersionGraphError unless rows form a single-rooted tree."""
    if not rows:
        return
    roots = [r.id for r in rows.values() if r.ancestor_id is None]
    if len(roots) != 1:
        raise VersionGraphError(f"expected exactly one root, found {len(roots)}")
    for row in rows.values():
        if row.ancestor_id is not None and row.ancestor_id not in rows:
            raise VersionGraphError(f"{row.id} has dangling ancestor {row.ancestor_id}")
    # Cycle check: every row must reach the root.
    root = roots[0]
    for row in rows.values():
        seen = set()
        cursor: Optional[str] = row.id
        while cursor is not None:
            if cursor in seen:
                raise VersionGraphError(f"ancestor cycle through {cursor}")
            seen.add(cursor)
            cursor = rows[cursor].ancestor_id
        if root not in seen:
            raise VersionGraphError(f"{row.id} does not reach the root")


class VersionStore:
    """Single-project version tree.  `root` directory is optional; without
    it the store is memory-only (tests, embedded use)."""

    def __init__(self, root: str | Path | None = None):
        self._lock = threading.Lock()
        self._rows: dict[str, VersionRow] = {}
        self._order: list[str] = []
        self._blobs: dict[str, WorldState] = {}
        self._seq = 0
        self.active_id: Optional[str] = None
        self._root = Path(root) if root is not None else None
        if self._root is not None:
            self._root.mkdir(parents=True, exist_ok=True)
            (self._root / "blobs").mkdir(exist_ok=True)
            self._load()

    # -- persistence -----------------------------------------------------

    def _load(self) -> None:
        log = self._root / "versions.jsonl"
        if log.exists():
            for line in log.read_text(encoding="utf-8").splitlines():
                if line.strip():
                    row = VersionRow.model_validate_json(line)
                    self._rows[row.id] = row
                    self._order.append(row.id)
            self._seq = len(self._order)
        active = self._root / "ACTIVE"
        if active.exists():
            candidate = active.read_text(encoding="utf-8").strip()
            self.active_id = candidate if candidate in self._rows else None
        elif self._order:
            self.active_id = self._order[-1]

    def _flush(self) -> None:
        if self._root is None:
            return
        log = self._root / "versions.jsonl"
        tmp = log.with_suffix(".jsonl.tmp")
        with tmp.open("w", encoding="utf-8") as fh:
            for vid in self._order:
                fh.write(self._rows[vid].model_dump_json() + "\n")
        tmp.replace(log)
        (self._root / "ACTIVE").write_text(self.active_id or "", encoding="utf-8")

    def _store_blob(self, world: WorldState) -> str:
        text = canonical_world_json(world)
        ref = hashlib.sha256(text.encode("utf-8")).hexdigest()
        if ref not in self._blobs:
            self._blobs[ref] = world
            if self._root is not None:
                blob = self._root / "blobs" / f"{ref}.json"
                if not blob.exists():
                    blob.write_text(text, encoding="utf-8")
        return ref

    # -- reads -----------------------------------------------------------

    def rows(self) -> list[VersionRow]:
        return [self._rows[vid] for vid in self._order]

    def row(self, version_id: str) -> VersionRow:
        try:
            return self._rows[version_id]
        except KeyError:
            raise UnknownNodeError(version_id) from None

    def world(self, version_id: str) -> WorldState:
        row = self.row(version_id)
        if row.world_ref in self._blobs:
            return self._blobs[row.world_ref]
        if self._root is not None:
            blob = self._root / "blobs" / f"{row.world_ref}.json"
            if blob.exists():
                world = WorldState.model_validate_json(blob.read_text(encoding="utf-8"))
                self._blobs[row.world_ref] = world
                return world
        raise UnknownNodeError(row.world_ref)

    def children(self, version_id: str) -> list[VersionRow]:
        return [r for r in self.rows() if r.ancestor_id == version_id]

    def _is_descendant(self, candidate: str, of: str) -> bool:
        cursor: Optional[str] = candidate
        while cursor is not None:
            if cursor == of:
                return True
            cursor = self._rows[cursor].ancestor_id
        return False

    # -- mutations ---------------------------------------------------------

    def create_version(
        self,
        world: WorldState,
        *,
        parent_id: Optional[str] = None,
        source: Source = "manual_edit",
        branch_policy: BranchPolicy = "auto",
        counterfactual_origin: bool = False,
    ) -> VersionRow:
        """Persist a validated world as a new row.

        Branch policy resolves the world's branch tag: mainline pins factual,
        shadow pins shadow, auto sends counterfactual-origin worlds to shadow
        and lets everything else inherit the parent's tag (factual at root).
        """
        report = validate_world(world)
        if report.errors:
            first = report.errors[0]
            raise InvalidWorldError(f"{first.rule}: {first.subject}: {first.message}")
        with self._lock:
            if parent_id is None:
                if self._rows:
                    raise VersionGraphError("project already has a root version")
            else:
                if parent_id not in self._rows:
                    raise UnknownNodeError(parent_id)

            if branch_policy == "mainline":
                tag = "factual"
            elif branch_policy == "shadow":
                tag = "shadow"
            elif counterfactual_origin:
                tag = "shadow"
            elif parent_id is not None:
                tag = self._rows[parent_id].world_id
            else:
                tag = "factual"

            tagged = world if world.world_id == tag else world.model_copy(update={"world_id": tag})
            self._seq += 1
            row = VersionRow(
                id=f"v{self._seq:04d}",
                ancestor_id=parent_id,
                world_id=tag,
                source=source,
                created_at=datetime.now(timezone.utc).isoformat(timespec="seconds"),
                world_ref=self._store_blob(tagged),
            )
            self._rows[row.id] = row
            self._order.append(row.id)
            self.active_id = row.id
            self._flush()
            return row

    def promote_branch(self, version_id: str) -> VersionRow:
        """Copy a shadow row's world onto a fresh factual row parented at the
        shadow's nearest factual ancestor."""
        with self._lock:
            row = self.row(version_id)
            if row.world_id != "shadow":
                raise VersionGraphError(f"{version_id} is already factual")
            parent: Optional[str] = row.ancestor_id
            while parent is not None and self._rows[parent].world_id != "factual":
                parent = self._rows[parent].ancestor_id
            if parent is None:
                raise VersionGraphError(f"{version_id} has no factual ancestor to promote onto")
            world = self.world(version_id).model_copy(update={"world_id": "factual"})
            self._seq += 1
            promoted = VersionRow(
                id=f"v{self._seq:04d}",
                ancestor_id=parent,
                world_id="factual",
                source="promotion",
                created_at=datetime.now(timezone.utc).isoformat(timespec="seconds"),
                world_ref=self._store_blob(world),
            )
            self._rows[promoted.id] = promoted
            self._order.append(promoted.id)
            self.active_id = promoted.id
            self._flush()
            return promoted

    def reparent(self, version_id: str, new_parent_id: Optional[str]) -> VersionRow:
        with self._lock:
            row = self.row(version_id)
            if new_parent_id is not None and new_parent_id not in self._rows:
                raise UnknownNodeError(new_parent_id)
            if new_parent_id is None:
                other_roots = [r for r in self._rows.values()
                               if r.ancestor_id is None and r.id != version_id]
                if other_roots:
                    raise VersionGraphError("reparenting to null would create a second root")
            else:
                if self._is_descendant(new_parent_id, of=version_id):
                    raise VersionGraphError("reparenting would create an ancestor cycle")
            updated = row.model_copy(update={"ancestor_id": new_parent_id})
            self._rows[version_id] = updated
            self._flush()
            return updated

    def delete_version(self, version_id: str) -> None:
        """Remove a row; its children re-parent to the removed row's ancestor.
        The root is deletable only when it has at most one child."""
        with self._lock:
            row = self.row(version_id)
            kids = [r for r in self._rows.values() if r.ancestor_id == version_id]
            if row.ancestor_id is None and len(kids) > 1:
                raise VersionGraphError("cannot delete the root while it has multiple children")
            for kid in kids:
                self._rows[kid.id] = kid.model_copy(update={"ancestor_id": row.ancestor_id})
            del self._rows[version_id]
            self._order.remove(version_id)
            if self.active_id == version_id:
                self.active_id = row.ancestor_id if row.ancestor_id in self._rows else (
                    self._order[-1] if self._order else None)
            self._flush()

    def diff_versions(self, a_id: str, b_id: str) -> WorldDiff:
        return diff_worlds(self.world(a_id), self.world(b_id))

    def set_active(self, version_id: str) -> None:
        with self._lock:
            self.row(version_id)
            self.active_id = version_id
            self._flush()

    def check_invariants(self) -> None:
        check_tree(self._rows)
