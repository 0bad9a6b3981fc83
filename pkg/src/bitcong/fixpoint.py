"""Whole-CFG invariants by forward propagation of affine state spaces.

Each block is summarised once as the input/output congruence relation of its
instructions.  Entry states are joined with the affine hull along edges until
nothing changes; chains are finite, so no widening is needed.  Edges carry no
conditions: every successor is reachable.
"""

from __future__ import annotations

from collections import deque
from dataclasses import dataclass, field

from .blast import bit_name, blast_program
from .domain import merge
from .inference import infer_io
from .machine import Cfg
from .modlin import AffineSpace, CongruenceSystem, constraints_of, embed, intersect, project, rename, space_of

__all__ = ["BlockSummary", "AnalysisResult", "state_names", "summarize", "apply_summary", "analyze"]


def state_names(registers, width):
    return [bit_name(r, i) for r in registers for i in range(width)]


@dataclass(frozen=True)
class BlockSummary:
    label: str
    relation: CongruenceSystem  # over the block's @in and @out register bits
    stats: dict = field(default_factory=dict, compare=False)


@dataclass
class AnalysisResult:
    entries: dict  # label -> AffineSpace over state_names
    summaries: dict
    updates: dict  # label -> number of strict enlargements

    def system(self, label) -> CongruenceSystem:
        return constraints_of(self.entries[label])


def summarize(cfg: Cfg, label: str, **kw) -> BlockSummary:
    res = infer_io(blast_program(cfg.block_program(label)), **kw)
    return BlockSummary(label, res.system, res.stats.as_dict())


def apply_summary(summary: BlockSummary, state: AffineSpace) -> AffineSpace:
    """Image of ``state`` under the block relation, over the state names again."""
    rel = summary.relation
    n = len(state.var_names)
    in_names, out_names = rel.var_names[:n], rel.var_names[n:]
    if state.is_empty:
        return AffineSpace.empty(state.width, state.var_names)
    pre = embed(rename(constraints_of(state), in_names), rel.var_names)
    post = project(space_of(intersect(rel, pre)), out_names)
    return rename(post, state.var_names)


def analyze(cfg: Cfg, initial: AffineSpace | None = None, *, worklist_order="fifo", **kw) -> AnalysisResult:
    """Least fixpoint of entry states, seeded with ``initial`` (full space if omitted)."""
    names = state_names(cfg.registers, cfg.width)
    if initial is None:
        initial = AffineSpace.full(cfg.width, names)
    if tuple(initial.var_names) != tuple(names):
        raise ValueError("initial space must range over the CFG's register bits")
    summaries = {}

    def summary(label):
        if label not in summaries:
            summaries[label] = summarize(cfg, label, **kw)
        return summaries[label]

    bottom = AffineSpace.empty(cfg.width, names)
    entries = {label: bottom for label in cfg.labels}
    updates = {label: 0 for label in cfg.labels}
    entries[cfg.entry] = initial
    bound = len(names) * cfg.width + 1
    work = deque([cfg.entry])
    queued = {cfg.entry}
    while work:
        u = work.popleft() if worklist_order == "fifo" else work.pop()
        queued.discard(u)
        out = apply_summary(summary(u), entries[u])
        for v in cfg.successors(u):
            joined = merge(entries[v], out)
            if joined != entries[v]:
                entries[v] = joined
                updates[v] += 1
                if updates[v] > bound:
                    raise AssertionError(f"block {v} ascended past the chain bound {bound}")
                if v not in queued:
                    queued.add(v)
                    work.append(v)
    return AnalysisResult(entries, summaries, updates)
