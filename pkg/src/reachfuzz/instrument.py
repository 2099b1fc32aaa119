"""Minimal node instrumentation as a path differentiation problem.

A set S of blocks is adequate when the projection onto S of any
entry-to-exit path identifies that path uniquely, so hit maps recorded at
S-blocks only lose no path information. Selection starts from a cheap
structural superset and greedily removes nodes while adequacy, checked by
exact DAG path enumeration, is preserved.
"""

from __future__ import annotations

from dataclasses import dataclass

from .cfg import Branch, Cfg, count_paths, iter_paths

DEFAULT_PATH_CAP = 10**6


class AdequacyInconclusive(Exception):
    """Path enumeration would exceed the configured cap; no verdict."""


class InvalidProjection(Exception):
    """A projection that no entry-to-exit path produces."""


class AdequacyViolation(Exception):
    """A projection matched by two or more paths (test hook)."""


@dataclass(frozen=True)
class InstrumentationPlan:
    instrumented: frozenset
    adequacy_certificate: str


def project_trace(trace, s) -> "tuple[int, ...]":
    """Order-preserving restriction of a block-id sequence to the set s."""
    return tuple(b for b in trace if b in s)


def _check_cap(g: Cfg, path_cap: int) -> int:
    n = count_paths(g)
    if n > path_cap:
        raise AdequacyInconclusive(
            f"{n} entry-to-exit paths exceed the enumeration cap {path_cap}"
        )
    return n


def _adequate_over(paths, s) -> bool:
    seen = set()
    for path in paths:
        proj = tuple(b for b in path if b in s)
        if proj in seen:
            return False
        seen.add(proj)
    return True


def is_adequate(g: Cfg, s, path_cap: int = DEFAULT_PATH_CAP) -> bool:
    """Exact adequacy check by exhaustive path enumeration.

    True iff no two distinct entry-to-exit paths project onto s
    identically. Raises AdequacyInconclusive past the path cap rather than
    guessing.
    """
    _check_cap(g, path_cap)
    return _adequate_over(iter_paths(g), s)


def select_instrumentation(g: Cfg, path_cap: int = DEFAULT_PATH_CAP) -> InstrumentationPlan:
    """Choose a locally minimal adequate block set.

    Start from the entry block, every join (in-degree >= 2), and the then
    successor of every branch; fall back to all blocks if that misses.
    Then drop nodes one at a time in descending id order, keeping each
    removal that preserves adequacy. Removing any single remaining
    non-entry node breaks adequacy.
    """
    n_paths = _check_cap(g, path_cap)
    paths = list(iter_paths(g))

    indeg = {b.id: 0 for b in g.blocks}
    for b in g.blocks:
        for succ in b.successors():
            indeg[succ] += 1
    s = {g.entry}
    s.update(i for i, d in indeg.items() if d >= 2)
    s.update(b.term.then_id for b in g.blocks if isinstance(b.term, Branch))
    if not _adequate_over(paths, s):
        s = {b.id for b in g.blocks}

    for node in sorted(s, reverse=True):
        if node == g.entry:
            continue
        s.discard(node)
        if not _adequate_over(paths, s):
            s.add(node)

    return InstrumentationPlan(
        instrumented=frozenset(s),
        adequacy_certificate=f"exhaustive enumeration of {n_paths} paths",
    )


def reconstruct_path(g: Cfg, s, projection) -> "tuple[int, ...]":
    """Invert project_trace under an adequate s.

    Pruned DFS over the DAG for paths whose projection equals the given
    sequence. Exactly one match is returned; zero raises InvalidProjection
    and two or more raises AdequacyViolation.
    """
    projection = tuple(projection)
    matches = []
    # (node, path, consumed) where consumed counts projection symbols used
    stack = [(g.entry, (g.entry,), 0)]
    while stack:
        node, path, used = stack.pop()
        if node in s:
            if used >= len(projection) or projection[used] != node:
                continue
            used += 1
        succs = g.blocks[node].successors()
        if not succs:
            if used == len(projection):
                matches.append(path)
                if len(matches) > 1:
                    break
            continue
        for succ in succs:
            stack.append((succ, path + (succ,), used))
    if not matches:
        raise InvalidProjection(f"no path projects to {projection!r}")
    if len(matches) > 1:
        raise AdequacyViolation(
            f"projection {projection!r} is ambiguous; instrumentation set inadequate"
        )
    return matches[0]
