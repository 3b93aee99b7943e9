"""Monotonic character alignment oracles for the hard-attention model.

Pairs are aligned with a unit-cost edit-distance DP (match 0, sub/del/ins 1)
and the script is linearized into a write/advance action sequence the
decoder is trained on. Ties are broken deterministically: walking the pair
left to right, MATCH is preferred over SUB over DEL over INS whenever the
choice stays on a minimum-cost path. That forward orientation matters, e.g.
("thee","the") aligns as M M M DEL, not M M DEL M.
"""

from __future__ import annotations

from dataclasses import dataclass
from enum import Enum
from typing import IO, Iterable

from histnorm.corpus import Dataset


class EditOp(Enum):
    MATCH = "match"
    SUB = "sub"
    DEL = "del"
    INS = "ins"


@dataclass(frozen=True)
class EditStep:
    op: EditOp
    char: str | None = None  # emitted target char for MATCH/SUB/INS, None for DEL


@dataclass(frozen=True)
class EditScript:
    source: str
    steps: tuple[EditStep, ...]

    def cost(self) -> int:
        return sum(1 for s in self.steps if s.op is not EditOp.MATCH)

    def output(self) -> str:
        return "".join(s.char for s in self.steps if s.char is not None)


WRITE = "write"
STEP = "step"
STOP = "stop"


@dataclass(frozen=True)
class Action:
    kind: str  # "write" | "step" | "stop"
    char: str | None = None

    def render(self) -> str:
        if self.kind == WRITE:
            return f"W({self.char})"
        return "S" if self.kind == STEP else "STOP"


STEP_ACTION = Action(STEP)
STOP_ACTION = Action(STOP)


@dataclass(frozen=True)
class ActionSequence:
    source: str
    actions: tuple[Action, ...]

    def written(self) -> str:
        return "".join(a.char for a in self.actions if a.kind == WRITE)

    def step_count(self) -> int:
        return sum(1 for a in self.actions if a.kind == STEP)

    def render(self) -> str:
        return " ".join(a.render() for a in self.actions)


def align(h: str, m: str) -> EditScript:
    """Minimum-cost edit script from h to m with the deterministic tie-break.

    D[i][j] holds the edit distance between the suffixes h[i:] and m[j:],
    so the greedy walk can run left to right and apply the MATCH > SUB >
    DEL > INS preference in source order.
    """
    n, k = len(h), len(m)
    D = [[0] * (k + 1) for _ in range(n + 1)]
    for j in range(k + 1):
        D[n][j] = k - j
    for i in range(n - 1, -1, -1):
        D[i][k] = n - i
        row, below = D[i], D[i + 1]
        hi = h[i]
        for j in range(k - 1, -1, -1):
            best = below[j + 1] + (0 if hi == m[j] else 1)
            if below[j] + 1 < best:
                best = below[j] + 1
            if row[j + 1] + 1 < best:
                best = row[j + 1] + 1
            row[j] = best

    steps: list[EditStep] = []
    i = j = 0
    while i < n or j < k:
        cur = D[i][j]
        if i < n and j < k and h[i] == m[j] and D[i + 1][j + 1] == cur:
            steps.append(EditStep(EditOp.MATCH, m[j]))
            i += 1
            j += 1
        elif i < n and j < k and D[i + 1][j + 1] + 1 == cur:
            steps.append(EditStep(EditOp.SUB, m[j]))
            i += 1
            j += 1
        elif i < n and D[i + 1][j] + 1 == cur:
            steps.append(EditStep(EditOp.DEL))
            i += 1
        else:
            steps.append(EditStep(EditOp.INS, m[j]))
            j += 1
    return EditScript(source=h, steps=tuple(steps))


def script_to_actions(script: EditScript) -> ActionSequence:
    """Linearize an edit script into the oracle action string.

    MATCH/SUB emit WRITE(target char) then STEP, DEL emits a bare STEP,
    INS emits WRITE without advancing; a single STOP terminates. The STEP
    count therefore equals len(source) and the writes spell the target.
    """
    actions: list[Action] = []
    for s in script.steps:
        if s.op in (EditOp.MATCH, EditOp.SUB):
            actions.append(Action(WRITE, s.char))
            actions.append(STEP_ACTION)
        elif s.op is EditOp.DEL:
            actions.append(STEP_ACTION)
        else:
            actions.append(Action(WRITE, s.char))
    actions.append(STOP_ACTION)
    return ActionSequence(source=script.source, actions=tuple(actions))


def oracle_actions(h: str, m: str) -> ActionSequence:
    return script_to_actions(align(h, m))


def dump_actions(pairs: Iterable[tuple[str, str]], out: IO[str]) -> None:
    """Debug dump: one rendered action line per pair."""
    for h, m in pairs:
        out.write(f"{h}\t{m}\t{oracle_actions(h, m).render()}\n")


# Damerau-Levenshtein (restricted, adjacent transpositions cost 1) op counts,
# used only to measure how often the monotonicity assumption is violated.

_DL_MATCH, _DL_SUB, _DL_DEL, _DL_INS, _DL_TRANS = range(5)


def _damerau_op_counts(h: str, m: str) -> list[int]:
    n, k = len(h), len(m)
    d = [[0] * (k + 1) for _ in range(n + 1)]
    for i in range(n + 1):
        d[i][0] = i
    for j in range(k + 1):
        d[0][j] = j
    for i in range(1, n + 1):
        for j in range(1, k + 1):
            cost = 0 if h[i - 1] == m[j - 1] else 1
            best = min(d[i - 1][j] + 1, d[i][j - 1] + 1, d[i - 1][j - 1] + cost)
            if i > 1 and j > 1 and h[i - 1] == m[j - 2] and h[i - 2] == m[j - 1] and h[i - 1] != m[j - 1]:
                best = min(best, d[i - 2][j - 2] + 1)
            d[i][j] = best

    counts = [0] * 5
    i, j = n, k
    while i > 0 or j > 0:
        cur = d[i][j]
        if i > 0 and j > 0 and h[i - 1] == m[j - 1] and d[i - 1][j - 1] == cur:
            counts[_DL_MATCH] += 1
            i, j = i - 1, j - 1
        elif (
            i > 1
            and j > 1
            and h[i - 1] == m[j - 2]
            and h[i - 2] == m[j - 1]
            and h[i - 1] != m[j - 1]
            and d[i - 2][j - 2] + 1 == cur
        ):
            counts[_DL_TRANS] += 1
            i, j = i - 2, j - 2
        elif i > 0 and j > 0 and d[i - 1][j - 1] + 1 == cur:
            counts[_DL_SUB] += 1
            i, j = i - 1, j - 1
        elif i > 0 and d[i - 1][j] + 1 == cur:
            counts[_DL_DEL] += 1
            i -= 1
        else:
            counts[_DL_INS] += 1
            j -= 1
    return counts


def nonmonotonicity_rate(train: Dataset) -> float:
    """Fraction of (non-match) edit operations that are adjacent
    transpositions, aggregated over all training pairs. Returns 0.0 when no
    edits are needed at all.
    """
    trans = 0
    edits = 0
    for pair in train.pairs:
        counts = _damerau_op_counts(pair.hist, pair.modern)
        trans += counts[_DL_TRANS]
        edits += counts[_DL_SUB] + counts[_DL_DEL] + counts[_DL_INS] + counts[_DL_TRANS]
    if edits == 0:
        return 0.0
    return trans / edits
