from __future__ import annotations

from typing import Mapping

from .pddl_core import ActionSemantics, PDDLError


def accuracy(predicted: Mapping[str, ActionSemantics], truth: Mapping[str, ActionSemantics]) -> float:
    """Fraction of true statements recovered, pooled over all actions.

    Spurious predictions are not penalised.
    """
    for name in predicted:
        if name not in truth:
            raise PDDLError(f"prediction for unknown action {name!r}")
    total = sum(len(sem.statements()) for sem in truth.values())
    if total == 0:
        return 1.0
    hit = sum(
        len(predicted[name].statements() & sem.statements())
        for name, sem in truth.items()
        if name in predicted
    )
    return hit / total
