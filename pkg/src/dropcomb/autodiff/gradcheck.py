"""Central finite-difference check of tape gradients."""
from dataclasses import dataclass, field
from typing import Callable, Dict, List, Optional, Tuple

import numpy as np

from ..utils.logger import logger
from .params import ParamStore
from .tensor import Tensor


@dataclass
class GradCheckReport:
    """Per-parameter maximum relative error and the entries above tolerance."""

    tol: float
    max_error: Dict[str, float] = field(default_factory=dict)
    flagged: List[Tuple[str, Tuple[int, ...], float, float]] = field(default_factory=list)

    @property
    def passed(self) -> bool:
        return not self.flagged

    @property
    def worst(self) -> float:
        return max(self.max_error.values(), default=0.0)


def finite_diff_check(loss_fn: Callable[[], Tensor], store: ParamStore, h: float = 1e-5,
                      tol: float = 1e-6, sample: Optional[int] = None,
                      rng: Optional[np.random.Generator] = None,
                      floor: float = 1e-4) -> GradCheckReport:
    """Compare analytic gradients to (f(theta+h) - f(theta-h)) / 2h.

    The relative error of an entry is |a - n| / max(|a|, |n|, floor); the
    floor keeps entries whose true gradient is ~0 from reporting noise.

    Args:
        loss_fn: Deterministic closure building a scalar loss on a fresh tape
        store: Parameters to perturb
        h: Finite-difference step
        tol: Entries above this relative error are flagged
        sample: Check at most this many random entries per parameter
        rng: Generator used for sampling entries
        floor: Denominator floor of the relative error

    Returns:
        GradCheckReport with one entry per parameter
    """
    if h <= 0:
        raise ValueError("finite_diff_check needs h > 0")
    rng = rng if rng is not None else np.random.default_rng(0)

    store.zero_grad()
    loss_fn().backward()
    analytic = {name: grad.copy() for name, grad in store.grads().items()}

    report = GradCheckReport(tol=tol)
    for name, tensor in store:
        flat = tensor.data.reshape(-1)
        positions = np.arange(flat.size)
        if sample is not None and flat.size > sample:
            positions = np.sort(rng.choice(flat.size, size=sample, replace=False))
        worst = 0.0
        for pos in positions:
            original = flat[pos]
            flat[pos] = original + h
            plus = loss_fn().item()
            flat[pos] = original - h
            minus = loss_fn().item()
            flat[pos] = original
            numeric = (plus - minus) / (2.0 * h)
            exact = analytic[name].reshape(-1)[pos]
            error = abs(exact - numeric) / max(abs(exact), abs(numeric), floor)
            worst = max(worst, error)
            if error > tol:
                index = tuple(int(i) for i in np.unravel_index(pos, tensor.shape))
                report.flagged.append((name, index, float(exact), float(numeric)))
        report.max_error[name] = worst
        logger.debug(f"gradcheck {name}: max relative error {worst:.3e}")
    return report
