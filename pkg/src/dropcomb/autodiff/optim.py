"""Adam optimizer over a ParamStore."""
from typing import Dict

import numpy as np

from .params import ParamStore


def adam_step(store: ParamStore, grads: Dict[str, np.ndarray], lr: float = 1e-3,
              beta1: float = 0.9, beta2: float = 0.999, eps: float = 1e-8) -> ParamStore:
    """Apply one bias-corrected Adam update in place.

    m <- b1*m + (1-b1)*g, v <- b2*v + (1-b2)*g^2, then
    theta <- theta - lr * m_hat / (sqrt(v_hat) + eps).

    Args:
        store: Parameters and their moment state
        grads: One gradient per parameter name
        lr: Learning rate
        beta1: First moment decay
        beta2: Second moment decay
        eps: Denominator offset

    Returns:
        The same store, updated

    Raises:
        KeyError: If a parameter has no gradient
    """
    missing = [name for name in store.names() if name not in grads]
    if missing:
        raise KeyError(f"Missing gradient for parameters: {', '.join(missing)}")

    store.step_count += 1
    t = store.step_count
    for name, tensor in store:
        if name in store.frozen:
            continue
        grad = grads[name]
        moments = store.state[name]
        moments.first = beta1 * moments.first + (1.0 - beta1) * grad
        moments.second = beta2 * moments.second + (1.0 - beta2) * grad * grad
        m_hat = moments.first / (1.0 - beta1 ** t)
        v_hat = moments.second / (1.0 - beta2 ** t)
        tensor.data -= lr * m_hat / (np.sqrt(v_hat) + eps)
    return store


class Adam:
    """Stateful wrapper binding hyperparameters to a store."""

    def __init__(self, store: ParamStore, lr: float = 1e-3, beta1: float = 0.9,
                 beta2: float = 0.999, eps: float = 1e-8) -> None:
        self.store = store
        self.lr = lr
        self.beta1 = beta1
        self.beta2 = beta2
        self.eps = eps

    def step(self) -> None:
        adam_step(self.store, self.store.grads(), self.lr, self.beta1, self.beta2, self.eps)

    def zero_grad(self) -> None:
        self.store.zero_grad()
