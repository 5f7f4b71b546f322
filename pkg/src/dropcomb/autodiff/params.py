"""Named parameter storage with per-parameter optimizer state."""
from dataclasses import dataclass, field
from typing import Dict, Iterator, List, Optional, Set, Tuple

import numpy as np

from .tensor import Tensor


@dataclass
class MomentState:
    """Adam moments for one parameter."""

    first: np.ndarray
    second: np.ndarray


@dataclass
class ParamStore:
    """Ordered collection of trainable tensors.

    Names are unique; insertion order is the canonical order used by
    checkpoints and the gradient checker.
    """

    params: Dict[str, Tensor] = field(default_factory=dict)
    state: Dict[str, MomentState] = field(default_factory=dict)
    frozen: Set[str] = field(default_factory=set)
    step_count: int = 0

    def add(self, name: str, values: np.ndarray) -> Tensor:
        """Register a parameter and zeroed optimizer moments for it.

        Raises:
            KeyError: If ``name`` is already registered
        """
        if name in self.params:
            raise KeyError(f"Duplicate parameter name: {name}")
        tensor = Tensor(values, requires_grad=True, name=name)
        self.params[name] = tensor
        self.state[name] = MomentState(np.zeros_like(tensor.data),
                                       np.zeros_like(tensor.data))
        return tensor

    def __getitem__(self, name: str) -> Tensor:
        return self.params[name]

    def __contains__(self, name: object) -> bool:
        return name in self.params

    def __iter__(self) -> Iterator[Tuple[str, Tensor]]:
        return iter(self.params.items())

    def __len__(self) -> int:
        return len(self.params)

    def names(self) -> List[str]:
        return list(self.params)

    def freeze(self, name: str) -> None:
        """Exclude a parameter from optimizer updates."""
        if name not in self.params:
            raise KeyError(f"Unknown parameter: {name}")
        self.frozen.add(name)

    def zero_grad(self) -> None:
        for tensor in self.params.values():
            tensor.zero_grad()

    def grads(self) -> Dict[str, np.ndarray]:
        """Current gradients; parameters the tape never reached get zeros."""
        return {
            name: (t.grad if t.grad is not None else np.zeros_like(t.data))
            for name, t in self.params.items()
        }

    def values(self) -> Dict[str, np.ndarray]:
        """Copies of all parameter values."""
        return {name: t.data.copy() for name, t in self.params.items()}

    def assign(self, values: Dict[str, np.ndarray], strict: bool = True) -> None:
        """Overwrite parameter values in place (shapes must match)."""
        for name, array in values.items():
            if name not in self.params:
                if strict:
                    raise KeyError(f"Unknown parameter: {name}")
                continue
            target = self.params[name]
            if target.data.shape != np.shape(array):
                raise ValueError(
                    f"Shape mismatch for {name}: {target.data.shape} vs {np.shape(array)}"
                )
            target.data[...] = array

    def total_size(self, names: Optional[List[str]] = None) -> int:
        return sum(self.params[n].data.size for n in (names or self.names()))
