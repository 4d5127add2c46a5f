"""
Tensor Module
Dense float64 tensors, differentiable functions and the reverse-mode graph
"""

import logging
from contextvars import ContextVar
from typing import Any, Dict, List, Optional, Sequence, Tuple, Union

import numpy as np

from utils.exceptions import ContractViolationError

logger = logging.getLogger(__name__)

ArrayLike = Union[np.ndarray, float, int, Sequence[float], Sequence[Sequence[float]]]

MAX_AXES = 4

_active_graph: ContextVar[Optional["Graph"]] = ContextVar("active_graph", default=None)


class Function:
    """
    Base class for differentiable operations.

    Subclasses implement `forward` on raw arrays and `backward`, which maps the
    gradient of the output to one gradient per input (None for inputs that
    need none). Intermediate values needed by `backward` are stored on `self`.
    """

    def __init__(self, *inputs: "Tensor"):
        self.inputs = inputs
        self.output: Optional["Tensor"] = None

    def forward(self, *arrays: np.ndarray, **kwargs: Any) -> np.ndarray:
        raise NotImplementedError("Forward pass not implemented for this function")

    def backward(self, grad: np.ndarray) -> Tuple[Optional[np.ndarray], ...]:
        raise NotImplementedError("Backward pass not implemented for this function")

    @classmethod
    def apply(cls, *inputs: "Tensor", **kwargs: Any) -> "Tensor":
        """
        Run the forward pass and link the result into the graph.

        Args:
            *inputs: Input tensors
            **kwargs: Non-differentiable options forwarded to `forward`

        Returns:
            Output tensor; it carries a creator only if some input requires grad
        """
        func = cls(*inputs)
        out_data = func.forward(*(t.data for t in inputs), **kwargs)
        requires_grad = any(t.requires_grad for t in inputs)
        out = Tensor(out_data, requires_grad=requires_grad)
        if requires_grad:
            out.creator = func
            func.output = out
            graph = _active_graph.get()
            if graph is not None:
                graph.record(func)
        return out

    @property
    def name(self) -> str:
        return type(self).__name__


class Tensor:
    """
    A float64 array with an optional gradient buffer and creator link.

    Image data uses the [batch=1, height, width, channel] layout.
    """

    def __init__(
        self, data: ArrayLike, requires_grad: bool = False, name: Optional[str] = None
    ):
        self.data = np.asarray(data, dtype=np.float64)
        if self.data.ndim > MAX_AXES:
            raise ContractViolationError(
                f"tensors have at most {MAX_AXES} axes, got shape {self.data.shape}",
                operation="Tensor",
            )
        self.requires_grad = requires_grad
        self.grad: Optional[np.ndarray] = None
        self.creator: Optional[Function] = None
        self.name = name

    @property
    def shape(self) -> Tuple[int, ...]:
        return self.data.shape

    @property
    def size(self) -> int:
        return int(self.data.size)

    @property
    def is_leaf(self) -> bool:
        return self.creator is None

    def item(self) -> float:
        if self.size != 1:
            raise ContractViolationError(
                f"item() needs a single value, shape is {self.shape}", operation="item"
            )
        return float(self.data.reshape(-1)[0])

    def numpy(self) -> np.ndarray:
        return self.data.copy()

    def accumulate_grad(self, grad: np.ndarray) -> None:
        if self.grad is None:
            self.grad = np.array(grad, dtype=np.float64, copy=True)
        else:
            self.grad += grad

    def zero_grad(self) -> None:
        self.grad = None

    def backward(self, graph: Optional["Graph"] = None) -> None:
        backward(self, graph)

    def __repr__(self) -> str:
        tag = f", name={self.name!r}" if self.name else ""
        return f"Tensor(shape={self.shape}, requires_grad={self.requires_grad}{tag})"

    # arithmetic sugar, implemented in functional
    def __add__(self, other: Union["Tensor", float]) -> "Tensor":
        from .functional import add
        return add(self, as_tensor(other))

    def __radd__(self, other: float) -> "Tensor":
        return self.__add__(other)

    def __sub__(self, other: Union["Tensor", float]) -> "Tensor":
        from .functional import add, neg
        return add(self, neg(as_tensor(other)))

    def __rsub__(self, other: float) -> "Tensor":
        from .functional import add, neg
        return add(neg(self), as_tensor(other))

    def __neg__(self) -> "Tensor":
        from .functional import neg
        return neg(self)

    def __mul__(self, other: Union["Tensor", float]) -> "Tensor":
        from .functional import mul
        return mul(self, as_tensor(other))

    def __rmul__(self, other: float) -> "Tensor":
        return self.__mul__(other)

    def sum(self) -> "Tensor":
        from .functional import reduce_sum
        return reduce_sum(self)

    def mean(self) -> "Tensor":
        from .functional import reduce_sum
        return reduce_sum(self) * (1.0 / self.size)

    def square(self) -> "Tensor":
        from .functional import mul
        return mul(self, self)


def as_tensor(value: Union[Tensor, ArrayLike]) -> Tensor:
    """Wrap plain numbers and arrays as constant tensors"""
    if isinstance(value, Tensor):
        return value
    return Tensor(value, requires_grad=False)


class Graph:
    """
    Ordered record of executed differentiable operations.

    Use `with Graph() as graph:` to record a forward pass, or `Graph.trace(loss)`
    to rebuild the order from the creator links of a result.
    """

    def __init__(self) -> None:
        self.nodes: List[Function] = []
        self._token: Any = None

    def record(self, func: Function) -> None:
        self.nodes.append(func)

    def __enter__(self) -> "Graph":
        self._token = _active_graph.set(self)
        return self

    def __exit__(self, *exc: Any) -> None:
        _active_graph.reset(self._token)
        self._token = None

    def __len__(self) -> int:
        return len(self.nodes)

    @classmethod
    def trace(cls, output: Tensor) -> "Graph":
        """Topologically ordered graph of every function upstream of `output`"""
        graph = cls()
        if output.creator is None:
            return graph
        visited = set()
        stack: List[Tuple[Function, bool]] = [(output.creator, False)]
        while stack:
            func, expanded = stack.pop()
            if expanded:
                graph.nodes.append(func)
                continue
            if id(func) in visited:
                continue
            visited.add(id(func))
            stack.append((func, True))
            for parent in func.inputs:
                if parent.creator is not None and id(parent.creator) not in visited:
                    stack.append((parent.creator, False))
        return graph


def backward(loss: Tensor, graph: Optional[Graph] = None) -> None:
    """
    Accumulate dLoss/dLeaf into the `.grad` of every leaf that requires grad.

    Args:
        loss: Single-element tensor
        graph: Recorded graph; traced from `loss` when omitted

    Raises:
        ContractViolationError: If the loss is not a scalar
    """
    if loss.size != 1:
        raise ContractViolationError(
            f"loss must be a scalar, got shape {loss.shape}", operation="backward"
        )
    if not loss.requires_grad:
        logger.debug("backward called on a loss that does not require grad")
        return
    if graph is None:
        graph = Graph.trace(loss)

    grads: Dict[int, np.ndarray] = {id(loss): np.ones_like(loss.data)}
    if loss.creator is None:
        loss.accumulate_grad(grads[id(loss)])
        return

    for func in reversed(graph.nodes):
        out = func.output
        if out is None or id(out) not in grads:
            continue
        input_grads = func.backward(grads.pop(id(out)))
        for tensor, grad in zip(func.inputs, input_grads):
            if grad is None or not tensor.requires_grad:
                continue
            if tensor.creator is None:
                tensor.accumulate_grad(grad)
            elif id(tensor) in grads:
                grads[id(tensor)] = grads[id(tensor)] + grad
            else:
                grads[id(tensor)] = grad
