"""
Tensor 및 Tape (define-by-run 역전파 기록) 구현
- 모든 값은 float64 NumPy 배열 (row-major) 로 저장됩니다.
- requires_grad 입력을 가진 연산만 현재 스레드의 Tape 에 기록됩니다.
- backward() 는 Tape 를 역순으로 재생한 뒤 초기화합니다.
"""
from __future__ import annotations

import threading
from collections.abc import Callable, Iterator, Sequence
from contextlib import contextmanager
from dataclasses import dataclass
from typing import TYPE_CHECKING

import numpy as np
from numpy.typing import ArrayLike, NDArray

if TYPE_CHECKING:
    from numpy.random import Generator

FloatArray = NDArray[np.float64]
BackwardFn = Callable[[FloatArray], Sequence["FloatArray | None"]]


class DimensionError(ValueError):
    """연산 피연산자 shape 불일치"""

    def __init__(self, op: str, *shapes: tuple[int, ...], detail: str = ""):
        self.op: str = op
        self.shapes: tuple[tuple[int, ...], ...] = shapes
        shown = ", ".join(str(s) for s in shapes)
        extra = f" - {detail}" if detail else ""
        super().__init__(f"{op}: shape 불일치 {shown}{extra}")


class AutogradError(RuntimeError):
    """역전파/옵티마이저 사용 오류 (스칼라가 아닌 손실, 누락된 기울기 등)"""


class Tensor:
    """float64 다차원 값 + 선택적 기울기 버퍼"""

    __slots__ = ("data", "requires_grad", "grad", "name")

    def __init__(self, data: ArrayLike, requires_grad: bool = False, name: str | None = None):
        self.data: FloatArray = np.array(data, dtype=np.float64, copy=True, order="C")
        self.requires_grad: bool = requires_grad
        self.grad: FloatArray | None = None
        self.name: str | None = name

    # ------------------------------------------------------------------
    # 생성 헬퍼
    # ------------------------------------------------------------------
    @classmethod
    def constant(cls, data: ArrayLike) -> Tensor:
        return cls(data, requires_grad=False)

    @classmethod
    def zeros(cls, shape: Sequence[int]) -> Tensor:
        return cls(np.zeros(tuple(shape)), requires_grad=False)

    @classmethod
    def parameter(cls, data: ArrayLike, name: str | None = None) -> Tensor:
        return cls(data, requires_grad=True, name=name)

    @classmethod
    def _wrap(cls, data: FloatArray, requires_grad: bool) -> Tensor:
        # 연산 결과 전용: 복사 없이 감쌉니다
        out = cls.__new__(cls)
        out.data = data
        out.requires_grad = requires_grad
        out.grad = None
        out.name = None
        return out

    # ------------------------------------------------------------------
    # 속성
    # ------------------------------------------------------------------
    @property
    def shape(self) -> tuple[int, ...]:
        return tuple(self.data.shape)

    @property
    def ndim(self) -> int:
        return self.data.ndim

    @property
    def size(self) -> int:
        return int(self.data.size)

    def item(self) -> float:
        if self.data.size != 1:
            raise AutogradError(f"스칼라가 아닌 텐서입니다: shape {self.shape}")
        return float(self.data.reshape(()))

    def numpy(self) -> FloatArray:
        return self.data

    def zero_grad(self) -> None:
        self.grad = None

    def backward(self) -> None:
        backward(self)

    def __repr__(self) -> str:
        label = f" name={self.name!r}" if self.name else ""
        return f"Tensor(shape={self.shape}, requires_grad={self.requires_grad}{label})"

    # ------------------------------------------------------------------
    # 연산자 (순환 참조 방지를 위해 ops 를 지연 import 합니다)
    # ------------------------------------------------------------------
    def __add__(self, other: Tensor) -> Tensor:
        from . import ops
        return ops.add(self, other)

    def __sub__(self, other: Tensor) -> Tensor:
        from . import ops
        return ops.sub(self, other)

    def __mul__(self, other: Tensor | float) -> Tensor:
        from . import ops
        if isinstance(other, Tensor):
            return ops.mul(self, other)
        return ops.scale(self, float(other))

    def __rmul__(self, other: float) -> Tensor:
        from . import ops
        return ops.scale(self, float(other))

    def __neg__(self) -> Tensor:
        from . import ops
        return ops.scale(self, -1.0)

    def __matmul__(self, other: Tensor) -> Tensor:
        from . import ops
        return ops.matmul(self, other)


# ---------------------------------------------------------------------------
# Tape
# ---------------------------------------------------------------------------
@dataclass(slots=True)
class TapeNode:
    op: str
    inputs: tuple[Tensor, ...]
    output: Tensor
    backward_fn: BackwardFn


class Tape:
    """실행 순서대로 기록된 미분 가능 연산 목록. 역순 재생이 곧 역위상 순서입니다."""

    def __init__(self) -> None:
        self.nodes: list[TapeNode] = []
        self.enabled: bool = True

    def record(self, node: TapeNode) -> None:
        self.nodes.append(node)

    def reset(self) -> None:
        self.nodes.clear()

    def __len__(self) -> int:
        return len(self.nodes)

    def op_names(self) -> list[str]:
        return [node.op for node in self.nodes]


_local = threading.local()


def current_tape() -> Tape:
    """스레드마다 하나씩 존재하는 현재 Tape"""
    tape = getattr(_local, "tape", None)
    if tape is None:
        tape = Tape()
        _local.tape = tape
    return tape


@contextmanager
def no_grad() -> Iterator[None]:
    """블록 안의 연산은 Tape 에 기록되지 않습니다 (추론/수치미분용)"""
    tape = current_tape()
    previous = tape.enabled
    tape.enabled = False
    try:
        yield
    finally:
        tape.enabled = previous


def record_op(op: str, inputs: Sequence[Tensor], out: FloatArray, backward_fn: BackwardFn) -> Tensor:
    """연산 결과를 Tensor 로 감싸고, 필요하면 Tape 에 기록합니다."""
    tape = current_tape()
    needs_grad = tape.enabled and any(t.requires_grad for t in inputs)
    result = Tensor._wrap(out, needs_grad)
    if needs_grad:
        tape.record(TapeNode(op, tuple(inputs), result, backward_fn))
    return result


def backward(loss: Tensor) -> None:
    """
    스칼라 손실에서 시작해 Tape 를 역순으로 재생하며 기울기를 채웁니다.
    리프 텐서의 grad 는 누적되고, 중간 텐서의 grad 는 덮어씁니다. 재생 후 Tape 는 초기화됩니다.
    """
    if loss.size != 1:
        raise AutogradError(f"backward 는 스칼라 손실만 허용합니다: shape {loss.shape}")
    if not loss.requires_grad:
        raise AutogradError("손실이 Tape 에 연결되어 있지 않습니다")

    tape = current_tape()
    grads: dict[int, FloatArray] = {id(loss): np.ones_like(loss.data)}
    holders: dict[int, Tensor] = {id(loss): loss}

    for node in reversed(tape.nodes):
        g = grads.pop(id(node.output), None)
        if g is None:
            continue
        node.output.grad = g
        holders.pop(id(node.output), None)
        for inp, gi in zip(node.inputs, node.backward_fn(g)):
            if gi is None or not inp.requires_grad:
                continue
            key = id(inp)
            if key in grads:
                grads[key] = grads[key] + gi
            else:
                grads[key] = gi
                holders[key] = inp

    # Tape 노드의 출력이 아닌 텐서 = 리프
    for key, g in grads.items():
        leaf = holders[key]
        if leaf.grad is None:
            leaf.grad = np.array(g, dtype=np.float64)
        else:
            leaf.grad = leaf.grad + g
    tape.reset()


def uniform_init(shape: Sequence[int], fan_in: int, rng: Generator) -> FloatArray:
    """uniform(-1/sqrt(fan_in), +1/sqrt(fan_in)) 초기값"""
    bound = 1.0 / np.sqrt(max(fan_in, 1))
    return rng.uniform(-bound, bound, size=tuple(shape))
